#include <cmath>
#include <random>

#include "doctest.h"
#include "l1ilc/qp.hpp"

using namespace l1ilc;

namespace {

double objective(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
    return 0.5 * x.dot(h * x) + g.dot(x);
}

// Independent first-order oracle: projected gradient ascent on the dual of
//   min 1/2 x'Hx + g'x  s.t.  l <= Ax <= u,
// with x(theta) = -H^{-1}(g + A'theta), theta = lambda_u - lambda_l.
Eigen::VectorXd dual_pg_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                              const Eigen::MatrixXd& a, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, int iterations = 200000) {
    const int                   m = static_cast<int>(a.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    const Eigen::MatrixXd       ahat = llt.solve(a.transpose());  // H^{-1} A'
    const Eigen::MatrixXd       s    = a * ahat;
    const double                lip  = s.eigenvalues().real().maxCoeff();
    const double                step = 1.0 / std::max(lip, 1e-12);

    Eigen::VectorXd lu = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd ll = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd x  = -llt.solve(g);
    for (int it = 0; it < iterations; ++it) {
        const Eigen::VectorXd ax = a * x;
        for (int i = 0; i < m; ++i) {
            if (std::isfinite(upper(i))) {
                lu(i) = std::max(0.0, lu(i) + step * (ax(i) - upper(i)));
            }
            if (std::isfinite(lower(i))) {
                ll(i) = std::max(0.0, ll(i) + step * (lower(i) - ax(i)));
            }
        }
        x = -llt.solve(g + a.transpose() * (lu - ll));
    }
    return x;
}

}  // namespace

TEST_CASE("qp_solve closed-form cases") {
    SUBCASE("unconstrained minimum") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd g(2);
        g << -1.0, -1.0;
        const auto res = qp_solve(h, g, Eigen::MatrixXd::Zero(0, 2), Eigen::VectorXd::Zero(0),
                                  Eigen::VectorXd::Zero(0));
        CHECK(res.converged);
        CHECK(res.x(0) == doctest::Approx(1.0));
        CHECK(res.x(1) == doctest::Approx(1.0));
        CHECK(res.kkt_residual < 1e-12);
    }
    SUBCASE("clipped scalar with multiplier one") {
        Eigen::MatrixXd h(1, 1), a(1, 1);
        h << 1.0;
        a << 1.0;
        Eigen::VectorXd g(1), lower(1), upper(1);
        g << -2.0;
        lower << -std::numeric_limits<double>::infinity();
        upper << 1.0;
        const auto res = qp_solve(h, g, a, lower, upper);
        CHECK(res.converged);
        CHECK(res.x(0) == doctest::Approx(1.0));
        CHECK(res.multipliers(0) == doctest::Approx(1.0));
        CHECK(res.active_upper == std::vector<int>{0});
        CHECK(res.kkt_residual < 1e-12);
    }
    SUBCASE("infeasible bounds are rejected") {
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(1, 1);
        Eigen::MatrixXd a(1, 1);
        a << 1.0;
        Eigen::VectorXd g(1), lower(1), upper(1);
        g << 0.0;
        lower << 1.0;
        upper << -1.0;
        CHECK_THROWS_AS(qp_solve(h, g, a, lower, upper), std::invalid_argument);
    }
    SUBCASE("indefinite Hessian is rejected") {
        Eigen::MatrixXd h(1, 1);
        h << -1.0;
        CHECK_THROWS_AS(qp_solve(h, Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(0, 1),
                                 Eigen::VectorXd::Zero(0), Eigen::VectorXd::Zero(0)),
                        std::invalid_argument);
    }
}

TEST_CASE("qp_solve starts away from the origin when zero is infeasible") {
    // x must satisfy 2 <= x <= 3: the feasibility restoration has to move off
    // zero before the active-set iterations begin.
    Eigen::MatrixXd h(1, 1), a(1, 1);
    h << 1.0;
    a << 1.0;
    Eigen::VectorXd g(1), lower(1), upper(1);
    g << 0.0;
    lower << 2.0;
    upper << 3.0;
    const auto res = qp_solve(h, g, a, lower, upper);
    CHECK(res.converged);
    CHECK(res.x(0) == doctest::Approx(2.0));
    CHECK(res.kkt_residual < 1e-9);
}

TEST_CASE("qp_solve matches the projected-gradient oracle on random instances") {
    std::mt19937_64                  rng(31);
    std::normal_distribution<>       gauss(0.0, 1.0);
    std::uniform_real_distribution<> lo(-2.0, -0.1);
    std::uniform_real_distribution<> hi(0.1, 2.0);

    for (int trial = 0; trial < 20; ++trial) {
        const int       n = 5;
        const int       m = 1 + static_cast<int>(rng() % 4);
        Eigen::MatrixXd r(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                r(i, j) = gauss(rng);
            }
        }
        const Eigen::MatrixXd h = r.transpose() * r + 0.1 * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd       g(n);
        Eigen::MatrixXd       a(m, n);
        Eigen::VectorXd       lower(m), upper(m);
        for (int i = 0; i < n; ++i) {
            g(i) = 2.0 * gauss(rng);
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                a(i, j) = gauss(rng);
            }
            lower(i) = lo(rng);
            upper(i) = hi(rng);
        }

        const auto res = qp_solve(h, g, a, lower, upper);
        CHECK(res.converged);
        CHECK(res.kkt_residual < 1e-8);

        const auto   x_pg  = dual_pg_solve(h, g, a, lower, upper, 100000);
        const double f_as  = objective(h, g, res.x);
        const double f_pg  = objective(h, g, x_pg);
        CHECK(std::abs(f_as - f_pg) < 1e-8 * std::max(1.0, std::abs(f_as)));
    }
}

TEST_CASE("qp_solve reports iteration exhaustion") {
    Eigen::MatrixXd h(1, 1), a(1, 1);
    h << 1.0;
    a << 1.0;
    Eigen::VectorXd g(1), lower(1), upper(1);
    g << -2.0;
    lower << -1.0;
    upper << 1.0;
    const auto res = qp_solve(h, g, a, lower, upper, 1);
    CHECK_FALSE(res.converged);
    CHECK(res.iterations == 1);
}
