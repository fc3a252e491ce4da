#include <cmath>
#include <random>

#include "doctest.h"
#include "l1ilc/state_space.hpp"

using namespace l1ilc;

TEST_CASE("to_state_space canonical forms") {
    SUBCASE("m/(s+m), m=1") {
        const auto ss = to_state_space(TransferFunction({1.0}, {1.0, 1.0}));
        CHECK(ss.order() == 1);
        CHECK(ss.a(0, 0) == doctest::Approx(-1.0));
        CHECK(ss.b(0) == doctest::Approx(1.0));
        CHECK(ss.c(0) == doctest::Approx(1.0));
        CHECK(ss.d == doctest::Approx(0.0));
    }
    SUBCASE("integrator 1/s") {
        const auto ss = to_state_space(TransferFunction({1.0}, {1.0, 0.0}));
        CHECK(ss.order() == 1);
        CHECK(ss.a(0, 0) == doctest::Approx(0.0));
        CHECK(ss.b(0) == doctest::Approx(1.0));
        CHECK(ss.c(0) == doctest::Approx(1.0));
    }
    SUBCASE("biproper (s+1)/(s+2) has unit feedthrough") {
        const TransferFunction g({1.0, 1.0}, {1.0, 2.0});
        const auto             ss = to_state_space(g);
        CHECK(ss.d == doctest::Approx(1.0));
        CHECK(ss.a(0, 0) == doctest::Approx(-2.0));
        // Recovered transfer function must match the input coefficients.
        const auto back = to_transfer_function(ss);
        REQUIRE(back.num.size() == g.num.size());
        for (std::size_t i = 0; i < g.num.size(); ++i) {
            CHECK(back.num[i] == doctest::Approx(g.num[i]).epsilon(1e-9));
        }
        for (std::size_t i = 0; i < g.den.size(); ++i) {
            CHECK(back.den[i] == doctest::Approx(g.den[i]).epsilon(1e-9));
        }
    }
    SUBCASE("improper input throws") {
        CHECK_THROWS_AS(to_state_space(TransferFunction({1.0, 0.0, 0.0}, {1.0, 1.0})),
                        std::invalid_argument);
    }
}

TEST_CASE("realization round trip on random stable systems") {
    std::mt19937_64                  rng(11);
    std::uniform_real_distribution<> pole(0.2, 6.0);
    std::uniform_real_distribution<> coeff(-3.0, 3.0);
    std::uniform_int_distribution<>  degree(1, 5);

    for (int trial = 0; trial < 50; ++trial) {
        const int           n = degree(rng);
        std::vector<double> den{1.0};
        for (int i = 0; i < n; ++i) {
            den = poly::multiply(den, {1.0, pole(rng)});
        }
        std::vector<double> num;
        const int           nn = std::uniform_int_distribution<>(0, n - 1)(rng);
        for (int i = 0; i <= nn; ++i) {
            num.push_back(coeff(rng));
        }
        if (poly::is_zero(num)) {
            num = {1.0};
        }
        const TransferFunction g(num, den);
        const auto             back = to_transfer_function(to_state_space(g));

        REQUIRE(back.den.size() == g.den.size());
        double scale = 0.0;
        for (double c : g.den) {
            scale = std::max(scale, std::abs(c));
        }
        for (std::size_t i = 0; i < g.den.size(); ++i) {
            CHECK(std::abs(back.den[i] - g.den[i]) < 1e-9 * scale);
        }
        double nscale = 0.0;
        for (double c : g.num) {
            nscale = std::max(nscale, std::abs(c));
        }
        REQUIRE(back.num.size() == g.num.size());
        for (std::size_t i = 0; i < g.num.size(); ++i) {
            CHECK(std::abs(back.num[i] - g.num[i]) < 1e-9 * nscale);
        }
    }
}

TEST_CASE("discretize_zoh") {
    SUBCASE("integrator") {
        const auto dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 0.0})), 0.1);
        CHECK(dss.a(0, 0) == doctest::Approx(1.0));
        CHECK(dss.b(0) == doctest::Approx(0.1));
    }
    SUBCASE("first-order lag matches the analytic hold") {
        const auto dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), 0.1);
        CHECK(dss.a(0, 0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
        CHECK(dss.b(0) == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-12));
    }
    SUBCASE("dt -> 0 limit") {
        const auto dss =
            discretize_zoh(to_state_space(TransferFunction({2.0}, {1.0, 3.0, 2.0})), 1e-8);
        CHECK(dss.a(0, 0) == doctest::Approx(1.0));
        CHECK(dss.a(1, 1) == doctest::Approx(1.0));
        CHECK(std::abs(dss.b(0)) < 1e-7);
        CHECK(std::abs(dss.b(1)) < 1e-7);
    }
    SUBCASE("bad dt throws") {
        CHECK_THROWS_AS(discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("simulate") {
    const double dt = 0.001;
    SUBCASE("step response of 1/(s+1) at t=1") {
        const auto dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), dt);
        const auto y   = simulate(dss, SampledSignal::constant(1.0, 1001, dt),
                                  Eigen::VectorXd::Zero(1));
        CHECK(y.values[1000] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-3));
    }
    SUBCASE("zero input, zero state stays zero") {
        const auto dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), dt);
        const auto y =
            simulate(dss, SampledSignal::constant(0.0, 100, dt), Eigen::VectorXd::Zero(1));
        CHECK(linf_norm(y) == 0.0);
    }
    SUBCASE("integrator ramps to 1 under unit input") {
        const auto dss =
            discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 0.0})), 0.1);
        const auto y =
            simulate(dss, SampledSignal::constant(1.0, 11, 0.1), Eigen::VectorXd::Zero(1));
        CHECK(y.values[10] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("dt mismatch throws") {
        const auto dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), dt);
        CHECK_THROWS_AS(
            simulate(dss, SampledSignal::constant(1.0, 10, 0.5), Eigen::VectorXd::Zero(1)),
            std::invalid_argument);
        CHECK_THROWS_AS(
            simulate(dss, SampledSignal::constant(1.0, 10, dt), Eigen::VectorXd::Zero(2)),
            std::invalid_argument);
    }
}

TEST_CASE("ZOH simulation is exact at the sample instants") {
    SUBCASE("first order") {
        const double dt  = 0.05;
        const auto   dss = discretize_zoh(to_state_space(TransferFunction({1.0}, {1.0, 1.0})), dt);
        const auto   y   = simulate(dss, SampledSignal::constant(1.0, 200, dt),
                                    Eigen::VectorXd::Zero(1));
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double t = y.time_of(k);
            CHECK(std::abs(y.values[k] - (1.0 - std::exp(-t))) < 1e-6);
        }
    }
    SUBCASE("second order 2/((s+1)(s+2))") {
        const double dt = 0.05;
        const auto   dss =
            discretize_zoh(to_state_space(TransferFunction({2.0}, {1.0, 3.0, 2.0})), dt);
        const auto y = simulate(dss, SampledSignal::constant(1.0, 200, dt),
                                Eigen::VectorXd::Zero(2));
        for (std::size_t k = 0; k < y.size(); ++k) {
            const double t        = y.time_of(k);
            const double analytic = 1.0 - 2.0 * std::exp(-t) + std::exp(-2.0 * t);
            CHECK(std::abs(y.values[k] - analytic) < 1e-6);
        }
    }
}
