#include "l1ilc/state_space.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace l1ilc {

namespace {

// Monic characteristic polynomial of A via the Faddeev-LeVerrier recursion.
std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
    const int           n = static_cast<int>(a.rows());
    std::vector<double> coeffs(static_cast<std::size_t>(n) + 1, 0.0);
    coeffs[0] = 1.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= n; ++k) {
        m                               = a * m;
        const double ck                 = -m.trace() / static_cast<double>(k);
        coeffs[static_cast<std::size_t>(k)] = ck;
        m += ck * Eigen::MatrixXd::Identity(n, n);
    }
    return coeffs;
}

}  // namespace

StateSpace to_state_space(const TransferFunction& g) {
    if (!g.is_proper()) {
        throw std::invalid_argument("to_state_space: improper transfer function");
    }
    const int n = g.den_degree();

    // Normalize the denominator to monic form.
    std::vector<double> den(g.den);
    const double        lead = den[0];
    for (double& c : den) {
        c /= lead;
    }
    std::vector<double> num(g.num.size(), 0.0);
    for (std::size_t i = 0; i < g.num.size(); ++i) {
        num[i] = g.num[i] / lead;
    }

    // Equal-degree numerator: one division step gives the feedthrough and a
    // strictly proper remainder.
    double d = 0.0;
    if (!g.is_zero() && g.num_degree() == g.den_degree()) {
        d = num[0];
        for (std::size_t i = 1; i < num.size(); ++i) {
            num[i] -= d * den[i];
        }
        num.erase(num.begin());
    }

    StateSpace ss;
    ss.d = d;
    ss.a = Eigen::MatrixXd::Zero(n, n);
    ss.b = Eigen::VectorXd::Zero(n);
    ss.c = Eigen::RowVectorXd::Zero(n);
    if (n == 0) {
        return ss;
    }
    for (int i = 0; i + 1 < n; ++i) {
        ss.a(i, i + 1) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        ss.a(n - 1, i) = -den[static_cast<std::size_t>(n - i)];
    }
    ss.b(n - 1) = 1.0;
    // num holds b_{deg} .. b_0; state i carries s^i.
    const int nn = static_cast<int>(num.size());
    for (int i = 0; i < nn; ++i) {
        ss.c(nn - 1 - i) = num[static_cast<std::size_t>(i)];
    }
    return ss;
}

TransferFunction to_transfer_function(const StateSpace& ss) {
    const std::vector<double> den = characteristic_polynomial(ss.a);
    // C (sI-A)^-1 B = det(sI - A + B C) - det(sI - A).
    const std::vector<double> shifted =
        characteristic_polynomial(ss.a - ss.b * ss.c);
    std::vector<double> num = poly::subtract(shifted, den);
    num                     = poly::add(num, poly::scale(den, ss.d));
    return TransferFunction(num, den);
}

DiscreteStateSpace discretize_zoh(const StateSpace& ss, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("discretize_zoh: dt must be positive");
    }
    const int          n = ss.order();
    DiscreteStateSpace out;
    out.dt = dt;
    out.c  = ss.c;
    out.d  = ss.d;
    if (n == 0) {
        out.a = Eigen::MatrixXd::Zero(0, 0);
        out.b = Eigen::VectorXd::Zero(0);
        return out;
    }
    Eigen::MatrixXd augmented         = Eigen::MatrixXd::Zero(n + 1, n + 1);
    augmented.topLeftCorner(n, n)     = ss.a * dt;
    augmented.topRightCorner(n, 1)    = ss.b * dt;
    const Eigen::MatrixXd expm        = augmented.exp();
    out.a                             = expm.topLeftCorner(n, n);
    out.b                             = expm.topRightCorner(n, 1);
    return out;
}

SampledSignal simulate(const DiscreteStateSpace& dss, const SampledSignal& input,
                       const Eigen::VectorXd& x0) {
    if (std::abs(dss.dt - input.dt) > 1e-12 * std::max(dss.dt, input.dt)) {
        throw std::invalid_argument("simulate: input dt does not match model dt");
    }
    if (x0.size() != dss.order()) {
        throw std::invalid_argument("simulate: initial state dimension mismatch");
    }
    Eigen::VectorXd     x = x0;
    std::vector<double> y(input.size(), 0.0);
    for (std::size_t k = 0; k < input.size(); ++k) {
        const double u = input.values[k];
        y[k]           = (dss.order() > 0 ? (dss.c * x).value() : 0.0) + dss.d * u;
        if (dss.order() > 0) {
            x = dss.a * x + dss.b * u;
        }
    }
    return SampledSignal(std::move(y), dss.dt);
}

}  // namespace l1ilc
