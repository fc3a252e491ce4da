#include "l1ilc/norms.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <deque>
#include <stdexcept>

#include "l1ilc/state_space.hpp"

namespace l1ilc {

double l1_system_norm(const TransferFunction& g, double dt, double tail_tol) {
    if (!g.is_strictly_proper()) {
        throw std::invalid_argument("l1_system_norm: system must be strictly proper");
    }
    if (!(tail_tol > 0.0)) {
        throw std::invalid_argument("l1_system_norm: tail_tol must be positive");
    }
    if (g.is_zero()) {
        return 0.0;
    }
    if (!is_stable(g)) {
        throw std::invalid_argument("l1_system_norm: system must be stable");
    }

    const auto poles = g.poles();
    double     slowest_decay = std::numeric_limits<double>::infinity();
    double     slowest_oscillation = 0.0;  // longest oscillation period
    for (const auto& p : poles) {
        slowest_decay = std::min(slowest_decay, -p.real());
        if (std::abs(p.imag()) > 1e-12) {
            slowest_oscillation = std::max(slowest_oscillation, 2.0 * M_PI / std::abs(p.imag()));
        }
    }
    const double tau = 1.0 / slowest_decay;
    if (dt <= 0.0) {
        dt = 1e-3 * tau;
    }

    // Impulse response h(t) = C e^{At} B sampled exactly by stepping with
    // e^{A dt} from x(0) = B.
    const StateSpace      ss  = to_state_space(g);
    const Eigen::MatrixXd ad  = (ss.a * dt).exp();
    Eigen::VectorXd       x   = ss.b;

    // The tail past time T is bounded by the recent envelope of |h| decaying
    // at the dominant rate; the window covers both the slowest decay and the
    // slowest oscillation so the envelope is not sampled in a lull.
    const double window_time = std::max(tau, slowest_oscillation);
    const long   window      = std::max<long>(8, std::lround(window_time / dt));
    const long   min_steps   = 5 * window;
    const long   max_steps   = std::max<long>(min_steps + 1, std::lround(2000.0 * tau / dt));

    double             integral   = 0.0;
    double             prev       = std::abs((ss.c * x).value());
    std::deque<double> recent{prev};
    double             window_max = prev;

    for (long k = 1; k <= max_steps; ++k) {
        x                = ad * x;
        const double mag = std::abs((ss.c * x).value());
        integral += 0.5 * (prev + mag) * dt;
        prev = mag;

        recent.push_back(mag);
        if (static_cast<long>(recent.size()) > window) {
            recent.pop_front();
        }
        if (k % window == 0 && k >= min_steps) {
            window_max = 0.0;
            for (double v : recent) {
                window_max = std::max(window_max, v);
            }
            const double tail_bound = 2.0 * window_max / slowest_decay;
            if (tail_bound < tail_tol) {
                return integral;
            }
        }
    }
    throw std::runtime_error("l1_system_norm: tail bound did not converge");
}

}  // namespace l1ilc
