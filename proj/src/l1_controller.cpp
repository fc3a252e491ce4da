#include "l1ilc/l1_controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace l1ilc {

double default_lyapunov_p(double m, double z) {
    if (!(m > 0.0) || !(z > 0.0)) {
        throw std::invalid_argument("default_lyapunov_p: m and z must be positive");
    }
    return z / (2.0 * m);
}

double projection(double sigma_hat, double signal, double sigma_max, double epsilon) {
    if (!(sigma_max > 0.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("projection: sigma_max and epsilon must be positive");
    }
    const double dist = std::abs(sigma_hat);
    if (dist <= sigma_max || signal * sigma_hat <= 0.0) {
        return signal;  // interior, or pointing inward
    }
    const double p = std::min(1.0, (dist - sigma_max) / (epsilon * sigma_max));
    return signal * (1.0 - p);
}

L1Controller::L1Controller(L1Config cfg) : cfg_(std::move(cfg)) {
    if (!(cfg_.m > 0.0)) {
        throw std::invalid_argument("L1Config: m must be positive");
    }
    if (!(cfg_.gamma > 0.0)) {
        throw std::invalid_argument("L1Config: gamma must be positive");
    }
    if (!(cfg_.sigma_max > 0.0) || !(cfg_.epsilon > 0.0)) {
        throw std::invalid_argument("L1Config: projection bounds must be positive");
    }
    if (!(cfg_.k_outer > 0.0)) {
        throw std::invalid_argument("L1Config: k_outer must be positive");
    }
    if (!(cfg_.dt > 0.0)) {
        throw std::invalid_argument("L1Config: dt must be positive");
    }
    if (cfg_.lyapunov_p <= 0.0) {
        cfg_.lyapunov_p = default_lyapunov_p(cfg_.m);
    }
    if (!cfg_.filter.is_strictly_proper()) {
        throw std::invalid_argument("L1Config: C(s) must be strictly proper");
    }
    if (std::abs(cfg_.filter.dc_gain() - 1.0) > 1e-9) {
        throw std::invalid_argument("L1Config: C(0) must equal 1");
    }
    // Explicit Euler on the adaptation/predictor pair goes unstable when
    // gamma*m*P*dt reaches 1 (worst-case projection slope of one).
    const double euler_margin = cfg_.gamma * cfg_.m * cfg_.lyapunov_p * cfg_.dt;
    if (euler_margin >= 1.0) {
        throw std::invalid_argument(
            "L1Config: gamma*m*P*dt >= 1; the explicit-Euler adaptation step is unstable "
            "(reduce gamma or dt)");
    }
    filter_ = discretize_zoh(to_state_space(cfg_.filter), cfg_.dt);
    reset();
}

void L1Controller::reset() {
    state_.y1_hat    = 0.0;
    state_.sigma_hat = 0.0;
    state_.u         = 0.0;
    state_.filter_state = Eigen::VectorXd::Zero(filter_.order());
    last_y_tilde_ = 0.0;
    last_r1_      = 0.0;
}

double L1Controller::step(double r2, double y1, double y2) {
    if (!std::isfinite(r2) || !std::isfinite(y1) || !std::isfinite(y2)) {
        throw std::invalid_argument("L1Controller::step: non-finite input");
    }
    const double dt = cfg_.dt;

    // Adaptation on the predictor mismatch.
    const double y_tilde = state_.y1_hat - y1;
    const double drive   = -cfg_.m * cfg_.lyapunov_p * y_tilde;
    double sigma = state_.sigma_hat +
                   dt * cfg_.gamma * projection(state_.sigma_hat, drive, cfg_.sigma_max, cfg_.epsilon);
    // The discrete step may overshoot the boundary layer; confine it.
    const double bound = cfg_.sigma_max * (1.0 + cfg_.epsilon);
    sigma              = std::clamp(sigma, -bound, bound);
    state_.sigma_hat   = sigma;

    // Outer position loop and filtered control law u = C (r1 - sigma).
    const double r1 = cfg_.k_outer * (r2 - y2);
    state_.filter_state = filter_.a * state_.filter_state + filter_.b * (r1 - sigma);
    const double u      = (filter_.order() > 0 ? (filter_.c * state_.filter_state).value() : 0.0);

    // Output predictor, explicit Euler.
    state_.y1_hat += dt * (-cfg_.m * state_.y1_hat + cfg_.m * (u + sigma));

    state_.u      = u;
    last_y_tilde_ = y_tilde;
    last_r1_      = r1;
    return u;
}

}  // namespace l1ilc
