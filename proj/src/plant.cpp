#include "l1ilc/plant.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace l1ilc {

AxisPlant::AxisPlant(const TransferFunction& surrogate, double dt) : surrogate_(surrogate) {
    if (!surrogate.is_strictly_proper()) {
        throw std::invalid_argument("AxisPlant: surrogate must be strictly proper");
    }
    if (!is_stable(surrogate)) {
        throw std::invalid_argument("AxisPlant: surrogate must be stable (PI-stabilizable inner loop)");
    }
    dss_ = discretize_zoh(to_state_space(surrogate), dt);
    x_   = Eigen::VectorXd::Zero(dss_.order());
}

std::pair<double, double> AxisPlant::step(double u, double d_ext) {
    if (!std::isfinite(u) || !std::isfinite(d_ext)) {
        throw std::invalid_argument("AxisPlant::step: non-finite input");
    }
    const double input = u + d_ext;
    const double y1_prev = y1_;
    x_  = dss_.a * x_ + dss_.b * input;
    y1_ = (dss_.c * x_).value();
    y2_ += 0.5 * dss_.dt * (y1_prev + y1_);
    if (!std::isfinite(y1_) || !std::isfinite(y2_) || std::abs(y1_) > 1e9) {
        throw std::runtime_error("AxisPlant::step: simulation diverged");
    }
    return {y1_, y2_};
}

void AxisPlant::reset() {
    x_.setZero();
    y1_ = 0.0;
    y2_ = 0.0;
}

PendulumDisturbance::PendulumDisturbance(double bob_mass, double length, double damping_ratio,
                                         double dt, double gravity)
    : bob_mass_(bob_mass),
      length_(length),
      damping_ratio_(damping_ratio),
      gravity_(gravity),
      dt_(dt) {
    if (!(length > 0.0) || bob_mass < 0.0 || !(dt > 0.0)) {
        throw std::invalid_argument("PendulumDisturbance: bad geometry or step");
    }
    const double wn = natural_frequency();
    Eigen::Matrix3d augmented = Eigen::Matrix3d::Zero();
    augmented(0, 1) = 1.0;
    augmented(1, 0) = -wn * wn;
    augmented(1, 1) = -2.0 * damping_ratio_ * wn;
    augmented(1, 2) = -1.0 / length_;  // vehicle acceleration input
    const Eigen::Matrix3d expm = (augmented * dt).exp();
    ad_ = expm.topLeftCorner<2, 2>();
    bd_ = expm.topRightCorner<2, 1>();
    state_.setZero();
}

double PendulumDisturbance::natural_frequency() const {
    return std::sqrt(gravity_ / length_);
}

double PendulumDisturbance::step(double vehicle_accel) {
    state_ = ad_ * state_ + bd_ * vehicle_accel;
    // m_b (l theta_dd + a) with theta_dd substituted from the ODE; the direct
    // acceleration terms cancel.
    const double wn = natural_frequency();
    return -bob_mass_ *
           (gravity_ * state_(0) + 2.0 * damping_ratio_ * wn * length_ * state_(1));
}

void PendulumDisturbance::reset() {
    state_.setZero();
}

void PendulumDisturbance::set_state(double theta, double theta_dot) {
    state_ << theta, theta_dot;
}

double PendulumDisturbance::energy() const {
    const double theta     = state_(0);
    const double theta_dot = state_(1);
    return 0.5 * bob_mass_ * length_ * length_ * theta_dot * theta_dot +
           0.5 * bob_mass_ * gravity_ * length_ * theta * theta;
}

double pd_step(const PdConfig& cfg, double r2, double y2, double y1) {
    if (!(cfg.kp > 0.0) || cfg.kd < 0.0) {
        throw std::invalid_argument("pd_step: Kp must be positive and Kd nonnegative");
    }
    if (!std::isfinite(r2) || !std::isfinite(y2) || !std::isfinite(y1)) {
        throw std::invalid_argument("pd_step: non-finite input");
    }
    return cfg.kp * (r2 - y2) - cfg.kd * y1;
}

Disturbance Disturbance::make(const std::string& preset, double dt, double vehicle_mass,
                              double surrogate_pole) {
    Disturbance d;
    d.name_           = preset;
    d.force_to_input_ = 1.0 / (vehicle_mass * surrogate_pole);
    if (preset == "none") {
        return d;
    }
    if (preset == "pendulum_50g_55cm") {
        const double bob    = 0.05;
        const double cable  = 0.55;
        const double offset = 0.17;
        d.pendulum_x_ = std::make_shared<PendulumDisturbance>(bob, cable, 0.02, dt);
        d.pendulum_y_ = std::make_shared<PendulumDisturbance>(bob, cable, 0.02, dt);
        d.weight_offset_ = -bob * 9.81 * d.force_to_input_;
        d.lateral_bias_  = -bob * 9.81 * (offset / cable) * d.force_to_input_;
        // The reaction force depends on the pendulum state only (the direct
        // acceleration terms cancel), so the instantaneous map from y1 has
        // zero slope; L0 bounds the force at a conservative 0.5 rad swing.
        d.lipschitz_l_  = 0.0;
        d.lipschitz_l0_ = (bob * 9.81 * 0.5 + bob * 9.81 * (1.0 + offset / cable)) *
                          d.force_to_input_;
        return d;
    }
    if (preset == "wind_const") {
        d.wind_         = 0.25;  // input-equivalent units
        d.lipschitz_l_  = 0.0;
        d.lipschitz_l0_ = d.wind_;
        return d;
    }
    if (preset == "motor_degraded") {
        d.degraded_gain_ = 0.25;  // thrust loss proportional to velocity
        d.lipschitz_l_   = d.degraded_gain_;
        d.lipschitz_l0_  = 0.0;
        return d;
    }
    throw std::invalid_argument("Disturbance: unknown preset '" + preset + "'");
}

double Disturbance::apply(int axis, double t, double y1, double vehicle_accel) {
    (void)t;
    if (name_ == "none") {
        return 0.0;
    }
    double d = 0.0;
    if (name_ == "pendulum_50g_55cm") {
        if (axis == 0) {
            d = pendulum_x_->step(vehicle_accel) * force_to_input_ + lateral_bias_;
        } else if (axis == 1) {
            d = pendulum_y_->step(vehicle_accel) * force_to_input_ + lateral_bias_;
        } else {
            d = weight_offset_;
        }
    } else if (name_ == "wind_const") {
        d = (axis == 2) ? 0.0 : wind_;
    } else if (name_ == "motor_degraded") {
        d = -degraded_gain_ * y1;
    }
    return d;
}

void Disturbance::reset() {
    if (pendulum_x_) {
        pendulum_x_->reset();
    }
    if (pendulum_y_) {
        pendulum_y_->reset();
    }
}

}  // namespace l1ilc
