#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "l1ilc/state_space.hpp"
#include "l1ilc/transfer_function.hpp"

namespace l1ilc {

// Translational dynamics of one inertial axis: the inner velocity loop is
// abstracted by a strictly proper surrogate A(s); position is the trapezoidal
// integral of velocity.
class AxisPlant {
  public:
    AxisPlant(const TransferFunction& surrogate, double dt);

    // Advances one step with input u and input-equivalent disturbance d_ext.
    // Returns (velocity, position). Throws if the state diverges.
    std::pair<double, double> step(double u, double d_ext);

    void reset();

    double velocity() const { return y1_; }
    double position() const { return y2_; }
    double dt() const { return dss_.dt; }
    const TransferFunction& surrogate() const { return surrogate_; }

  private:
    TransferFunction   surrogate_;
    DiscreteStateSpace dss_;
    Eigen::VectorXd    x_;
    double             y1_ = 0.0;
    double             y2_ = 0.0;
};

// Suspended-mass disturbance, linearized about the hanging equilibrium:
//   theta_dd = -(g/l) theta - 2 zeta wn theta_d - a_vehicle / l.
// The state advances by exact ZOH discretization, so the damped energy is
// nonincreasing at the sample instants. The horizontal reaction force
// m_b (l theta_dd + a_vehicle) reduces to -m_b (g theta + 2 zeta wn l theta_d).
class PendulumDisturbance {
  public:
    PendulumDisturbance(double bob_mass, double length, double damping_ratio, double dt,
                        double gravity = 9.81);

    // Advances with the current vehicle acceleration; returns the horizontal
    // reaction force in newtons.
    double step(double vehicle_accel);

    void   reset();
    void   set_state(double theta, double theta_dot);
    double natural_frequency() const;  // sqrt(g/l)
    double theta() const { return state_(0); }
    double theta_dot() const { return state_(1); }
    double energy() const;             // small-angle mechanical energy

    double bob_mass() const { return bob_mass_; }
    double length() const { return length_; }
    double gravity() const { return gravity_; }

  private:
    double          bob_mass_;
    double          length_;
    double          damping_ratio_;
    double          gravity_;
    double          dt_;
    Eigen::Matrix2d ad_;
    Eigen::Vector2d bd_;
    Eigen::Vector2d state_;  // (theta, theta_dot)
};

// Non-adaptive proportional-derivative baseline, derivative on the measured
// velocity: u = Kp (r2 - y2) - Kd y1.
struct PdConfig {
    double kp = 4.0 / 3.0;
    double kd = 0.2;
};

double pd_step(const PdConfig& cfg, double r2, double y2, double y1);

// Named disturbance presets applied per axis in input-equivalent units.
// Forces map to input units through 1/(vehicle_mass * surrogate_pole), the
// gain with which an input offset reproduces the same acceleration.
//   none             - zero
//   pendulum_50g_55cm - 50 g bob, 55 cm cable on x/y plus the constant
//                       weight offset on z and a lateral bias from the 17 cm
//                       attachment offset
//   wind_const       - constant horizontal push
//   motor_degraded   - thrust loss proportional to velocity
class Disturbance {
  public:
    Disturbance() = default;  // the "none" preset

    static Disturbance make(const std::string& preset, double dt, double vehicle_mass = 0.42,
                            double surrogate_pole = 3.0);

    // Input-equivalent disturbance for the given axis (0=x, 1=y, 2=z) at the
    // current state of the internal dynamics. vehicle_accel drives the
    // pendulum; y1 is the axis velocity.
    double apply(int axis, double t, double y1, double vehicle_accel);

    void reset();

    const std::string& name() const { return name_; }
    bool  is_none() const { return name_ == "none"; }

    // Certified Lipschitz constants of the preset as a map (t, y1) -> d.
    double lipschitz_l() const { return lipschitz_l_; }
    double lipschitz_l0() const { return lipschitz_l0_; }

  private:
    std::string name_ = "none";
    double      force_to_input_ = 0.0;
    double      wind_           = 0.0;
    double      degraded_gain_  = 0.0;
    double      weight_offset_  = 0.0;  // z axis, input units
    double      lateral_bias_   = 0.0;  // x/y axes, input units
    double      lipschitz_l_    = 0.0;
    double      lipschitz_l0_   = 0.0;
    std::shared_ptr<PendulumDisturbance> pendulum_x_;
    std::shared_ptr<PendulumDisturbance> pendulum_y_;
};

}  // namespace l1ilc
