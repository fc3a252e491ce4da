#pragma once

#include <Eigen/Dense>

#include "l1ilc/state_space.hpp"
#include "l1ilc/transfer_function.hpp"

namespace l1ilc {

// Configuration of one axis of the adaptive output-feedback controller.
struct L1Config {
    double           m          = 3.0;    // reference pole, M(s) = m/(s+m)
    double           gamma      = 1000.0; // adaptation rate
    double           sigma_max  = 10.0;   // projection bound
    double           epsilon    = 0.1;    // projection boundary-layer width
    TransferFunction filter;              // C(s), strictly proper, C(0) = 1
    double           k_outer    = 2.0;    // outer proportional gain
    double           lyapunov_p = 0.0;    // P > 0; <= 0 selects 1/(2m)
    double           dt         = 1e-3;   // controller step
};

// Scalar Lyapunov solution P = Z/(2m) of the stable first-order equation.
double default_lyapunov_p(double m, double z = 1.0);

// Projected adaptation derivative. Returns `signal` unchanged while the
// estimate is inside [-sigma_max, sigma_max] or the signal points inward;
// outward components are scaled by 1 - p(sigma) with
// p(sigma) = (|sigma| - sigma_max) / (epsilon*sigma_max), reaching zero at
// |sigma| = sigma_max*(1+epsilon).
double projection(double sigma_hat, double signal, double sigma_max, double epsilon);

struct L1ControllerState {
    double          y1_hat    = 0.0;  // output predictor state
    double          sigma_hat = 0.0;  // adaptive estimate
    Eigen::VectorXd filter_state;     // low-pass filter internal state
    double          u = 0.0;          // last control output
};

// Single-owner discrete-time controller for one axis. One step applies, in
// order: adaptation on the predictor mismatch, the outer position loop, the
// low-pass control filter, and the predictor update. The predictor and
// adaptation ODEs advance by explicit Euler at dt; the filter is realized in
// controllable canonical ZOH form. Construction rejects gamma*m*P*dt >= 1,
// where the explicit-Euler adaptation recursion goes unstable.
class L1Controller {
  public:
    explicit L1Controller(L1Config cfg);

    // Consumes the reference position r2 and measured velocity/position and
    // returns the control input for the coming interval.
    double step(double r2, double y1, double y2);

    void reset();

    const L1Config&          config() const { return cfg_; }
    const L1ControllerState& state() const { return state_; }

    // Telemetry from the most recent step.
    double last_y_tilde() const { return last_y_tilde_; }
    double last_r1() const { return last_r1_; }

  private:
    L1Config           cfg_;
    DiscreteStateSpace filter_;  // ZOH discretization of C(s)
    L1ControllerState  state_;
    double             last_y_tilde_ = 0.0;
    double             last_r1_      = 0.0;
};

}  // namespace l1ilc
