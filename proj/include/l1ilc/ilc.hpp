#pragma once

#include <Eigen/Dense>

#include "l1ilc/qp.hpp"
#include "l1ilc/state_space.hpp"

namespace l1ilc {

// One task execution as a single linear map: y_bar = F * r_bar + d, where
// F(i,k) is the Markov parameter taking the input deviation at sample k to
// the output deviation at sample i (zero initial state). Causal nominal
// models give a lower-triangular F.
struct LiftedModel {
    Eigen::MatrixXd f;
    int             samples = 0;
    double          dt      = 0.0;
};

LiftedModel build_lifted(const DiscreteStateSpace& nominal, int samples);

// Iteration-domain estimate of the repetitive disturbance d.
struct DisturbanceEstimate {
    Eigen::VectorXd d_hat;
    Eigen::MatrixXd covariance;  // symmetric PSD
    int             iteration = 0;
};

DisturbanceEstimate initial_estimate(int samples, double p0 = 1.0);

// Cost weights, acceleration limit and Kalman noise covariances for the
// input-update step. Typically scalar multiples of identity.
struct IlcWeights {
    Eigen::MatrixXd q;  // tracking error weight
    Eigen::MatrixXd s;  // input effort weight
    Eigen::MatrixXd r;  // input second-derivative weight
    double          a_max = 5.0;
    Eigen::MatrixXd e;  // process noise covariance
    Eigen::MatrixXd v;  // measurement noise covariance

    static IlcWeights scalar(int samples, double q, double s, double r, double a_max,
                             double process_noise, double measurement_noise);
};

void validate(const IlcWeights& w, int samples);

// Predict/update with identity iteration dynamics for d:
//   P- = P + E,  G = P-(P- + V)^-1,
//   d_hat <- d_hat + G (y_measured - F r_bar - d_hat),  P <- (I-G) P-.
// Symmetry of the posterior covariance is re-enforced. Throws when the
// innovation covariance is singular.
DisturbanceEstimate kalman_update(const DisturbanceEstimate& est, const LiftedModel& lifted,
                                  const Eigen::VectorXd& r_bar, const Eigen::VectorXd& y_measured,
                                  const IlcWeights& w);

// (n-2) x n matrix with rows (1, -2, 1)/dt^2; exact second differences for
// quadatic sequences. Requires n >= 3.
Eigen::MatrixXd second_difference_operator(int n, double dt);

struct IlcUpdateResult {
    Eigen::VectorXd r_bar;
    QpResult        qp;
};

// Next reference deviation: the minimizer of
//   y'Qy + r'Sr + (D2 r)'R(D2 r),   y = F r + d_hat,
// subject to |(D2 r)_i| <= a_max. r = 0 is always feasible.
IlcUpdateResult ilc_update(const LiftedModel& lifted, const DisturbanceEstimate& est,
                           const IlcWeights& w);

}  // namespace l1ilc
