#pragma once

#include <Eigen/Dense>

#include "l1ilc/signal.hpp"
#include "l1ilc/transfer_function.hpp"

namespace l1ilc {

// SISO continuous-time realization dx = A x + B u, y = C x + D u.
struct StateSpace {
    Eigen::MatrixXd    a;
    Eigen::VectorXd    b;
    Eigen::RowVectorXd c;
    double             d = 0.0;

    int order() const { return static_cast<int>(a.rows()); }
};

// SISO discrete-time realization with fixed step dt.
struct DiscreteStateSpace {
    Eigen::MatrixXd    a;
    Eigen::VectorXd    b;
    Eigen::RowVectorXd c;
    double             d  = 0.0;
    double             dt = 0.0;

    int order() const { return static_cast<int>(a.rows()); }
};

// Controllable canonical realization of a proper transfer function. An
// equal-degree numerator contributes the direct feedthrough via one step of
// polynomial division; strictly proper inputs give D = 0. Throws on improper
// input.
StateSpace to_state_space(const TransferFunction& g);

// Recovers num/den coefficients from a realization (characteristic
// polynomials via the Faddeev-LeVerrier recursion).
TransferFunction to_transfer_function(const StateSpace& ss);

// Exact zero-order-hold discretization through the matrix exponential of the
// augmented matrix [[A, B], [0, 0]] * dt. Throws for dt <= 0.
DiscreteStateSpace discretize_zoh(const StateSpace& ss, double dt);

// y(k) = C x(k) + D u(k), x(k+1) = A x(k) + B u(k). Output length equals the
// input length. Throws on dt or dimension mismatch.
SampledSignal simulate(const DiscreteStateSpace& dss, const SampledSignal& input,
                       const Eigen::VectorXd& x0);

}  // namespace l1ilc
