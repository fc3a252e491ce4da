#pragma once

#include <Eigen/Dense>
#include <vector>

namespace l1ilc {

struct QpResult {
    Eigen::VectorXd x;
    Eigen::VectorXd multipliers;   // one per constraint row; >= 0 at upper, <= 0 at lower
    std::vector<int> active_lower;
    std::vector<int> active_upper;
    double           kkt_residual = 0.0;
    int              iterations   = 0;
    bool             converged    = false;
};

// Primal active-set solution of
//   min 1/2 x'Hx + g'x   subject to   lower <= A x <= upper,
// with H symmetric positive definite. Bounds may be +-infinity. The returned
// point satisfies stationarity, primal feasibility and complementarity to
// 1e-8 on success; on iteration exhaustion the best iterate is returned with
// converged = false. Starts from x = 0 when feasible, otherwise restores
// feasibility by cyclic projection onto the constraint slabs.
QpResult qp_solve(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                  const Eigen::MatrixXd& constraints, const Eigen::VectorXd& lower,
                  const Eigen::VectorXd& upper, int max_iterations = 0);

}  // namespace l1ilc
