#include "l1ilc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace l1ilc {

namespace {

constexpr double kFeasTol = 1e-10;
constexpr double kDirTol  = 1e-12;

struct WorkingConstraint {
    int row;
    int side;  // -1 lower bound, +1 upper bound
};

// Cyclic projection onto the slabs l_i <= a_i x <= u_i. Converges to a point
// of the (convex) intersection when one exists.
Eigen::VectorXd restore_feasibility(const Eigen::MatrixXd& a, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, Eigen::VectorXd x) {
    const int m = static_cast<int>(a.rows());
    for (int pass = 0; pass < 200 * std::max(1, m); ++pass) {
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            const double v  = a.row(i).dot(x);
            const double nn = a.row(i).squaredNorm();
            if (nn <= 0.0) {
                continue;
            }
            if (v > upper(i)) {
                x -= a.row(i).transpose() * ((v - upper(i)) / nn);
                worst = std::max(worst, v - upper(i));
            } else if (v < lower(i)) {
                x += a.row(i).transpose() * ((lower(i) - v) / nn);
                worst = std::max(worst, lower(i) - v);
            }
        }
        if (worst <= kFeasTol) {
            return x;
        }
    }
    throw std::runtime_error("qp_solve: could not find a feasible starting point");
}

}  // namespace

QpResult qp_solve(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                  const Eigen::MatrixXd& constraints, const Eigen::VectorXd& lower,
                  const Eigen::VectorXd& upper, int max_iterations) {
    const int n = static_cast<int>(hessian.rows());
    const int m = static_cast<int>(constraints.rows());
    if (hessian.cols() != n || linear.size() != n) {
        throw std::invalid_argument("qp_solve: Hessian/linear dimension mismatch");
    }
    if (m > 0 && constraints.cols() != n) {
        throw std::invalid_argument("qp_solve: constraint matrix width mismatch");
    }
    if (lower.size() != m || upper.size() != m) {
        throw std::invalid_argument("qp_solve: bound dimension mismatch");
    }
    for (int i = 0; i < m; ++i) {
        if (lower(i) > upper(i)) {
            throw std::invalid_argument("qp_solve: lower bound exceeds upper bound");
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("qp_solve: Hessian must be symmetric positive definite");
    }
    if (max_iterations <= 0) {
        max_iterations = 50 + 10 * (n + m);
    }

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (m > 0) {
        bool feasible = true;
        for (int i = 0; i < m; ++i) {
            if (lower(i) > kFeasTol || upper(i) < -kFeasTol) {
                feasible = false;
                break;
            }
        }
        if (!feasible) {
            x = restore_feasibility(constraints, lower, upper, x);
        }
    }

    std::vector<WorkingConstraint> working;
    const Eigen::VectorXd          h_inv_g = llt.solve(linear);

    QpResult result;
    result.multipliers = Eigen::VectorXd::Zero(m);

    int it = 0;
    for (; it < max_iterations; ++it) {
        const int k = static_cast<int>(working.size());

        Eigen::VectorXd mu(k);
        Eigen::VectorXd x_eq;
        if (k == 0) {
            x_eq = -h_inv_g;
        } else {
            Eigen::MatrixXd aw(k, n);
            Eigen::VectorXd bw(k);
            for (int i = 0; i < k; ++i) {
                aw.row(i) = constraints.row(working[static_cast<std::size_t>(i)].row);
                bw(i)     = working[static_cast<std::size_t>(i)].side > 0
                                ? upper(working[static_cast<std::size_t>(i)].row)
                                : lower(working[static_cast<std::size_t>(i)].row);
            }
            const Eigen::MatrixXd h_inv_awt = llt.solve(aw.transpose());
            const Eigen::MatrixXd schur     = aw * h_inv_awt;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(schur);
            if (!lu.isInvertible()) {
                // Dependent row slipped into the working set; discard it.
                working.pop_back();
                continue;
            }
            mu   = lu.solve(-(bw + aw * h_inv_g));
            x_eq = -llt.solve(linear + aw.transpose() * mu);
        }

        const Eigen::VectorXd p = x_eq - x;
        const double step_size = p.lpNorm<Eigen::Infinity>();
        if (step_size <= 1e-12 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
            // Equality-constrained optimum reached; verify multiplier signs.
            int    drop       = -1;
            double worst_sign = 1e-12;
            for (int i = 0; i < k; ++i) {
                const double signed_violation =
                    working[static_cast<std::size_t>(i)].side > 0 ? -mu(i) : mu(i);
                if (signed_violation > worst_sign) {
                    worst_sign = signed_violation;
                    drop       = i;
                }
            }
            if (drop < 0) {
                x = x_eq;
                for (int i = 0; i < k; ++i) {
                    result.multipliers(working[static_cast<std::size_t>(i)].row) = mu(i);
                }
                result.converged = true;
                ++it;
                break;
            }
            working.erase(working.begin() + drop);
            continue;
        }

        // Longest feasible step toward the equality-constrained minimizer.
        double alpha    = 1.0;
        int    block    = -1;
        int    blockdir = 0;
        for (int i = 0; i < m; ++i) {
            bool in_working = false;
            for (const auto& w : working) {
                if (w.row == i) {
                    in_working = true;
                    break;
                }
            }
            if (in_working) {
                continue;
            }
            const double ai_p = constraints.row(i).dot(p);
            const double ai_x = constraints.row(i).dot(x);
            if (ai_p > kDirTol && std::isfinite(upper(i))) {
                const double a = (upper(i) - ai_x) / ai_p;
                if (a < alpha) {
                    alpha    = a;
                    block    = i;
                    blockdir = +1;
                }
            } else if (ai_p < -kDirTol && std::isfinite(lower(i))) {
                const double a = (lower(i) - ai_x) / ai_p;
                if (a < alpha) {
                    alpha    = a;
                    block    = i;
                    blockdir = -1;
                }
            }
        }
        alpha = std::max(alpha, 0.0);
        x += alpha * p;
        if (block >= 0) {
            working.push_back({block, blockdir});
        }
    }

    result.x          = x;
    result.iterations = it;

    // KKT residuals of the returned point.
    Eigen::VectorXd stationarity = hessian * x + linear;
    if (m > 0) {
        stationarity += constraints.transpose() * result.multipliers;
    }
    double primal = 0.0;
    double compl_resid = 0.0;
    for (int i = 0; i < m; ++i) {
        const double v = constraints.row(i).dot(x);
        if (std::isfinite(upper(i))) {
            primal = std::max(primal, v - upper(i));
        }
        if (std::isfinite(lower(i))) {
            primal = std::max(primal, lower(i) - v);
        }
        if (result.multipliers(i) != 0.0) {
            const double gap = result.multipliers(i) > 0.0 ? std::abs(v - upper(i))
                                                           : std::abs(v - lower(i));
            compl_resid = std::max(compl_resid, std::abs(result.multipliers(i)) * gap);
        }
        const double v_tol = kFeasTol * std::max(1.0, std::abs(v));
        if (std::isfinite(upper(i)) && std::abs(v - upper(i)) <= v_tol &&
            result.multipliers(i) > 0.0) {
            result.active_upper.push_back(i);
        }
        if (std::isfinite(lower(i)) && std::abs(v - lower(i)) <= v_tol &&
            result.multipliers(i) < 0.0) {
            result.active_lower.push_back(i);
        }
    }
    result.kkt_residual =
        std::max({stationarity.lpNorm<Eigen::Infinity>(), primal, compl_resid});
    return result;
}

}  // namespace l1ilc
