#include "l1ilc/ilc.hpp"

#include <cmath>
#include <stdexcept>

namespace l1ilc {

LiftedModel build_lifted(const DiscreteStateSpace& nominal, int samples) {
    if (samples < 2) {
        throw std::invalid_argument("build_lifted: at least two samples required");
    }
    const int n = nominal.order();

    // Markov parameters h(0) = D, h(j) = C A^{j-1} B; F(i,k) = h(i-k).
    std::vector<double> markov(static_cast<std::size_t>(samples), 0.0);
    markov[0] = nominal.d;
    Eigen::VectorXd v = nominal.b;
    for (int j = 1; j < samples; ++j) {
        markov[static_cast<std::size_t>(j)] = (n > 0) ? (nominal.c * v).value() : 0.0;
        if (n > 0) {
            v = nominal.a * v;
        }
    }

    LiftedModel lifted;
    lifted.samples = samples;
    lifted.dt      = nominal.dt;
    lifted.f       = Eigen::MatrixXd::Zero(samples, samples);
    for (int i = 0; i < samples; ++i) {
        for (int k = 0; k <= i; ++k) {
            lifted.f(i, k) = markov[static_cast<std::size_t>(i - k)];
        }
    }
    return lifted;
}

DisturbanceEstimate initial_estimate(int samples, double p0) {
    if (samples < 1 || p0 < 0.0) {
        throw std::invalid_argument("initial_estimate: bad arguments");
    }
    DisturbanceEstimate est;
    est.d_hat      = Eigen::VectorXd::Zero(samples);
    est.covariance = p0 * Eigen::MatrixXd::Identity(samples, samples);
    est.iteration  = 0;
    return est;
}

IlcWeights IlcWeights::scalar(int samples, double q, double s, double r, double a_max,
                              double process_noise, double measurement_noise) {
    IlcWeights w;
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(samples, samples);
    w.q     = q * eye;
    w.s     = s * eye;
    w.r     = r * Eigen::MatrixXd::Identity(samples - 2, samples - 2);
    w.a_max = a_max;
    w.e     = process_noise * eye;
    w.v     = measurement_noise * eye;
    return w;
}

void validate(const IlcWeights& w, int samples) {
    if (w.q.rows() != samples || w.s.rows() != samples || w.r.rows() != samples - 2) {
        throw std::invalid_argument("IlcWeights: dimension mismatch");
    }
    if (!(w.a_max > 0.0)) {
        throw std::invalid_argument("IlcWeights: a_max must be positive");
    }
    auto check_spd = [](const Eigen::MatrixXd& mat, const char* name) {
        Eigen::LLT<Eigen::MatrixXd> llt(mat);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument(std::string("IlcWeights: ") + name +
                                        " must be positive definite");
        }
    };
    check_spd(w.q, "Q");
    check_spd(w.s, "S");
    check_spd(w.r, "R");
}

DisturbanceEstimate kalman_update(const DisturbanceEstimate& est, const LiftedModel& lifted,
                                  const Eigen::VectorXd& r_bar, const Eigen::VectorXd& y_measured,
                                  const IlcWeights& w) {
    const int n = lifted.samples;
    if (est.d_hat.size() != n || r_bar.size() != n || y_measured.size() != n ||
        w.e.rows() != n || w.v.rows() != n) {
        throw std::invalid_argument("kalman_update: dimension mismatch");
    }

    // Identity iteration dynamics for d: the prediction only inflates the
    // covariance by the process noise.
    const Eigen::MatrixXd p_prior = est.covariance + w.e;
    const Eigen::MatrixXd innovation_cov = p_prior + w.v;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(innovation_cov);
    if (!lu.isInvertible()) {
        throw std::runtime_error("kalman_update: singular innovation covariance");
    }
    const Eigen::MatrixXd gain = p_prior * lu.inverse();

    DisturbanceEstimate out;
    const Eigen::VectorXd residual = y_measured - lifted.f * r_bar - est.d_hat;
    out.d_hat                      = est.d_hat + gain * residual;
    Eigen::MatrixXd p_post =
        (Eigen::MatrixXd::Identity(n, n) - gain) * p_prior;
    out.covariance = 0.5 * (p_post + p_post.transpose());
    out.iteration  = est.iteration + 1;
    return out;
}

Eigen::MatrixXd second_difference_operator(int n, double dt) {
    if (n < 3) {
        throw std::invalid_argument("second_difference_operator: n must be at least 3");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("second_difference_operator: dt must be positive");
    }
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n - 2, n);
    const double    w  = 1.0 / (dt * dt);
    for (int i = 0; i < n - 2; ++i) {
        d2(i, i)     = w;
        d2(i, i + 1) = -2.0 * w;
        d2(i, i + 2) = w;
    }
    return d2;
}

IlcUpdateResult ilc_update(const LiftedModel& lifted, const DisturbanceEstimate& est,
                           const IlcWeights& w) {
    const int n = lifted.samples;
    validate(w, n);
    if (est.d_hat.size() != n) {
        throw std::invalid_argument("ilc_update: estimate dimension mismatch");
    }

    // min r' (F'QF + S + D2'RD2) r + 2 d'QF r  subject to |D2 r| <= a_max.
    const Eigen::MatrixXd d2 = second_difference_operator(n, lifted.dt);
    Eigen::MatrixXd quad =
        lifted.f.transpose() * w.q * lifted.f + w.s + d2.transpose() * w.r * d2;
    quad                         = 0.5 * (quad + quad.transpose());
    const Eigen::MatrixXd hessian = 2.0 * quad;
    const Eigen::VectorXd linear  = 2.0 * lifted.f.transpose() * (w.q * est.d_hat);

    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(n - 2, w.a_max);
    const Eigen::VectorXd lower = -upper;

    IlcUpdateResult out;
    out.qp = qp_solve(hessian, linear, d2, lower, upper);
    if (!out.qp.converged) {
        throw std::runtime_error("ilc_update: QP did not converge after " +
                                 std::to_string(out.qp.iterations) + " iterations");
    }
    out.r_bar = out.qp.x;
    return out;
}

}  // namespace l1ilc
