#include "l1ilc/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "l1ilc/state_space.hpp"

namespace l1ilc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TransferFunction one_minus(const TransferFunction& c) {
    return tf_subtract(TransferFunction::constant(1.0), c);
}

double json_or_null(double v, nlohmann::json& field) {
    if (std::isnan(v)) {
        field = nullptr;
        return v;
    }
    field = v;
    return v;
}

}  // namespace

TransferFunction reference_model(double m) {
    if (!(m > 0.0)) {
        throw std::invalid_argument("reference_model: m must be positive");
    }
    return TransferFunction({m}, {1.0, m});
}

void validate(const DesignSet& d) {
    if (!(d.m > 0.0)) {
        throw std::invalid_argument("DesignSet: m must be positive");
    }
    if (!(d.k_outer > 0.0)) {
        throw std::invalid_argument("DesignSet: K must be positive");
    }
    if (d.lipschitz_l < 0.0 || d.lipschitz_l0 < 0.0) {
        throw std::invalid_argument("DesignSet: Lipschitz constants must be nonnegative");
    }
    if (!d.filter.is_strictly_proper()) {
        throw std::invalid_argument("DesignSet: C(s) must be strictly proper");
    }
    if (std::abs(d.filter.dc_gain() - 1.0) > 1e-9) {
        throw std::invalid_argument("DesignSet: C(0) must equal 1");
    }
    if (!d.plant.is_strictly_proper()) {
        throw std::invalid_argument("DesignSet: A(s) must be strictly proper");
    }
}

TransferFunction build_H(const TransferFunction& plant, const TransferFunction& model,
                         const TransferFunction& filter) {
    const TransferFunction denom =
        tf_parallel(tf_series(filter, plant), tf_series(one_minus(filter), model));
    if (denom.is_zero()) {
        throw std::invalid_argument("build_H: degenerate denominator C*A + (1-C)*M");
    }
    return tf_divide(tf_series(plant, model), denom);
}

TransferFunction build_H(const DesignSet& d) {
    return build_H(d.plant, reference_model(d.m), d.filter);
}

TransferFunction build_F(const TransferFunction& h, const TransferFunction& filter,
                         double k_outer) {
    const TransferFunction integrator({1.0, 0.0}, {1.0});  // the bare s term
    const TransferFunction loop =
        tf_parallel(integrator, tf_series(TransferFunction::constant(k_outer),
                                          tf_series(h, filter)));
    if (loop.is_zero()) {
        throw std::invalid_argument("build_F: degenerate denominator s + H*C*K");
    }
    return tf_divide(TransferFunction::constant(1.0), loop);
}

TransferFunction build_F(const DesignSet& d, const TransferFunction& h) {
    return build_F(h, d.filter, d.k_outer);
}

std::pair<TransferFunction, TransferFunction> build_H0_H1(const TransferFunction& plant,
                                                          const TransferFunction& model,
                                                          const TransferFunction& filter) {
    const TransferFunction denom =
        tf_parallel(tf_series(filter, plant), tf_series(one_minus(filter), model));
    if (denom.is_zero()) {
        throw std::invalid_argument("build_H0_H1: degenerate denominator C*A + (1-C)*M");
    }
    const TransferFunction h0 = tf_divide(plant, denom);
    const TransferFunction h1 = tf_divide(tf_series(tf_subtract(plant, model), filter), denom);
    return {h0, h1};
}

std::pair<TransferFunction, TransferFunction> build_H0_H1(const DesignSet& d) {
    return build_H0_H1(d.plant, reference_model(d.m), d.filter);
}

bool Certificate::satisfied() const {
    return h_stable && f_stable && std::isfinite(margin) && margin > 0.0;
}

Certificate certify(const DesignSet& d, double dt, double tail_tol) {
    validate(d);
    const TransferFunction model = reference_model(d.m);

    Certificate cert;
    cert.h = build_H(d.plant, model, d.filter);
    cert.f = build_F(cert.h, d.filter, d.k_outer);
    cert.g = tf_series(cert.h, tf_series(one_minus(d.filter), cert.f));
    std::tie(cert.h0, cert.h1) = build_H0_H1(d.plant, model, d.filter);

    cert.h_stable = is_stable(cert.h);
    cert.f_stable = is_stable(cert.f);

    cert.l1_norm_g         = kNaN;
    cert.l1_norm_hcf       = kNaN;
    cert.gamma1_per_gamma0 = kNaN;
    cert.rho_r_unit        = kNaN;
    cert.margin            = (d.lipschitz_l == 0.0) ? 1.0 : kNaN;

    if (!cert.h_stable || !cert.f_stable) {
        return cert;
    }

    // The raw compositions share factors between numerator and denominator;
    // cancel them explicitly before integrating impulse responses.
    const TransferFunction g_min = minimal_realization(cert.g);
    const TransferFunction hcf_min =
        minimal_realization(tf_series(cert.h, tf_series(d.filter, cert.f)));
    const TransferFunction fhc_over_m =
        minimal_realization(tf_divide(tf_series(cert.f, tf_series(cert.h, d.filter)), model));

    cert.l1_norm_g   = l1_system_norm(g_min, dt, tail_tol);
    cert.l1_norm_hcf = l1_system_norm(hcf_min, dt, tail_tol);
    cert.margin      = 1.0 - cert.l1_norm_g * d.lipschitz_l;

    if (cert.margin > 0.0) {
        cert.gamma1_per_gamma0 = l1_system_norm(fhc_over_m, dt, tail_tol) / cert.margin;
        cert.rho_r_unit =
            (d.k_outer * cert.l1_norm_hcf + cert.l1_norm_g * d.lipschitz_l0) / cert.margin;
    }
    return cert;
}

double rho_r(const Certificate& cert, double r2_sup, const DesignSet& d) {
    if (!cert.satisfied()) {
        throw std::domain_error("rho_r: certificate margin is not positive");
    }
    if (r2_sup < 0.0) {
        throw std::invalid_argument("rho_r: r2_sup must be nonnegative");
    }
    return (d.k_outer * cert.l1_norm_hcf * r2_sup + cert.l1_norm_g * d.lipschitz_l0) /
           cert.margin;
}

double gamma1(const Certificate& cert, const DesignSet& d, double gamma0) {
    if (!cert.satisfied()) {
        throw std::domain_error("gamma1: certificate margin is not positive");
    }
    if (gamma0 < 0.0) {
        throw std::invalid_argument("gamma1: gamma0 must be nonnegative");
    }
    (void)d;
    return cert.gamma1_per_gamma0 * gamma0;
}

SampledSignal simulate_reference_system(const DesignSet& d, const SampledSignal& r2,
                                        const std::function<double(double, double)>& f) {
    validate(d);
    if (r2.dt * d.lipschitz_l > 0.01) {
        throw std::invalid_argument(
            "simulate_reference_system: dt*L > 0.01; refine the step for this Lipschitz bound");
    }
    const TransferFunction model = reference_model(d.m);
    const TransferFunction h     = build_H(d.plant, model, d.filter);
    const TransferFunction fwd   = build_F(h, d.filter, d.k_outer);

    // Two strictly proper linear paths: K*F*H*C from r2 and F*H*(1-C) from d.
    const TransferFunction path_r = minimal_realization(
        tf_series(TransferFunction::constant(d.k_outer), tf_series(fwd, tf_series(h, d.filter))));
    const TransferFunction path_d =
        minimal_realization(tf_series(fwd, tf_series(h, one_minus(d.filter))));
    if (!is_stable(path_r) || !is_stable(path_d)) {
        throw std::domain_error("simulate_reference_system: unstable reference system");
    }

    const DiscreteStateSpace dr = discretize_zoh(to_state_space(path_r), r2.dt);
    const DiscreteStateSpace dd = discretize_zoh(to_state_space(path_d), r2.dt);

    Eigen::VectorXd xr = Eigen::VectorXd::Zero(dr.order());
    Eigen::VectorXd xd = Eigen::VectorXd::Zero(dd.order());

    std::vector<double> y(r2.size(), 0.0);
    for (std::size_t k = 0; k < r2.size(); ++k) {
        const double t  = r2.time_of(k);
        const double yk = (dr.c * xr).value() + (dd.c * xd).value();
        y[k]            = yk;
        // One-sample-delayed closure: the disturbance computed from y(k)
        // first influences the output at k+1.
        const double dk = f(t, yk);
        if (!std::isfinite(dk)) {
            throw std::runtime_error("simulate_reference_system: disturbance map returned non-finite value");
        }
        xr = dr.a * xr + dr.b * r2.values[k];
        xd = dd.a * xd + dd.b * dk;
    }
    return SampledSignal(std::move(y), r2.dt);
}

std::string certificate_to_json(const Certificate& cert, const DesignSet& d) {
    nlohmann::json j;
    j["plant"]    = d.plant.to_string();
    j["model"]    = reference_model(d.m).to_string();
    j["filter"]   = d.filter.to_string();
    j["k_outer"]  = d.k_outer;
    j["lipschitz"] = {{"l", d.lipschitz_l}, {"l0", d.lipschitz_l0}};

    j["h"]  = cert.h.to_string();
    j["f"]  = cert.f.to_string();
    j["g"]  = cert.g.to_string();
    j["h0"] = cert.h0.to_string();
    j["h1"] = cert.h1.to_string();

    json_or_null(cert.l1_norm_g, j["l1_norm_g"]);
    json_or_null(cert.l1_norm_hcf, j["l1_norm_hcf"]);
    json_or_null(cert.margin, j["margin"]);
    json_or_null(cert.rho_r_unit, j["rho_r_unit_r2"]);
    json_or_null(cert.gamma1_per_gamma0, j["gamma1_per_gamma0"]);

    j["h_stable"]  = cert.h_stable;
    j["f_stable"]  = cert.f_stable;
    j["satisfied"] = cert.satisfied();
    return j.dump(2);
}

}  // namespace l1ilc
