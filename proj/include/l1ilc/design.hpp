#pragma once

#include <functional>
#include <utility>

#include "l1ilc/norms.hpp"
#include "l1ilc/signal.hpp"
#include "l1ilc/transfer_function.hpp"

namespace l1ilc {

// First-order reference model m/(s+m).
TransferFunction reference_model(double m);

// One candidate controller design for a single axis: the surrogate plant
// A(s), the reference pole m, the low-pass filter C(s) (strictly proper,
// C(0) = 1), the outer proportional gain K, and the Lipschitz constants of
// the disturbance map the design must tolerate.
struct DesignSet {
    TransferFunction plant;   // A(s)
    double           m = 1.0;
    TransferFunction filter;  // C(s)
    double           k_outer     = 1.0;
    double           lipschitz_l  = 0.0;
    double           lipschitz_l0 = 0.0;
};

// Throws std::invalid_argument when a DesignSet violates its constraints.
void validate(const DesignSet& d);

// H = A*M / (C*A + (1-C)*M). Throws on a degenerate denominator.
TransferFunction build_H(const TransferFunction& plant, const TransferFunction& model,
                         const TransferFunction& filter);
TransferFunction build_H(const DesignSet& d);

// F = 1 / (s + H*C*K) assembled as a single rational function.
TransferFunction build_F(const TransferFunction& h, const TransferFunction& filter, double k_outer);
TransferFunction build_F(const DesignSet& d, const TransferFunction& h);

// H0 = A / (C*A + (1-C)*M) and H1 = (A-M)*C / (C*A + (1-C)*M). They satisfy
// M*H0 = H and M*(C + H1*(1-C)) = H*C.
std::pair<TransferFunction, TransferFunction> build_H0_H1(const TransferFunction& plant,
                                                          const TransferFunction& model,
                                                          const TransferFunction& filter);
std::pair<TransferFunction, TransferFunction> build_H0_H1(const DesignSet& d);

// Everything needed to decide whether a design meets the small-gain condition
// ||G|| * L < 1, plus the norms behind the closed-loop performance bounds.
// Norms that require an unstable impulse response are reported as NaN.
struct Certificate {
    TransferFunction h, f, g, h0, h1;

    double l1_norm_g        = 0.0;  // ||G||, G = H*(1-C)*F
    double l1_norm_hcf      = 0.0;  // ||H*C*F||
    double margin           = 0.0;  // 1 - ||G||*L
    double rho_r_unit       = 0.0;  // rho_r evaluated at sup|r2| = 1
    double gamma1_per_gamma0 = 0.0; // ||F*H*C/M|| / (1 - ||G||*L)

    bool h_stable = false;
    bool f_stable = false;

    bool satisfied() const;
};

// Builds H, F, G, H0, H1 for the design, evaluates the L1 norms at the given
// integration step and tail tolerance, and fills the margin and bound
// coefficients. Instability is reported through the flags rather than thrown.
Certificate certify(const DesignSet& d, double dt = 0.0, double tail_tol = 1e-8);

// Uniform output bound of the closed-loop reference system,
//   rho_r = (K*||HCF||*sup|r2| + ||G||*L0) / (1 - ||G||*L).
// Throws when the certificate margin is not positive.
double rho_r(const Certificate& cert, double r2_sup, const DesignSet& d);

// gamma1 = ||F*H*C/M|| / (1 - ||G||*L) * gamma0. Throws when the margin is
// not positive or gamma0 < 0.
double gamma1(const Certificate& cert, const DesignSet& d, double gamma0);

// Time-domain simulation of the closed-loop reference system
//   y(s) = F*H*( C*K*r2(s) + (1-C)*d(s) ),   d(t) = f(t, y(t)),
// with the nonlinearity closed through the strictly proper linear paths; f is
// evaluated on the output computed from the current states, so its effect
// reaches the output one sample later. Requires dt * L <= 0.01 and a stable
// design.
SampledSignal simulate_reference_system(const DesignSet& d, const SampledSignal& r2,
                                        const std::function<double(double, double)>& f);

// JSON report (norms, margins, flags) consumed by the CLI certify subcommand.
std::string certificate_to_json(const Certificate& cert, const DesignSet& d);

}  // namespace l1ilc
