#pragma once

#include "l1ilc/transfer_function.hpp"

namespace l1ilc {

// L1 system norm of a stable, strictly proper g: the integral of the absolute
// impulse response, equal to the induced Linf -> Linf gain. The impulse
// response is sampled exactly (matrix exponential stepping) and integrated
// with the trapezoid rule until the dominant-pole tail envelope falls below
// tail_tol. Pass dt <= 0 to use the default of 1e-3 times the slowest time
// constant. Throws for unstable or non-strictly-proper systems.
double l1_system_norm(const TransferFunction& g, double dt = 0.0, double tail_tol = 1e-8);

}  // namespace l1ilc
