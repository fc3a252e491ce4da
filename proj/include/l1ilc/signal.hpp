#pragma once

#include <string>
#include <vector>

namespace l1ilc {

// Uniformly sampled scalar time series. Sample j of the lifted trajectory
// convention is 1-based and taken at t = (j-1)*dt; internally storage is a
// plain 0-based vector.
struct SampledSignal {
    std::vector<double> values;
    double              dt = 0.0;

    SampledSignal() = default;
    SampledSignal(std::vector<double> vals, double step);

    std::size_t size() const { return values.size(); }
    double      time_of(std::size_t k) const { return static_cast<double>(k) * dt; }

    static SampledSignal constant(double value, std::size_t n, double dt);
};

// Peak absolute value of the signal (its L-infinity norm).
double linf_norm(const SampledSignal& sig);

// Two-column CSV body, "time,value" per sample, header included.
std::string to_csv(const SampledSignal& sig);

}  // namespace l1ilc
