#include "l1ilc/signal.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace l1ilc {

SampledSignal::SampledSignal(std::vector<double> vals, double step)
    : values(std::move(vals)), dt(step) {
    if (values.empty()) {
        throw std::invalid_argument("SampledSignal: at least one sample required");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("SampledSignal: dt must be positive");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("SampledSignal: values must be finite");
        }
    }
}

SampledSignal SampledSignal::constant(double value, std::size_t n, double dt) {
    return SampledSignal(std::vector<double>(n, value), dt);
}

double linf_norm(const SampledSignal& sig) {
    if (sig.values.empty()) {
        throw std::invalid_argument("linf_norm: empty signal");
    }
    double peak = 0.0;
    for (double v : sig.values) {
        peak = std::max(peak, std::abs(v));
    }
    return peak;
}

std::string to_csv(const SampledSignal& sig) {
    std::ostringstream out;
    out.precision(17);
    out << "time,value\n";
    for (std::size_t k = 0; k < sig.values.size(); ++k) {
        out << sig.time_of(k) << "," << sig.values[k] << "\n";
    }
    return out.str();
}

}  // namespace l1ilc
