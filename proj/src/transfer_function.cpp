#include "l1ilc/transfer_function.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace l1ilc {
namespace poly {

std::vector<double> trim(std::vector<double> p, double rel_tol) {
    double largest = 0.0;
    for (double c : p) {
        largest = std::max(largest, std::abs(c));
    }
    std::size_t first = 0;
    while (first + 1 < p.size() && std::abs(p[first]) <= rel_tol * largest) {
        ++first;
    }
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(first));
    if (p.empty()) {
        p.push_back(0.0);
    }
    if (p.size() == 1 && std::abs(p[0]) <= rel_tol * largest) {
        p[0] = 0.0;
    }
    return p;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return trim(out);
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t   n = std::max(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[n - a.size() + i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        out[n - b.size() + i] += b[i];
    }
    return trim(out);
}

std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b) {
    return add(a, scale(b, -1.0));
}

std::vector<double> scale(const std::vector<double>& a, double k) {
    std::vector<double> out = a;
    for (double& c : out) {
        c *= k;
    }
    return trim(out);
}

bool is_zero(const std::vector<double>& p) {
    for (double c : p) {
        if (c != 0.0) {
            return false;
        }
    }
    return true;
}

std::complex<double> eval(const std::vector<double>& p, std::complex<double> s) {
    std::complex<double> acc(0.0, 0.0);
    for (double c : p) {
        acc = acc * s + c;
    }
    return acc;
}

std::vector<std::complex<double>> roots(const std::vector<double>& p) {
    const std::vector<double> q = trim(p);
    const int                 n = static_cast<int>(q.size()) - 1;
    if (n <= 0) {
        return {};
    }
    if (q[0] == 0.0) {
        throw std::invalid_argument("poly::roots: zero leading coefficient");
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        companion(0, i) = -q[static_cast<std::size_t>(i) + 1] / q[0];
    }
    for (int i = 1; i < n; ++i) {
        companion(i, i - 1) = 1.0;
    }
    const auto                        eig = companion.eigenvalues();
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < eig.size(); ++i) {
        out.push_back(eig(i));
    }
    return out;
}

std::vector<double> from_roots(const std::vector<std::complex<double>>& r) {
    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& root : r) {
        std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= coeffs[i] * root;
        }
        coeffs = std::move(next);
    }
    std::vector<double> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        out[i] = coeffs[i].real();
    }
    return out;
}

}  // namespace poly

namespace {

void check_finite(const std::vector<double>& p, const char* what) {
    for (double c : p) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument(std::string("TransferFunction: non-finite ") + what);
        }
    }
}

}  // namespace

TransferFunction::TransferFunction() : num{0.0}, den{1.0} {}

TransferFunction::TransferFunction(std::vector<double> n, std::vector<double> d)
    : num(poly::trim(std::move(n))), den(poly::trim(std::move(d))) {
    check_finite(num, "numerator");
    check_finite(den, "denominator");
    if (poly::is_zero(den)) {
        throw std::invalid_argument("TransferFunction: denominator must be nonzero");
    }
}

bool TransferFunction::is_strictly_proper() const {
    return is_zero() || num_degree() < den_degree();
}

bool TransferFunction::is_proper() const {
    return is_zero() || num_degree() <= den_degree();
}

std::complex<double> TransferFunction::eval(std::complex<double> s) const {
    return poly::eval(num, s) / poly::eval(den, s);
}

double TransferFunction::dc_gain() const {
    return eval(std::complex<double>(0.0, 0.0)).real();
}

std::string TransferFunction::to_string() const {
    std::ostringstream out;
    out.precision(17);
    auto emit = [&out](const std::vector<double>& p) {
        out << "[";
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (i > 0) {
                out << ", ";
            }
            out << p[i];
        }
        out << "]";
    };
    out << "num: ";
    emit(num);
    out << " / den: ";
    emit(den);
    return out.str();
}

TransferFunction TransferFunction::parse(const std::string& text) {
    auto read_list = [&text](const std::string& key) {
        const std::size_t at = text.find(key);
        if (at == std::string::npos) {
            throw std::invalid_argument("TransferFunction::parse: missing '" + key + "'");
        }
        const std::size_t open  = text.find('[', at);
        const std::size_t close = text.find(']', open);
        if (open == std::string::npos || close == std::string::npos) {
            throw std::invalid_argument("TransferFunction::parse: malformed coefficient list");
        }
        std::vector<double> coeffs;
        std::string         body = text.substr(open + 1, close - open - 1);
        std::replace(body.begin(), body.end(), ',', ' ');
        std::istringstream in(body);
        double             c = 0.0;
        while (in >> c) {
            coeffs.push_back(c);
        }
        if (coeffs.empty()) {
            throw std::invalid_argument("TransferFunction::parse: empty coefficient list");
        }
        return coeffs;
    };
    return TransferFunction(read_list("num:"), read_list("den:"));
}

TransferFunction TransferFunction::constant(double c) {
    return TransferFunction({c}, {1.0});
}

TransferFunction tf_series(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(poly::multiply(a.num, b.num), poly::multiply(a.den, b.den));
}

TransferFunction tf_parallel(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(
        poly::add(poly::multiply(a.num, b.den), poly::multiply(b.num, a.den)),
        poly::multiply(a.den, b.den));
}

TransferFunction tf_subtract(const TransferFunction& a, const TransferFunction& b) {
    return TransferFunction(
        poly::subtract(poly::multiply(a.num, b.den), poly::multiply(b.num, a.den)),
        poly::multiply(a.den, b.den));
}

TransferFunction tf_divide(const TransferFunction& a, const TransferFunction& b) {
    if (b.is_zero()) {
        throw std::invalid_argument("tf_divide: division by the zero system");
    }
    return TransferFunction(poly::multiply(a.num, b.den), poly::multiply(a.den, b.num));
}

TransferFunction tf_feedback(const TransferFunction& forward, const TransferFunction& loop_gain) {
    // forward/(1 + forward*loop_gain) = nf*dl / (df*dl + nf*nl)
    const std::vector<double> num = poly::multiply(forward.num, loop_gain.den);
    const std::vector<double> den = poly::add(poly::multiply(forward.den, loop_gain.den),
                                              poly::multiply(forward.num, loop_gain.num));
    if (poly::is_zero(den)) {
        throw std::invalid_argument("tf_feedback: degenerate algebraic loop");
    }
    return TransferFunction(num, den);
}

bool is_stable(const TransferFunction& g, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("is_stable: tol must be positive");
    }
    for (const auto& p : g.poles()) {
        if (p.real() >= -tol) {
            return false;
        }
    }
    return true;
}

TransferFunction minimal_realization(const TransferFunction& g, double tol) {
    if (g.is_zero() || g.num_degree() == 0 || g.den_degree() == 0) {
        return g;
    }
    auto zeros_left = poly::roots(g.num);
    auto poles_left = poly::roots(g.den);

    std::vector<std::complex<double>> zeros_kept;
    for (const auto& z : zeros_left) {
        auto   best      = poles_left.end();
        double best_dist = tol * std::max(1.0, std::abs(z));
        for (auto it = poles_left.begin(); it != poles_left.end(); ++it) {
            const double dist = std::abs(*it - z);
            if (dist <= best_dist) {
                best      = it;
                best_dist = dist;
            }
        }
        if (best != poles_left.end()) {
            poles_left.erase(best);
        } else {
            zeros_kept.push_back(z);
        }
    }

    // Rebuild monic-from-roots and restore the original leading ratio.
    const double     gain = g.num.front() / g.den.front();
    TransferFunction cleaned(poly::scale(poly::from_roots(zeros_kept), gain),
                             poly::from_roots(poles_left));

    // Spot check: the cleaned system must reproduce the original response.
    for (double w : {0.37, 1.7, 9.3}) {
        const std::complex<double> s(0.11, w);
        const auto                 ref  = g.eval(s);
        const auto                 got  = cleaned.eval(s);
        const double               size = std::max(1.0, std::abs(ref));
        if (std::abs(ref - got) > 1e-6 * size) {
            return g;
        }
    }
    return cleaned;
}

}  // namespace l1ilc
