#pragma once

#include <complex>
#include <string>
#include <vector>

namespace l1ilc {

namespace poly {

// Polynomials are real coefficient vectors in descending powers of s.
// All routines trim leading coefficients that are negligible relative to the
// largest coefficient, so degrees stay meaningful after subtraction.
std::vector<double> trim(std::vector<double> p, double rel_tol = 1e-12);
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> subtract(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> scale(const std::vector<double>& a, double k);
bool                is_zero(const std::vector<double>& p);

std::complex<double> eval(const std::vector<double>& p, std::complex<double> s);

// Roots via eigenvalues of the companion matrix of the monic polynomial.
std::vector<std::complex<double>> roots(const std::vector<double>& p);

// Real polynomial with the given roots (conjugate pairs expected); leading
// coefficient one.
std::vector<double> from_roots(const std::vector<std::complex<double>>& r);

}  // namespace poly

// Rational continuous-time SISO system num(s)/den(s), coefficients in
// descending powers of s. The denominator is never identically zero; the
// numerator may be (the zero system). Constants are represented with a
// degree-zero denominator.
struct TransferFunction {
    std::vector<double> num;
    std::vector<double> den;

    TransferFunction();  // zero system 0/1
    TransferFunction(std::vector<double> num, std::vector<double> den);

    int  num_degree() const { return static_cast<int>(num.size()) - 1; }
    int  den_degree() const { return static_cast<int>(den.size()) - 1; }
    bool is_zero() const { return poly::is_zero(num); }
    bool is_strictly_proper() const;
    bool is_proper() const;

    std::complex<double> eval(std::complex<double> s) const;
    double               dc_gain() const;  // eval at s = 0

    std::vector<std::complex<double>> poles() const { return poly::roots(den); }

    // Plain text form used in harness config files:
    //   num: [c_n, ..., c_0] / den: [d_m, ..., d_0]
    std::string             to_string() const;
    static TransferFunction parse(const std::string& text);

    static TransferFunction constant(double c);
};

// Series interconnection a*b. Common factors are NOT cancelled; use
// minimal_realization for explicit cleanup.
TransferFunction tf_series(const TransferFunction& a, const TransferFunction& b);

// Parallel interconnections a+b and a-b.
TransferFunction tf_parallel(const TransferFunction& a, const TransferFunction& b);
TransferFunction tf_subtract(const TransferFunction& a, const TransferFunction& b);

// a/b. Throws if b is the zero system.
TransferFunction tf_divide(const TransferFunction& a, const TransferFunction& b);

// Negative feedback closure forward / (1 + forward*loop_gain). Throws when
// the algebraic loop is degenerate (identically zero closed-loop denominator).
TransferFunction tf_feedback(const TransferFunction& forward, const TransferFunction& loop_gain);

// True iff every denominator root has real part < -tol. tol must be > 0.
bool is_stable(const TransferFunction& g, double tol = 1e-9);

// Cancels numerator/denominator root pairs closer than tol (relative to the
// root magnitude) and rebuilds the coefficients. Gain at non-cancelled
// frequencies is preserved; if the cleaned system fails a spot check against
// the original the input is returned unchanged.
TransferFunction minimal_realization(const TransferFunction& g, double tol = 1e-8);

inline TransferFunction operator*(const TransferFunction& a, const TransferFunction& b) {
    return tf_series(a, b);
}
inline TransferFunction operator+(const TransferFunction& a, const TransferFunction& b) {
    return tf_parallel(a, b);
}
inline TransferFunction operator-(const TransferFunction& a, const TransferFunction& b) {
    return tf_subtract(a, b);
}

}  // namespace l1ilc
