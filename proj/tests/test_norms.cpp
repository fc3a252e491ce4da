#include <cmath>
#include <random>

#include "doctest.h"
#include "l1ilc/norms.hpp"
#include "l1ilc/signal.hpp"

using namespace l1ilc;

TEST_CASE("l1_system_norm analytic cases") {
    SUBCASE("first-order lags integrate to exactly one") {
        for (double m : {1.0, 5.0, 10.0}) {
            const TransferFunction g({m}, {1.0, m});
            CHECK(l1_system_norm(g) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("1/(s+1)^2 has a nonnegative impulse, so the norm is the DC gain") {
        const TransferFunction g({1.0}, {1.0, 2.0, 1.0});
        const double           norm = l1_system_norm(g);
        CHECK(norm == doctest::Approx(g.dc_gain()).epsilon(1e-6));
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("s/(s+1)^2 against a brute-force quadrature oracle") {
        // Impulse response (1-t)e^{-t}; the sign change makes the norm exceed
        // the DC gain. Oracle: fine trapezoid over the analytic response.
        double       oracle = 0.0;
        const double h      = 1e-5;
        double       prev   = 1.0;
        for (long k = 1; k * h <= 40.0; ++k) {
            const double t   = k * h;
            const double mag = std::abs((1.0 - t) * std::exp(-t));
            oracle += 0.5 * (prev + mag) * h;
            prev = mag;
        }
        CHECK(oracle == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-5));

        const TransferFunction g({1.0, 0.0}, {1.0, 2.0, 1.0});
        CHECK(l1_system_norm(g) == doctest::Approx(oracle).epsilon(1e-4));
    }
}

TEST_CASE("l1_system_norm rejects bad inputs") {
    CHECK_THROWS_AS(l1_system_norm(TransferFunction({1.0}, {1.0, -1.0})), std::invalid_argument);
    CHECK_THROWS_AS(l1_system_norm(TransferFunction({1.0, 1.0}, {1.0, 2.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(l1_system_norm(TransferFunction({1.0}, {1.0, 1.0}), 0.0, -1.0),
                    std::invalid_argument);
    CHECK(l1_system_norm(TransferFunction()) == 0.0);  // zero system
}

TEST_CASE("l1_system_norm dominates the DC gain") {
    std::mt19937_64                  rng(5);
    std::uniform_real_distribution<> pole(0.3, 8.0);
    std::uniform_real_distribution<> coeff(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> den =
            poly::multiply({1.0, pole(rng)}, poly::multiply({1.0, pole(rng)}, {1.0, pole(rng)}));
        std::vector<double> num{coeff(rng), coeff(rng), coeff(rng)};
        if (poly::is_zero(num)) {
            num = {1.0};
        }
        const TransferFunction g(num, den);
        CHECK(l1_system_norm(g, 0.0, 1e-9) >= std::abs(g.dc_gain()) - 1e-6);
    }
}

TEST_CASE("l1_system_norm is insensitive to step refinement") {
    const double tail_tol = 1e-7;
    for (const TransferFunction& g :
         {TransferFunction({1.0}, {1.0, 2.0, 1.0}), TransferFunction({3.0, 1.0}, {1.0, 2.0, 4.0})}) {
        const double coarse = l1_system_norm(g, 1e-3, tail_tol);
        const double fine   = l1_system_norm(g, 5e-4, tail_tol);
        CHECK(std::abs(coarse - fine) < 10.0 * tail_tol);
    }
}

TEST_CASE("linf_norm") {
    CHECK(linf_norm(SampledSignal({1.0, -3.0, 2.0}, 0.1)) == doctest::Approx(3.0));
    CHECK(linf_norm(SampledSignal({0.0, 0.0, 0.0}, 0.1)) == doctest::Approx(0.0));
    std::vector<double> ramp(101);
    for (int k = 0; k <= 100; ++k) {
        ramp[static_cast<std::size_t>(k)] = k / 100.0;
    }
    CHECK(linf_norm(SampledSignal(ramp, 0.01)) == doctest::Approx(1.0));
}
