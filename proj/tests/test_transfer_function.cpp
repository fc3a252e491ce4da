#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "l1ilc/transfer_function.hpp"

using namespace l1ilc;

namespace {

// Routh-Hurwitz conditions for degree <= 3 after normalizing the leading
// coefficient to be positive. Strict stability only.
bool routh_stable(std::vector<double> p) {
    p = poly::trim(p);
    if (p[0] < 0.0) {
        for (double& c : p) {
            c = -c;
        }
    }
    switch (p.size()) {
        case 1: return true;  // no poles
        case 2: return p[1] > 0.0;
        case 3: return p[1] > 0.0 && p[2] > 0.0;
        case 4: return p[1] > 0.0 && p[2] > 0.0 && p[3] > 0.0 && p[1] * p[2] > p[0] * p[3];
        default: return false;
    }
}

bool same_response(const TransferFunction& a, const TransferFunction& b, double tol = 1e-9) {
    for (double w : {0.0, 0.31, 1.0, 4.7, 23.0}) {
        const std::complex<double> s(0.0, w);
        const auto                 fa = a.eval(s);
        const auto                 fb = b.eval(s);
        if (std::abs(fa - fb) > tol * std::max(1.0, std::abs(fa))) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("TransferFunction construction and validation") {
    SUBCASE("valid") {
        TransferFunction tf({1.0}, {1.0, 1.0});
        CHECK(tf.num_degree() == 0);
        CHECK(tf.den_degree() == 1);
        CHECK(tf.is_strictly_proper());
    }
    SUBCASE("leading zeros are trimmed") {
        TransferFunction tf({0.0, 0.0, 2.0}, {0.0, 1.0, 3.0});
        CHECK(tf.num == std::vector<double>{2.0});
        CHECK(tf.den == std::vector<double>({1.0, 3.0}));
    }
    SUBCASE("invalid") {
        CHECK_THROWS_AS(TransferFunction({1.0}, {0.0}), std::invalid_argument);
        CHECK_THROWS_AS(TransferFunction({1.0}, {0.0, 0.0}), std::invalid_argument);
        const double inf = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(TransferFunction({inf}, {1.0, 1.0}), std::invalid_argument);
    }
    SUBCASE("constants are allowed") {
        const TransferFunction c = TransferFunction::constant(5.0);
        CHECK(c.den_degree() == 0);
        CHECK(c.dc_gain() == doctest::Approx(5.0));
        CHECK_FALSE(c.is_strictly_proper());
        CHECK(c.is_proper());
    }
}

TEST_CASE("tf_series") {
    SUBCASE("1/(s+1) * 1/(s+2) = 1/(s^2+3s+2)") {
        const auto g = tf_series(TransferFunction({1.0}, {1.0, 1.0}),
                                 TransferFunction({1.0}, {1.0, 2.0}));
        CHECK(g.num == std::vector<double>{1.0});
        CHECK(g.den == std::vector<double>({1.0, 3.0, 2.0}));
    }
    SUBCASE("identity") {
        const TransferFunction m({2.0}, {1.0, 2.0});
        const auto             g = tf_series(m, TransferFunction::constant(1.0));
        CHECK(g.num == m.num);
        CHECK(g.den == m.den);
    }
    SUBCASE("no automatic cancellation") {
        // (s/(s+1)) * ((s+1)/s) keeps the common factors.
        const auto g = tf_series(TransferFunction({1.0, 0.0}, {1.0, 1.0}),
                                 TransferFunction({1.0, 1.0}, {1.0, 0.0}));
        CHECK(g.num == std::vector<double>({1.0, 1.0, 0.0}));
        CHECK(g.den == std::vector<double>({1.0, 1.0, 0.0}));
    }
}

TEST_CASE("tf_feedback") {
    SUBCASE("integrator under gain K closes to 1/(s+K)") {
        const auto g = tf_feedback(TransferFunction({1.0}, {1.0, 0.0}),
                                   TransferFunction::constant(3.0));
        CHECK(same_response(g, TransferFunction({1.0}, {1.0, 3.0})));
    }
    SUBCASE("zero loop gain leaves the forward path") {
        const TransferFunction fwd({2.0}, {1.0, 5.0});
        const auto             g = tf_feedback(fwd, TransferFunction());
        CHECK(same_response(g, fwd));
    }
    SUBCASE("m/(s+m) under unit feedback gives m/(s+2m)") {
        const double m = 4.0;
        const auto   g = tf_feedback(TransferFunction({m}, {1.0, m}),
                                     TransferFunction::constant(1.0));
        CHECK(same_response(g, TransferFunction({m}, {1.0, 2.0 * m})));
    }
    SUBCASE("degenerate loop throws") {
        // forward = 1, loop = -1: 1 + forward*loop vanishes identically.
        CHECK_THROWS_AS(tf_feedback(TransferFunction::constant(1.0),
                                    TransferFunction::constant(-1.0)),
                        std::invalid_argument);
    }
}

TEST_CASE("is_stable") {
    CHECK(is_stable(TransferFunction({1.0}, {1.0, 1.0})));
    CHECK_FALSE(is_stable(TransferFunction({1.0}, {1.0, -1.0})));
    CHECK(is_stable(TransferFunction({1.0}, {1.0, 1.0, 1.0})));
    CHECK_THROWS_AS(is_stable(TransferFunction({1.0}, {1.0, 1.0}), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(is_stable(TransferFunction({1.0}, {1.0, 1.0}), -1.0), std::invalid_argument);

    SUBCASE("agrees with Routh-Hurwitz on all low-degree sign patterns") {
        const std::vector<double> coeffs{-2.0, -1.0, 1.0, 2.0};
        for (std::size_t degree = 1; degree <= 3; ++degree) {
            std::vector<std::size_t> index(degree + 1, 0);
            while (true) {
                std::vector<double> p;
                for (std::size_t i = 0; i <= degree; ++i) {
                    p.push_back(coeffs[index[i]]);
                }
                CAPTURE(p);
                CHECK(is_stable(TransferFunction({1.0}, p)) == routh_stable(p));
                std::size_t pos = 0;
                while (pos <= degree && ++index[pos] == coeffs.size()) {
                    index[pos] = 0;
                    ++pos;
                }
                if (pos > degree) {
                    break;
                }
            }
        }
    }
}

TEST_CASE("minimal_realization") {
    SUBCASE("(s^2+s)/(s^2+s) collapses to 1") {
        const TransferFunction g({1.0, 1.0, 0.0}, {1.0, 1.0, 0.0});
        const auto             cleaned = minimal_realization(g);
        CHECK(cleaned.num_degree() == 0);
        CHECK(cleaned.den_degree() == 0);
        CHECK(cleaned.dc_gain() == doctest::Approx(1.0));
    }
    SUBCASE("keeps systems with nothing to cancel") {
        const TransferFunction g({1.0}, {1.0, 3.0, 2.0});
        const auto             cleaned = minimal_realization(g);
        CHECK(cleaned.den == g.den);
    }
    SUBCASE("partial cancellation preserves the response") {
        const auto g = tf_series(TransferFunction({1.0, 2.0}, {1.0, 1.0}),
                                 TransferFunction({1.0}, {1.0, 2.0}));
        const auto cleaned = minimal_realization(g);
        CHECK(cleaned.den_degree() == 1);
        CHECK(same_response(g, cleaned, 1e-8));
    }
}

TEST_CASE("serialization round trip") {
    const TransferFunction g({0.5, -3.0}, {1.0, 2.0, 0.25});
    const auto             parsed = TransferFunction::parse(g.to_string());
    CHECK(parsed.num == g.num);
    CHECK(parsed.den == g.den);
    CHECK_THROWS_AS(TransferFunction::parse("den: [1, 1]"), std::invalid_argument);

    SUBCASE("random round trips are exact") {
        std::mt19937_64                  rng(7);
        std::uniform_real_distribution<> coeff(-5.0, 5.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> num{coeff(rng), coeff(rng)};
            std::vector<double> den{1.0, coeff(rng), coeff(rng), coeff(rng)};
            const TransferFunction original(num, den);
            const auto             back = TransferFunction::parse(original.to_string());
            CHECK(back.num == original.num);
            CHECK(back.den == original.den);
        }
    }
}

TEST_CASE("eval matches hand computation") {
    // G(s) = (s+1)/(s^2+2s+5) at s = j2: (1+2j)/(1+4j)
    const TransferFunction     g({1.0, 1.0}, {1.0, 2.0, 5.0});
    const std::complex<double> expected =
        std::complex<double>(1.0, 2.0) / std::complex<double>(1.0, 4.0);
    const auto got = g.eval(std::complex<double>(0.0, 2.0));
    CHECK(std::abs(got - expected) < 1e-12);
}
