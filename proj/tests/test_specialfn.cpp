#include <doctest.h>

#include "nig/errors.hpp"
#include "nig/specialfn.hpp"

#include <cmath>
#include <numbers>

namespace {

constexpr double kPi = std::numbers::pi;

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by the trapezoid rule, which
// converges geometrically for this analytic, doubly decaying integrand.
double bessel_k_trapezoid(double nu, double z) {
    const double h = 1.0 / 64.0;
    double sum = 0.5 * std::exp(-z);
    for (int i = 1;; ++i) {
        const double t = i * h;
        const double term = std::exp(-z * std::cosh(t) + nu * t) * 0.5 * (1.0 + std::exp(-2.0 * nu * t));
        sum += term;
        if (term < 1e-30 * sum && t > 1.0) break;
    }
    return sum * h;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("gamma at reference points") {
    CHECK(nig::gamma(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(nig::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(kPi)).epsilon(1e-14));
    CHECK(nig::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(nig::gamma(1.0) == 1.0);
}

TEST_CASE("gamma poles and overflow") {
    for (double x : {0.0, -1.0, -2.0, -7.0, -50.0}) CHECK_THROWS_AS(nig::gamma(x), nig::PoleError);
    CHECK_THROWS_AS(nig::gamma(180.0), nig::DomainError);
}

TEST_CASE("gamma against the C library across its range") {
    double worst = 0.0;
    for (double x = -30.25; x <= 170.0; x += 0.37) {
        if (std::fabs(x - std::round(x)) < 1e-9 && x <= 0.0) continue;
        worst = std::max(worst, rel(nig::gamma(x), std::tgamma(x)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("recip_gamma") {
    CHECK(nig::recip_gamma(-3.0) == 0.0);
    CHECK(nig::recip_gamma(0.0) == 0.0);
    CHECK(nig::recip_gamma(1.0) == 1.0);
    CHECK(nig::recip_gamma(-0.5) == doctest::Approx(-0.2820947918).epsilon(1e-10));
    for (int k = 0; k <= 40; ++k) CHECK(nig::recip_gamma(-static_cast<double>(k)) == 0.0);
    for (double x = -20.3; x < 160.0; x += 1.13) {
        CHECK(nig::recip_gamma(x) * nig::gamma(x) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("log_abs_gamma matches lgamma") {
    for (double x : {0.1, 0.5, 1.5, 10.0, 100.5, 1000.0, -0.5, -3.7, -10.2}) {
        CHECK(nig::log_abs_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    }
}

TEST_CASE("pochhammer") {
    CHECK(nig::pochhammer(3.7, 0) == 1.0);
    CHECK(nig::pochhammer(-3.0, 0) == 1.0);
    CHECK(nig::pochhammer(-3.0, 2) == 6.0);
    CHECK(nig::pochhammer(-3.0, 3) == -6.0);
    CHECK(nig::pochhammer(-3.0, 5) == 0.0);
    CHECK(nig::pochhammer(0.5, 3) == doctest::Approx(0.5 * 1.5 * 2.5));
}

TEST_CASE("pochhammer recurrence including negative integers") {
    for (double a : {-6.0, -3.0, -1.0, 0.0, 0.25, 1.0, 2.5, 7.0}) {
        for (unsigned n = 0; n < 12; ++n) {
            const double lhs = nig::pochhammer(a, n + 1);
            const double rhs = nig::pochhammer(a, n) * (a + n);
            if (rhs == 0.0) {
                CHECK(lhs == 0.0);
            } else {
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("bessel_k_scaled reference values") {
    // e * K_1(1), frozen from the trapezoid oracle below.
    CHECK(nig::bessel_k_scaled(1.0, 1.0) == doctest::Approx(1.636153486263258).epsilon(1e-13));
    CHECK(bessel_k_trapezoid(1.0, 1.0) * std::exp(1.0) == doctest::Approx(1.636153486263258).epsilon(1e-13));
    for (double z : {1e-6, 0.01, 1.0, 25.0, 1e4}) {
        CHECK(nig::bessel_k_scaled(0.5, z) == doctest::Approx(std::sqrt(kPi / (2.0 * z))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(nig::bessel_k_scaled(1.0, 0.0), nig::DomainError);
    CHECK_THROWS_AS(nig::bessel_k_scaled(1.0, -2.0), nig::DomainError);
}

TEST_CASE("bessel_k_scaled against the integral definition") {
    double worst = 0.0;
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0, 3.5, 7.0, 12.5, 20.0}) {
        for (double z : {0.05, 0.3, 1.0, 4.0, 10.0, 29.0, 31.0, 60.0}) {
            const double oracle = bessel_k_trapezoid(nu, z) * std::exp(z);
            worst = std::max(worst, rel(nig::bessel_k_scaled(nu, z), oracle));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("bessel symmetry is bit-identical") {
    for (double nu : {0.25, 0.5, 1.0, 2.5, 13.0, 60.5, 199.0}) {
        for (double z : {1e-6, 0.1, 1.0, 30.0, 500.0}) {
            CHECK(nig::bessel_k_scaled(-nu, z) == nig::bessel_k_scaled(nu, z));
            CHECK(nig::log_bessel_k_scaled(-nu, z) == nig::log_bessel_k_scaled(nu, z));
        }
    }
}

TEST_CASE("bessel monotone in the order") {
    for (double z : {1e-3, 0.1, 1.0, 5.0, 40.0, 1e3}) {
        double prev = nig::bessel_k_scaled(0.0, z);
        for (double nu = 0.25; nu <= 30.0; nu += 0.25) {
            const double v = nig::bessel_k_scaled(nu, z);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("half-integer closed form over [0.1, 100]") {
    for (double z = 0.1; z <= 100.0; z *= 1.37) {
        CHECK(nig::bessel_k_scaled(0.5, z) == doctest::Approx(std::sqrt(kPi / (2.0 * z))).epsilon(1e-12));
        const double k15 = std::sqrt(kPi / (2.0 * z)) * (1.0 + 1.0 / z);
        CHECK(nig::bessel_k_scaled(1.5, z) == doctest::Approx(k15).epsilon(1e-12));
    }
}

TEST_CASE("three-term recurrence") {
    double worst = 0.0;
    for (double nu : {0.5, 1.0, 1.5, 2.0, 4.5, 9.0, 17.0, 40.0}) {
        for (double z : {0.01, 0.2, 1.0, 3.0, 15.0, 35.0, 120.0}) {
            const double lhs = nig::bessel_k_scaled(nu + 1.0, z);
            const double rhs = nig::bessel_k_scaled(nu - 1.0, z) + 2.0 * nu / z * nig::bessel_k_scaled(nu, z);
            worst = std::max(worst, rel(lhs, rhs));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("log form agrees where the scaled value is representable and stays finite beyond") {
    for (double nu : {0.0, 1.0, 10.5, 50.0, 120.0}) {
        for (double z : {0.5, 5.0, 50.0}) {
            CHECK(nig::log_bessel_k_scaled(nu, z) ==
                  doctest::Approx(std::log(nig::bessel_k_scaled(nu, z))).epsilon(1e-13));
        }
    }
    CHECK(std::isfinite(nig::log_bessel_k_scaled(200.0, 1e-6)));
    CHECK(nig::log_bessel_k_scaled(200.0, 1e-6) > 3000.0);
}

TEST_CASE("hankel coefficients") {
    const auto half = nig::hankel_coefficients(0.5, 3);
    REQUIRE(half.size() == 4);
    CHECK(half[0] == 1.0);
    for (std::size_t k = 1; k < 4; ++k) CHECK(half[k] == 0.0);
    const auto one = nig::hankel_coefficients(1.0, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == 1.0);
    const auto first = nig::hankel_coefficients(1.0, 1);
    REQUIRE(first.size() == 2);
    CHECK(first[1] == doctest::Approx(3.0 / 8.0));
    // a_2(0) = (-1)(-9) / (2! 8^2)
    CHECK(nig::hankel_coefficients(0.0, 2)[2] == doctest::Approx(9.0 / 128.0));
}
