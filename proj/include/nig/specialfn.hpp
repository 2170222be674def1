#pragma once

// Real-argument special functions used by the pricing series: Euler Gamma,
// its reciprocal, the Pochhammer symbol and the modified Bessel function of
// the second kind in exponentially scaled form.

#include <cstddef>
#include <vector>

namespace nig {

/// Order of a modified Bessel function. Any real value is admitted; the
/// evaluators work on |nu| so that K_nu and K_{-nu} agree bit for bit.
struct BesselOrder {
    double nu;

    constexpr BesselOrder(double v) : nu(v) {}  // NOLINT(google-explicit-constructor)
    constexpr double magnitude() const { return nu < 0.0 ? -nu : nu; }
};

/// Euler Gamma. Throws PoleError at 0, -1, -2, ... and DomainError when the
/// result overflows a double (x > ~171.6).
double gamma(double x);

/// 1/Gamma(x); total, exactly 0 at the non-positive integers.
double recip_gamma(double x);

/// log|Gamma(x)| for x not a pole.
double log_abs_gamma(double x);

/// Rising factorial (a)_n = a (a+1) ... (a+n-1). For a = -k this reproduces
/// (-1)^n k!/(k-n)! when n <= k and 0 beyond.
double pochhammer(double a, unsigned n);

/// e^z K_nu(z) for z > 0. Throws DomainError otherwise. May overflow to +inf
/// for very large |nu| at tiny z; use log_bessel_k_scaled there.
double bessel_k_scaled(BesselOrder nu, double z);

/// log(e^z K_nu(z)), free of overflow for any order.
double log_bessel_k_scaled(BesselOrder nu, double z);

/// Hankel large-argument coefficients a_0(nu) ... a_kmax(nu).
std::vector<double> hankel_coefficients(BesselOrder nu, std::size_t kmax);

}  // namespace nig
