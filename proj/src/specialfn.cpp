#include "nig/specialfn.hpp"

#include "nig/errors.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace nig {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kLogPi = 1.1447298858494002;
constexpr double kSqrt2Pi = 2.5066282746310005;
constexpr double kGammaOverflow = 171.61447887182298;

// Lanczos approximation, g = 671/128, 14 terms (Godfrey coefficients).
constexpr double kLanczosG = 5.24218750000000000;
constexpr double kLanczosC0 = 0.999999999999997092;
constexpr std::array<double, 14> kLanczosCoef = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

// Taylor coefficients of 1/Gamma(x) about 0: 1/Gamma(x) = sum c[k-1] x^k.
constexpr std::array<double, 28> kRecipGammaTaylor = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with exact argument reduction.
double sinpi(double x) {
    double r = std::fmod(x, 2.0);
    if (r > 1.0) r -= 2.0;
    if (r < -1.0) r += 2.0;
    double sign = 1.0;
    if (r < 0.0) {
        r = -r;
        sign = -1.0;
    }
    if (r > 0.5) r = 1.0 - r;
    return sign * std::sin(kPi * r);
}

double lanczos_series(double x) {
    double ser = kLanczosC0;
    double y = x;
    for (double c : kLanczosCoef) ser += c / ++y;
    return ser;
}

// Gamma for x >= 0.5 below the overflow threshold.
double gamma_positive(double x) {
    if (x == std::floor(x) && x <= 171.0) {
        double f = 1.0;
        for (double k = 2.0; k < x; k += 1.0) f *= k;
        return f;
    }
    const double t = x + kLanczosG;
    const double half_power = std::pow(t, 0.5 * (x + 0.5));
    return half_power * (half_power * std::exp(-t)) * kSqrt2Pi * lanczos_series(x) / x;
}

double log_gamma_positive(double x) {
    const double t = x + kLanczosG;
    return (x + 0.5) * std::log(t) - t + std::log(kSqrt2Pi * lanczos_series(x) / x);
}

// ---------------------------------------------------------------------------
// Bessel K. The order is split as nu = mu + n with |mu| <= 1/2; the pair
// (K_mu, K_{mu+1}) is seeded in one of three regimes and carried upward by
// the (stable) forward recurrence. Everything is kept in e^z K form.

struct SeedPair {
    double k_mu;
    double k_mu1;
};

// z <= 2: Temme's series.
SeedPair temme_seed(double mu, double z) {
    const double mu2 = mu * mu;
    double gampl = 0.0;  // 1/Gamma(1+mu)
    double gammi = 0.0;  // 1/Gamma(1-mu)
    double gam1 = 0.0;   // (gammi - gampl) / (2 mu)
    double gam2 = 0.0;   // (gammi + gampl) / 2
    double pw = 1.0;
    for (std::size_t k = 0; k < kRecipGammaTaylor.size(); ++k) {
        // kRecipGammaTaylor[k] multiplies x^k in 1/Gamma(1+x).
        const double c = kRecipGammaTaylor[k];
        gampl += c * pw;
        gammi += (k % 2 == 0 ? c : -c) * pw;
        pw *= mu;
    }
    pw = 1.0;
    for (std::size_t k = 0; k < kRecipGammaTaylor.size(); k += 2) {
        gam2 += kRecipGammaTaylor[k] * pw;
        if (k + 1 < kRecipGammaTaylor.size()) gam1 -= kRecipGammaTaylor[k + 1] * pw;
        pw *= mu2;
    }

    const double x2 = 0.5 * z;
    const double pimu = kPi * mu;
    const double fact = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i < 500; ++i) {
        const double di = i;
        ff = (di * ff + p + q) / (di * di - mu2);
        c *= d / di;
        p /= di - mu;
        q /= di + mu;
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - di * ff);
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    const double scale = std::exp(z);
    return {sum * scale, sum1 * (2.0 / z) * scale};
}

// 2 < z <= 30: Steed's continued fraction.
SeedPair steed_seed(double mu, double z) {
    const double mu2 = mu * mu;
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 10000; ++i) {
        a -= 2.0 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < kEps) break;
    }
    h *= a1;
    const double k_mu = std::sqrt(kPi / (2.0 * z)) / s;
    return {k_mu, k_mu * (mu + z + 0.5 - h) / z};
}

double hankel_sum(double nu, double z) {
    const double four_nu2 = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (four_nu2 - odd * odd) / (8.0 * k * z);
        const double mag = std::fabs(term);
        if (mag >= prev) break;  // asymptotic series started to diverge
        sum += term;
        if (mag < kEps * std::fabs(sum)) break;
        prev = mag;
    }
    return std::sqrt(kPi / (2.0 * z)) * sum;
}

// z > 30: Hankel's expansion.
SeedPair hankel_seed(double mu, double z) { return {hankel_sum(mu, z), hankel_sum(mu + 1.0, z)}; }

struct ScaledValue {
    double mantissa;
    double log_scale;  // value = mantissa * exp(log_scale)
};

ScaledValue bessel_k_scaled_impl(double nu, double z) {
    if (!(z > 0.0)) throw DomainError("bessel_k_scaled: argument must be positive");
    if (!std::isfinite(nu)) throw DomainError("bessel_k_scaled: order must be finite");
    nu = std::fabs(nu);
    const double steps = std::floor(nu + 0.5);
    const double mu = nu - steps;

    SeedPair seed{};
    if (mu == -0.5) {
        const double k_half = std::sqrt(kPi / (2.0 * z));
        seed = {k_half, k_half};
    } else if (z > 30.0) {
        seed = hankel_seed(mu, z);
    } else if (z <= 2.0) {
        seed = temme_seed(mu, z);
    } else {
        seed = steed_seed(mu, z);
    }

    constexpr double kRescale = 1e280;
    double k_lo = seed.k_mu;
    double k_hi = seed.k_mu1;
    double log_scale = 0.0;
    const double two_over_z = 2.0 / z;
    const long n = static_cast<long>(steps);
    for (long i = 1; i <= n; ++i) {
        const double next = (mu + static_cast<double>(i)) * two_over_z * k_hi + k_lo;
        k_lo = k_hi;
        k_hi = next;
        if (k_hi > kRescale) {
            k_lo /= kRescale;
            k_hi /= kRescale;
            log_scale += std::log(kRescale);
        }
    }
    return {k_lo, log_scale};
}

}  // namespace

double gamma(double x) {
    if (std::isnan(x)) return x;
    if (is_nonpositive_integer(x)) throw PoleError("gamma: pole at non-positive integer");
    if (x > kGammaOverflow) throw DomainError("gamma: result overflows");
    if (x >= 0.5) return gamma_positive(x);
    const double s = sinpi(x);
    if (1.0 - x <= kGammaOverflow) return kPi / (s * gamma_positive(1.0 - x));
    const double mag = std::exp(kLogPi - std::log(std::fabs(s)) - log_gamma_positive(1.0 - x));
    return s < 0.0 ? -mag : mag;
}

double recip_gamma(double x) {
    if (std::isnan(x)) return x;
    if (is_nonpositive_integer(x)) return 0.0;
    if (x >= 0.5) {
        if (x <= kGammaOverflow) return 1.0 / gamma_positive(x);
        return std::exp(-log_gamma_positive(x));
    }
    const double s = sinpi(x);
    if (1.0 - x <= kGammaOverflow) return s * gamma_positive(1.0 - x) / kPi;
    const double mag = std::exp(log_gamma_positive(1.0 - x) + std::log(std::fabs(s)) - kLogPi);
    return s < 0.0 ? -mag : mag;
}

double log_abs_gamma(double x) {
    if (is_nonpositive_integer(x)) throw PoleError("log_abs_gamma: pole at non-positive integer");
    if (x >= 0.5) return log_gamma_positive(x);
    return kLogPi - std::log(std::fabs(sinpi(x))) - log_gamma_positive(1.0 - x);
}

double pochhammer(double a, unsigned n) {
    double prod = 1.0;
    for (unsigned j = 0; j < n; ++j) {
        const double factor = a + static_cast<double>(j);
        if (factor == 0.0) return 0.0;
        prod *= factor;
    }
    return prod;
}

double bessel_k_scaled(BesselOrder nu, double z) {
    const ScaledValue v = bessel_k_scaled_impl(nu.magnitude(), z);
    if (v.log_scale == 0.0) return v.mantissa;
    return std::exp(std::log(v.mantissa) + v.log_scale);
}

double log_bessel_k_scaled(BesselOrder nu, double z) {
    const ScaledValue v = bessel_k_scaled_impl(nu.magnitude(), z);
    return std::log(v.mantissa) + v.log_scale;
}

std::vector<double> hankel_coefficients(BesselOrder nu, std::size_t kmax) {
    std::vector<double> a(kmax + 1);
    a[0] = 1.0;
    const double four_nu2 = 4.0 * nu.nu * nu.nu;
    for (std::size_t k = 1; k <= kmax; ++k) {
        const double odd = 2.0 * static_cast<double>(k) - 1.0;
        a[k] = a[k - 1] * (four_nu2 - odd * odd) / (8.0 * static_cast<double>(k));
    }
    return a;
}

}  // namespace nig
