#include <doctest.h>

#include "nig/errors.hpp"
#include "nig/model.hpp"
#include "nig/series.hpp"
#include "nig/specialfn.hpp"
#include "nig/tables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using nig::Complex;
using nig::MarketContext;
using nig::NigParams;

namespace {

const NigParams kSaebo{8.9932, -4.5176, 1.1528, 0.0};
const NigParams kSym{8.9932, 0.0, 1.1528, 0.0};

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("validate accepts calibrated sets and names the violated bound") {
    CHECK_NOTHROW(nig::validate(kSaebo));
    for (const auto& s : nig::calibrated_params()) CHECK_NOTHROW(nig::validate(s.params));
    CHECK_THROWS_WITH_AS(nig::validate(NigParams{1.0, 0.5, 1.0, 0.0}), doctest::Contains("alpha - 1"),
                         nig::AdmissibilityError);
    CHECK_THROWS_WITH_AS(nig::validate(NigParams{10.0, 0.0, -1.0, 0.0}), doctest::Contains("delta"),
                         nig::AdmissibilityError);
    CHECK_THROWS_AS(nig::validate(NigParams{0.0, 0.0, 1.0, 0.0}), nig::AdmissibilityError);
    CHECK_THROWS_AS(nig::validate(NigParams{5.0, -5.0, 1.0, 0.0}), nig::AdmissibilityError);
    CHECK_THROWS_AS(nig::validate(NigParams{5.0, 0.0, NAN, 0.0}), nig::AdmissibilityError);
}

TEST_CASE("levy symbol") {
    CHECK(std::abs(nig::levy_symbol(kSaebo, 0.0)) == 0.0);
    const Complex at_minus_i = nig::levy_symbol(kSaebo, Complex(0.0, -1.0));
    CHECK(at_minus_i.real() == doctest::Approx(-nig::martingale_adjustment(kSaebo)).epsilon(1e-14));
    CHECK(std::fabs(at_minus_i.imag()) < 1e-15);
    CHECK(nig::levy_symbol(kSym, 1.0).real() == doctest::Approx(-0.06389596881409769).epsilon(1e-13));
    const NigParams shifted{8.9932, -4.5176, 1.1528, 0.1};
    const Complex v = nig::levy_symbol(shifted, Complex(0.7, -0.3));
    CHECK(v.real() == doctest::Approx(-0.2075588168633805).epsilon(1e-13));
    CHECK(v.imag() == doctest::Approx(-0.3563754047125595).epsilon(1e-13));
    CHECK_THROWS_AS(nig::levy_symbol(kSym, Complex(0.0, -20.0)), nig::DomainError);
}

TEST_CASE("levy symbol derivative against a central difference") {
    for (Complex u : {Complex(0.3, 0.0), Complex(2.0, -1.0), Complex(-5.0, -0.5)}) {
        const double h = 1e-5;
        const Complex fd = (nig::levy_symbol(kSaebo, u + h) - nig::levy_symbol(kSaebo, u - h)) / (2.0 * h);
        const Complex d = nig::levy_symbol_derivative(kSaebo, u);
        CHECK(std::abs(d - fd) < 1e-8);
    }
}

TEST_CASE("characteristic normalisations") {
    for (double t : {0.01, 1.0, 5.0}) {
        const Complex m = nig::characteristic(kSaebo, Complex(0.0, -1.0), t, nig::Normalization::lewis);
        CHECK(std::abs(m - 1.0) < 1e-12);
        CHECK(std::abs(nig::characteristic(kSaebo, 0.0, t, nig::Normalization::raw) - 1.0) == 0.0);
        for (double u = -50.0; u <= 50.0; u += 0.7) {
            CHECK(std::abs(nig::characteristic(kSaebo, u, t, nig::Normalization::raw)) <= 1.0 + 1e-15);
        }
    }
    CHECK_THROWS_AS(nig::characteristic(kSaebo, 1.0, 1.0, nig::Normalization::carr_madan),
                    std::invalid_argument);
    const MarketContext c{4000.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    const Complex cm = nig::characteristic(kSaebo, Complex(0.0, -1.0), 1.0, nig::Normalization::carr_madan, &c);
    CHECK(cm.real() == doctest::Approx(4000.0 * std::exp(0.01)).epsilon(1e-12));
}

TEST_CASE("martingale adjustment") {
    CHECK(nig::martingale_adjustment(kSym) == doctest::Approx(-0.06429222127307051).epsilon(1e-13));
    CHECK(nig::martingale_adjustment(kSaebo) == doctest::Approx(0.5770283575864917).epsilon(1e-13));
    const NigParams p{6.0, 0.0, 1.5, 0.0};
    CHECK(nig::martingale_adjustment(p) == doctest::Approx(1.5 * (std::sqrt(35.0) - 6.0)));
}

TEST_CASE("martingale adjustment large-alpha asymptotics") {
    const double delta = 0.8, beta = 0.7, mu = 0.05;
    double prev = 0.0;
    for (double alpha : {50.0, 100.0, 200.0}) {
        const NigParams p{alpha, beta, delta, mu};
        const double approx = -mu - delta / alpha * (1.0 + 2.0 * beta) / 2.0;
        const double gap = std::fabs(nig::martingale_adjustment(p) - approx);
        CHECK(gap / std::fabs(nig::martingale_adjustment(p)) * alpha * alpha < 1.0);
        if (prev > 0.0) CHECK(gap == doctest::Approx(prev / 8.0).epsilon(0.05));
        prev = gap;
    }
}

TEST_CASE("density normalisation, symmetry and moments") {
    for (const NigParams& p : {kSym, kSaebo, NigParams{20.7408, -11.7308, 0.2483, 0.1}}) {
        for (double t : {0.1, 1.0, 2.0}) {
            const double centre = p.mu * t + p.delta * t * p.beta / p.gamma();
            const double sd = std::sqrt(p.delta * t * p.alpha * p.alpha / std::pow(p.gamma(), 3));
            const double lo = centre - 60.0 * sd, hi = centre + 60.0 * sd;
            const auto f = [&](double x) { return nig::density(p, x, t); };
            CHECK(simpson(f, lo, hi, 40000) == doctest::Approx(1.0).epsilon(1e-8));
            const double mean = simpson([&](double x) { return x * f(x); }, lo, hi, 40000);
            CHECK(std::fabs(mean - t * (p.mu + p.delta * p.beta / p.gamma())) < 1e-6);
        }
    }
    for (double y : {0.01, 0.3, 1.7}) {
        CHECK(nig::density(kSym, y, 0.5) == doctest::Approx(nig::density(kSym, -y, 0.5)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(nig::density(kSym, 0.0, 0.0), nig::DomainError);
}

TEST_CASE("density and characteristic function are a Fourier pair") {
    const double t = 1.0;
    const double sd = std::sqrt(kSaebo.delta * t * kSaebo.alpha * kSaebo.alpha / std::pow(kSaebo.gamma(), 3));
    const double c = kSaebo.delta * t * kSaebo.beta / kSaebo.gamma();
    for (double u : {0.5, 1.0, 2.0}) {
        const double re = simpson([&](double x) { return std::cos(u * x) * nig::density(kSaebo, x, t); },
                                  c - 60 * sd, c + 60 * sd, 40000);
        const double im = simpson([&](double x) { return std::sin(u * x) * nig::density(kSaebo, x, t); },
                                  c - 60 * sd, c + 60 * sd, 40000);
        const Complex psi = nig::characteristic(kSaebo, u, t, nig::Normalization::raw);
        CHECK(std::fabs(re - psi.real()) < 1e-6);
        CHECK(std::fabs(im - psi.imag()) < 1e-6);
    }
}

TEST_CASE("levy measure density") {
    CHECK_THROWS_AS(nig::levy_measure_density(kSym, 0.0), nig::DomainError);
    for (double x : {0.01, 0.5, 3.0}) {
        CHECK(nig::levy_measure_density(kSym, x) == doctest::Approx(nig::levy_measure_density(kSym, -x)));
    }
    // log nu(x) + alpha|x| - beta x + 1.5 log|x| tends to log(delta sqrt(alpha / (2 pi)))
    const double limit = std::log(kSaebo.delta * std::sqrt(kSaebo.alpha / (2.0 * std::numbers::pi)));
    for (double x : {20.0, 50.0, -20.0, -50.0}) {
        const double g = std::log(nig::levy_measure_density(kSaebo, x)) + kSaebo.alpha * std::fabs(x) -
                         kSaebo.beta * x + 1.5 * std::log(std::fabs(x));
        CHECK(std::fabs(g - limit) < 0.05);
    }
    // Integrable away from zero, divergent like 1/x^2 near it.
    const auto nu = [&](double x) { return nig::levy_measure_density(kSaebo, x); };
    const double far = simpson(nu, 1.0, 20.0, 4000) + simpson(nu, -20.0, -1.0, 4000);
    CHECK(std::isfinite(far));
    double prev = simpson(nu, 1e-2, 1.0, 20000);
    for (double cut : {5e-3, 2.5e-3, 1.25e-3}) {
        const double part = simpson(nu, cut, 1.0, 40000);
        CHECK(part > 1.8 * prev);
        prev = part;
    }
}

TEST_CASE("triplet drift") {
    CHECK(nig::triplet_drift(NigParams{8.0, 0.0, 1.0, 0.3}) == 0.3);
    CHECK(nig::triplet_drift(NigParams{8.0, 2.0, 1.0, 0.3}) > 0.3);
    CHECK(nig::triplet_drift(NigParams{8.0, -2.0, 1.0, 0.3}) < 0.3);
    const double a = nig::triplet_drift(kSaebo);
    CHECK(a == doctest::Approx(-0.6664094006451696).epsilon(1e-10));
    const double simpson_value =
        2.0 * kSaebo.alpha * kSaebo.delta / std::numbers::pi *
        simpson(
            [&](double x) {
                if (x == 0.0) return kSaebo.beta / kSaebo.alpha;
                return std::sinh(kSaebo.beta * x) * nig::bessel_k_scaled(1.0, kSaebo.alpha * x) *
                       std::exp(-kSaebo.alpha * x);
            },
            0.0, 1.0, 20000);
    CHECK(std::fabs(a - simpson_value) < 1e-8);
}

TEST_CASE("moneyness") {
    const MarketContext c{4000.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    const nig::Moneyness m = nig::moneyness(kSym, c);
    CHECK(m.k0 == doctest::Approx(-0.05429222127307051).epsilon(1e-13));
    CHECK(m.convergence_ratio == doctest::Approx(0.04709595877261495).epsilon(1e-12));
    CHECK(m.forward_strike == 4000.0 * std::exp(-0.01));
    CHECK(m.gamma_sym == kSym.alpha);
    NigParams shifted = kSaebo;
    shifted.mu = 0.3;
    CHECK(nig::moneyness(shifted, c).k0 == nig::moneyness(kSaebo, c).k0);
    MarketContext pc = c;
    pc.power = 1.2;
    const double root = std::pow(4000.0, 1.0 / 1.2);
    CHECK(nig::moneyness(kSym, pc).k0a ==
          doctest::Approx(nig::log_forward_moneyness(kSym, 4000.0, root, 0.01, 0.0, 1.0)));
}

TEST_CASE("series prices do not depend on mu") {
    NigParams shifted = kSaebo;
    shifted.mu = 0.3;
    NigParams shifted_sym = kSym;
    shifted_sym.mu = 0.3;
    const MarketContext c{3500.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    const nig::PayoffSpec eur{nig::PayoffKind::european_call, {}, {}};
    CHECK(nig::price(shifted_sym, c, eur).price == nig::price(kSym, c, eur).price);
    CHECK(nig::price(shifted, c, eur).price == nig::price(kSaebo, c, eur).price);
}

TEST_CASE("convergence gate") {
    const MarketContext atm{4000.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    CHECK(nig::convergence_gate(kSym, atm).satisfied);
    const MarketContext otm_short{3500.0, 4000.0, 0.01, 0.0, 0.05, {}, {}};
    const nig::GateOutcome g = nig::convergence_gate(kSaebo, otm_short);
    CHECK_FALSE(g.satisfied);
    CHECK(g.ratio > 1.0);
    const MarketContext otm_long{3500.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    CHECK(nig::convergence_gate(kSaebo, otm_long).satisfied);
}

TEST_CASE("accessible maturities") {
    const MarketContext otm{3500.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    const MarketContext itm{4500.0, 4000.0, 0.01, 0.0, 1.0, {}, {}};
    CHECK(nig::accessible_maturities(kSaebo, itm).threshold() == doctest::Approx(0.208).epsilon(0.005));
    CHECK(nig::accessible_maturities(NigParams{20.7408, -11.7308, 0.2483, 0}, otm).threshold() ==
          doctest::Approx(0.319).epsilon(0.005));
    CHECK(nig::accessible_maturities(NigParams{16.1975, -3.1804, 1.0867, 0}, itm).threshold() ==
          doctest::Approx(0.131).epsilon(0.008));
    // The condition agrees with the gate itself along a maturity sweep.
    for (const auto& s : nig::calibrated_params()) {
        for (const MarketContext& base : {otm, itm}) {
            const nig::MaturityCondition cond = nig::accessible_maturities(s.params, base);
            for (double tau = 0.01; tau < 5.0; tau *= 1.13) {
                MarketContext c = base;
                c.tau = tau;
                CHECK(cond.admits(tau) == nig::convergence_gate(s.params, c).satisfied);
            }
        }
    }
    const nig::MaturityCondition atm =
        nig::accessible_maturities(kSym, MarketContext{4000.0, 4000.0, 0.01, 0.0, 1.0, {}, {}});
    CHECK(atm.regime == nig::MoneynessRegime::at_the_money);
    CHECK(atm.admits(0.01));
}

TEST_CASE("fast-reversion Heston map") {
    const double sigma = 0.2, vol = 0.5;
    const NigParams p0 = nig::heston_frh_map(sigma, vol, 0.0);
    const double g = vol * sigma;
    CHECK(p0.beta == doctest::Approx(-0.5));
    CHECK(p0.alpha == doctest::Approx(std::sqrt(4.0 + g * g) / (2.0 * g)));
    CHECK(p0.mu == 0.0);
    CHECK(nig::heston_frh_map(sigma, vol, -0.5).mu == doctest::Approx(sigma * 0.5 / vol));
    for (double s = 0.05; s <= 0.5 + 1e-9; s += 0.05) {
        for (double v = 0.1; v <= 2.0 + 1e-9; v += 0.1) {
            for (double rho = -0.9; rho <= 0.9 + 1e-9; rho += 0.1) {
                CHECK_NOTHROW(nig::validate(nig::heston_frh_map(s, v, rho)));
            }
        }
    }
    CHECK_THROWS_AS(nig::heston_frh_map(sigma, vol, 1.0), nig::DomainError);
    CHECK_THROWS_AS(nig::heston_frh_map(sigma, vol, -1.0), nig::DomainError);
}

TEST_CASE("variance swap multiplier") {
    CHECK(nig::variance_swap_multiplier(NigParams{1.0, 0.0, 1.0, 0.0}) == 1.0);
    CHECK(nig::variance_swap_multiplier(NigParams{10.0, 0.0, 1.0, 0.0}) ==
          doctest::Approx(1.9949874371066200).epsilon(1e-14));
    double prev = 0.0;
    for (double alpha : {1e2, 1e3, 1e4}) {
        const double v = nig::variance_swap_multiplier(NigParams{alpha, 0.0, 1.0, 0.0});
        CHECK(v > prev);
        CHECK((2.0 - v) * alpha * alpha == doctest::Approx(0.5).epsilon(1e-3));
        prev = v;
    }
    CHECK_THROWS_AS(nig::variance_swap_multiplier(kSaebo), nig::DomainError);
}

TEST_CASE("sampler is reproducible and matches the first two moments") {
    const double dt = 0.5;
    const auto a = nig::sample_increments(kSaebo, dt, 1000, 7);
    const auto b = nig::sample_increments(kSaebo, dt, 1000, 7);
    CHECK((a.increments.array() == b.increments.array()).all());
    CHECK(a.seed == 7);
    CHECK(a.dt == dt);
    CHECK_THROWS_AS(nig::sample_increments(kSaebo, dt, 0, 1), nig::DomainError);

    const std::size_t n = 1'000'000;
    const auto s = nig::sample_increments(kSaebo, dt, n, 11);
    const double g = kSaebo.gamma();
    const double mean = dt * (kSaebo.mu + kSaebo.delta * kSaebo.beta / g);
    const double var = dt * kSaebo.delta * kSaebo.alpha * kSaebo.alpha / (g * g * g);
    const double m = s.increments.mean();
    const double v = (s.increments.array() - m).square().sum() / static_cast<double>(n - 1);
    CHECK(std::fabs(m - mean) < 4.0 * std::sqrt(var / n));
    // Var of the sample variance is (mu4 - sigma^4) / n with mu4 = sigma^4 (3 + excess kurtosis).
    const double kurt = 3.0 * (1.0 + 4.0 * kSaebo.beta * kSaebo.beta / (kSaebo.alpha * kSaebo.alpha)) /
                        (kSaebo.delta * dt * g);
    CHECK(std::fabs(v - var) < 4.0 * var * std::sqrt((2.0 + kurt) / n));
}

TEST_CASE("martingale condition by simulation") {
    const double tau = 2.0;
    const std::size_t n = 1'000'000;
    const auto s = nig::sample_increments(kSaebo, tau, n, 2024);
    const double omega = nig::martingale_adjustment(kSaebo);
    const Eigen::ArrayXd e = (omega * tau + s.increments.array()).exp();
    const double m = e.mean();
    const double se = std::sqrt((e - m).square().sum() / (n - 1) / n);
    CHECK(std::fabs(m - 1.0) < 4.0 * se);
}

TEST_CASE("sampler passes a Kolmogorov-Smirnov test against the density") {
    for (const NigParams& p : {kSym, kSaebo}) {
        const double dt = 0.25;
        const std::size_t n = 100'000;
        auto draws = nig::sample_increments(p, dt, n, 99).increments;
        std::vector<double> x(draws.data(), draws.data() + n);
        std::sort(x.begin(), x.end());
        // CDF on a fine grid by cumulative Simpson, linearly interpolated.
        const double lo = x.front() - 1.0, hi = x.back() + 1.0;
        const int cells = 200000;
        const double h = (hi - lo) / cells;
        std::vector<double> cdf(cells + 1, 0.0);
        for (int i = 0; i < cells; ++i) {
            const double a = lo + i * h;
            const double fa = nig::density(p, a, dt), fm = nig::density(p, a + 0.5 * h, dt),
                         fb = nig::density(p, a + h, dt);
            cdf[i + 1] = cdf[i] + h * (fa + 4.0 * fm + fb) / 6.0;
        }
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = (x[i] - lo) / h;
            const int j = std::min(static_cast<int>(pos), cells - 1);
            const double f = cdf[j] + (pos - j) * (cdf[j + 1] - cdf[j]);
            d = std::max({d, std::fabs(f - static_cast<double>(i) / n), std::fabs(f - static_cast<double>(i + 1) / n)});
        }
        CHECK(cdf.back() == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
    }
}
