#include "nig/model.hpp"

#include "nig/errors.hpp"
#include "nig/quadrature.hpp"
#include "nig/specialfn.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace nig {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

double omega_without_mu(const NigParams& p) {
    const double b1 = p.beta + 1.0;
    return p.delta * (std::sqrt(p.alpha * p.alpha - b1 * b1) - p.gamma());
}

}  // namespace

double NigParams::gamma() const { return std::sqrt(alpha * alpha - beta * beta); }

void validate(const NigParams& p) {
    if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.delta) ||
        !std::isfinite(p.mu)) {
        throw AdmissibilityError("NIG parameters must be finite");
    }
    if (!(p.alpha > 0.0)) throw AdmissibilityError("alpha must be positive");
    if (!(p.delta > 0.0)) throw AdmissibilityError("delta must be positive");
    if (!(p.beta > -p.alpha)) throw AdmissibilityError("beta must exceed -alpha");
    if (!(p.beta < p.alpha - 1.0)) throw AdmissibilityError("beta must be below alpha - 1");
    if (!(std::fabs(p.beta + 1.0) < p.alpha)) throw AdmissibilityError("|beta + 1| must be below alpha");
}

void validate(const MarketContext& c) {
    if (!(c.spot > 0.0)) throw AdmissibilityError("spot must be positive");
    if (!(c.strike > 0.0)) throw AdmissibilityError("strike must be positive");
    if (!(c.tau > 0.0)) throw AdmissibilityError("tau must be positive");
    if (!std::isfinite(c.rate) || !std::isfinite(c.dividend)) {
        throw AdmissibilityError("rate and dividend must be finite");
    }
    if (c.strike2 && !(*c.strike2 > 0.0)) throw AdmissibilityError("strike2 must be positive");
    if (c.power && !(*c.power > 0.0)) throw AdmissibilityError("power must be positive");
}

Complex levy_symbol(const NigParams& p, Complex u) {
    const Complex shifted = p.beta + kI * u;
    const Complex radicand = p.alpha * p.alpha - shifted * shifted;
    if (radicand.real() < 0.0) {
        throw DomainError("levy_symbol: argument outside the admissible strip");
    }
    return kI * p.mu * u - p.delta * (std::sqrt(radicand) - p.gamma());
}

Complex levy_symbol_derivative(const NigParams& p, Complex u) {
    const Complex shifted = p.beta + kI * u;
    const Complex radicand = p.alpha * p.alpha - shifted * shifted;
    if (radicand.real() < 0.0) {
        throw DomainError("levy_symbol_derivative: argument outside the admissible strip");
    }
    return kI * p.mu + kI * p.delta * shifted / std::sqrt(radicand);
}

Complex characteristic(const NigParams& p, Complex u, double t, Normalization normalization,
                       const MarketContext* context) {
    const Complex exponent = t * levy_symbol(p, u);
    switch (normalization) {
        case Normalization::raw:
            return std::exp(exponent);
        case Normalization::lewis:
            return std::exp(kI * u * martingale_adjustment(p) * t + exponent);
        case Normalization::carr_madan: {
            if (context == nullptr) {
                throw std::invalid_argument("characteristic: carr_madan normalization needs a market context");
            }
            const double drift = std::log(context->spot) +
                                 (context->rate - context->dividend + martingale_adjustment(p)) * t;
            return std::exp(kI * u * drift + exponent);
        }
    }
    return {};
}

double martingale_adjustment(const NigParams& p) { return -p.mu + omega_without_mu(p); }

double density(const NigParams& p, double x, double t) {
    if (!(t > 0.0)) throw DomainError("density: t must be positive");
    const double scale = p.delta * t;
    const double centred = x - p.mu * t;
    const double radius = std::hypot(scale, centred);
    const double arg = p.alpha * radius;
    const double log_f = std::log(p.alpha * scale / kPi) + scale * p.gamma() + p.beta * centred +
                         log_bessel_k_scaled(1.0, arg) - arg - std::log(radius);
    return std::exp(log_f);
}

double levy_measure_density(const NigParams& p, double x) {
    if (x == 0.0) throw DomainError("levy_measure_density: singular at x = 0");
    const double ax = std::fabs(x);
    const double arg = p.alpha * ax;
    return p.alpha * p.delta / kPi *
           std::exp(p.beta * x - arg + log_bessel_k_scaled(1.0, arg)) / ax;
}

double triplet_drift(const NigParams& p) {
    if (p.beta == 0.0) return p.mu;
    auto integrand = [&](double x) {
        if (x <= 0.0) return p.beta / p.alpha;
        const double arg = p.alpha * x;
        return std::sinh(p.beta * x) * std::exp(log_bessel_k_scaled(1.0, arg) - arg);
    };
    QuadratureOptions opts;
    opts.abs_tol = 1e-10;
    const QuadratureResult r = integrate(integrand, 0.0, 1.0, opts);
    if (!r.converged) throw QuadratureError("triplet_drift: quadrature did not converge");
    return p.mu + 2.0 * p.alpha * p.delta / kPi * r.value;
}

double log_forward_moneyness(const NigParams& p, double spot, double strike, double rate,
                             double dividend, double tau) {
    return std::log(spot / strike) + (rate - dividend + omega_without_mu(p)) * tau;
}

Moneyness moneyness(const NigParams& p, const MarketContext& c) {
    Moneyness m;
    m.omega = martingale_adjustment(p);
    m.gamma_sym = p.gamma();
    m.forward_strike = c.strike * std::exp(-(c.rate - c.dividend) * c.tau);
    m.k0 = log_forward_moneyness(p, c.spot, c.strike, c.rate, c.dividend, c.tau);
    m.k = m.k0 - p.mu * c.tau;
    if (c.power) {
        const double root_strike = std::pow(c.strike, 1.0 / *c.power);
        m.k0a = log_forward_moneyness(p, c.spot, root_strike, c.rate, c.dividend, c.tau);
    } else {
        m.k0a = m.k0;
    }
    m.convergence_ratio = std::fabs(m.k0) / (p.delta * c.tau);
    return m;
}

GateOutcome convergence_gate(double k0, const NigParams& p, double tau) {
    const double ratio = std::fabs(k0) / (p.delta * tau);
    return {ratio < 1.0, ratio};
}

GateOutcome convergence_gate(const NigParams& p, const MarketContext& c) {
    return convergence_gate(moneyness(p, c).k0, p, c.tau);
}

bool MaturityCondition::admits(double tau) const {
    switch (regime) {
        case MoneynessRegime::in_the_money:
            return tau > rho_plus || tau < rho_minus;
        case MoneynessRegime::out_of_the_money:
            return tau > rho_minus || tau < rho_plus;
        case MoneynessRegime::at_the_money:
            return atm_satisfied;
    }
    return false;
}

double MaturityCondition::threshold() const {
    switch (regime) {
        case MoneynessRegime::in_the_money:
            return rho_plus;
        case MoneynessRegime::out_of_the_money:
            return rho_minus;
        case MoneynessRegime::at_the_money:
            return atm_satisfied ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

std::string MaturityCondition::describe() const {
    std::ostringstream os;
    switch (regime) {
        case MoneynessRegime::in_the_money:
            os << "ITM: tau > " << rho_plus << " or tau < " << rho_minus;
            break;
        case MoneynessRegime::out_of_the_money:
            os << "OTM: tau > " << rho_minus << " or tau < " << rho_plus;
            break;
        case MoneynessRegime::at_the_money:
            os << (atm_satisfied ? "ATM: all tau" : "ATM: no tau");
            break;
    }
    return os.str();
}

MaturityCondition accessible_maturities(const NigParams& p, const MarketContext& c) {
    MaturityCondition cond;
    const double log_moneyness = std::log(c.spot / c.strike);
    const double carry = c.rate - c.dividend + omega_without_mu(p);
    cond.rho_plus = log_moneyness / (p.delta - carry);
    cond.rho_minus = log_moneyness / (-p.delta - carry);
    if (log_moneyness > 0.0) {
        cond.regime = MoneynessRegime::in_the_money;
    } else if (log_moneyness < 0.0) {
        cond.regime = MoneynessRegime::out_of_the_money;
    } else {
        cond.regime = MoneynessRegime::at_the_money;
        cond.atm_satisfied = std::fabs(carry) / p.delta < 1.0;
    }
    return cond;
}

NigParams heston_frh_map(double sigma, double vol_of_vol, double rho) {
    if (!(sigma > 0.0) || !(vol_of_vol > 0.0)) {
        throw DomainError("heston_frh_map: sigma and vol-of-vol must be positive");
    }
    if (!(std::fabs(rho) < 1.0)) throw DomainError("heston_frh_map: |rho| must be below 1");
    const double gs = vol_of_vol * sigma;
    const double one_m_rho2 = 1.0 - rho * rho;
    const double denom = 2.0 * gs * one_m_rho2;
    NigParams p;
    p.alpha = std::sqrt(4.0 - 4.0 * rho * gs + gs * gs) / denom;
    p.beta = -(gs - 2.0 * rho) / denom;
    p.delta = sigma * std::sqrt(one_m_rho2) / vol_of_vol;
    p.mu = -sigma * rho / vol_of_vol;
    return p;
}

double variance_swap_multiplier(const NigParams& p) {
    if (p.beta != 0.0) throw DomainError("variance_swap_multiplier: requires beta = 0");
    if (!(p.alpha >= 1.0)) throw DomainError("variance_swap_multiplier: requires alpha >= 1");
    // 1/(alpha (alpha - sqrt(alpha^2-1))) rewritten without the cancellation.
    return 1.0 + std::sqrt(1.0 - 1.0 / (p.alpha * p.alpha));
}

SamplePath sample_increments(const NigParams& p, double dt, std::size_t count, std::uint64_t seed) {
    if (!(dt > 0.0)) throw DomainError("sample_increments: dt must be positive");
    if (count == 0) throw DomainError("sample_increments: count must be at least 1");
    SamplePath path;
    path.seed = seed;
    path.dt = dt;
    path.increments.resize(static_cast<Eigen::Index>(count));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;

    // Inverse Gaussian mixing law with mean delta dt / gamma and shape (delta dt)^2,
    // drawn with the Michael-Schucany-Haas root selection.
    const double scale = p.delta * dt;
    const double mean = scale / p.gamma();
    const double shape = scale * scale;
    const double drift = p.mu * dt;
    for (Eigen::Index i = 0; i < path.increments.size(); ++i) {
        const double chi = normal(rng);
        const double w = mean * chi * chi / shape;
        const double small_root = mean / (1.0 + 0.5 * w + std::sqrt(w + 0.25 * w * w));
        const double v = uniform(rng) <= mean / (mean + small_root) ? small_root
                                                                   : mean * mean / small_root;
        path.increments[i] = drift + p.beta * v + std::sqrt(v) * normal(rng);
    }
    return path;
}

}  // namespace nig
