#pragma once

// The exponential NIG model: parameters, Levy symbol and characteristic
// functions, martingale adjustment, densities, moneyness and the
// convergence gate of the residue series, plus exact increment sampling.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace nig {

using Complex = std::complex<double>;

/// NIG(alpha, beta, delta, mu); delta and mu are per unit time.
struct NigParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double mu = 0.0;

    /// sqrt(alpha^2 - beta^2)
    double gamma() const;
    bool symmetric() const { return beta == 0.0; }
};

struct MarketContext {
    double spot = 0.0;
    double strike = 0.0;
    double rate = 0.0;
    double dividend = 0.0;
    double tau = 0.0;
    /// Gap payment strike K1, or the cap K+ of capped/outside digitals.
    std::optional<double> strike2;
    /// Exponent of power payoffs.
    std::optional<double> power;
};

/// Throws AdmissibilityError naming the violated constraint:
/// alpha > 0, delta > 0, -alpha < beta < alpha - 1 (which also gives |beta+1| < alpha).
void validate(const NigParams& params);

/// Throws AdmissibilityError unless spot, strikes, tau and power are positive.
void validate(const MarketContext& context);

/// psi(u) = i mu u - delta (sqrt(alpha^2 - (beta + iu)^2) - sqrt(alpha^2 - beta^2)).
/// Throws DomainError when the principal square root would leave the strip
/// |beta - Im u| <= sqrt(alpha^2 + Re(u)^2).
Complex levy_symbol(const NigParams& params, Complex u);

/// d psi / du, on the same strip.
Complex levy_symbol_derivative(const NigParams& params, Complex u);

enum class Normalization { raw, lewis, carr_madan };

/// raw: exp(t psi(u)); lewis: exp(i u omega t) exp(t psi(u));
/// carr_madan: exp(i u [log S + (r - q + omega) t]) exp(t psi(u)), which needs a context.
Complex characteristic(const NigParams& params, Complex u, double t, Normalization normalization,
                       const MarketContext* context = nullptr);

/// omega = -psi(-i) = -mu + delta (sqrt(alpha^2 - (beta+1)^2) - gamma).
double martingale_adjustment(const NigParams& params);

/// Density of X_t given X_0 = 0, i.e. of NIG(alpha, beta, delta t, mu t).
double density(const NigParams& params, double x, double t);

/// (alpha delta / pi) e^{beta x} K_1(alpha |x|) / |x|; DomainError at x = 0.
double levy_measure_density(const NigParams& params, double x);

/// Drift a of the Levy-Khintchine triplet (truncation function 1_{|x|<1}).
double triplet_drift(const NigParams& params);

struct Moneyness {
    double omega = 0.0;
    double gamma_sym = 0.0;
    double forward_strike = 0.0;
    double k = 0.0;
    double k0 = 0.0;
    /// k0 with the strike replaced by K^(1/a); equals k0 without a power.
    double k0a = 0.0;
    double convergence_ratio = 0.0;
};

Moneyness moneyness(const NigParams& params, const MarketContext& context);

/// k0 for an arbitrary strike, independent of mu.
double log_forward_moneyness(const NigParams& params, double spot, double strike, double rate,
                             double dividend, double tau);

struct GateOutcome {
    bool satisfied = false;
    double ratio = 0.0;  // |k0| / (delta tau)
};

/// The residue series converges iff |k0| / (delta tau) < 1.
GateOutcome convergence_gate(const NigParams& params, const MarketContext& context);
GateOutcome convergence_gate(double k0, const NigParams& params, double tau);

enum class MoneynessRegime { in_the_money, out_of_the_money, at_the_money };

/// Maturities for which the gate holds (mu taken as 0):
/// ITM: tau > rho_plus or tau < rho_minus; OTM: tau > rho_minus or tau < rho_plus;
/// ATM: independent of tau.
struct MaturityCondition {
    MoneynessRegime regime = MoneynessRegime::at_the_money;
    double rho_plus = 0.0;
    double rho_minus = 0.0;
    bool atm_satisfied = false;

    bool admits(double tau) const;
    /// The lower maturity bound of the accessible range (the "tau > ..." threshold).
    double threshold() const;
    std::string describe() const;
};

MaturityCondition accessible_maturities(const NigParams& params, const MarketContext& context);

/// NIG law of the fast-reverting Heston log-price per unit time.
NigParams heston_frh_map(double sigma, double vol_of_vol, double rho);

/// 1 / (alpha (alpha - sqrt(alpha^2 - 1))) for the symmetric model.
double variance_swap_multiplier(const NigParams& params);

struct SamplePath {
    Eigen::VectorXd increments;
    std::uint64_t seed = 0;
    double dt = 0.0;
};

/// i.i.d. NIG(alpha, beta, delta dt, mu dt) draws as a normal variance-mean
/// mixture with an inverse Gaussian mixing variable.
SamplePath sample_increments(const NigParams& params, double dt, std::size_t count,
                             std::uint64_t seed);

}  // namespace nig
