#pragma once

// Closed-form residue series for path-independent payoffs under the
// exponential NIG model. Ranks are inclusive: rank n sums every free index
// over 0..n (European payoffs start the Bessel-order index at 1).

#include "nig/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nig {

enum class PayoffKind {
    asset_or_nothing_call,
    cash_or_nothing_call,
    cash_or_nothing_put,
    european_call,
    gap_call,
    power_asset_call,
    power_european_call,
    power_cash_call,
    log_call,
    log_put,
    log_contract,
    capped_cash_call,
    outside_cash_call,
};

std::string_view to_string(PayoffKind kind);
/// Accepts the names printed by to_string and a few short aliases (a/n, c/n, eur, ...).
std::optional<PayoffKind> parse_payoff_kind(std::string_view text);

/// The market strike is the trigger of gap calls and the lower strike K- of
/// capped/outside digitals; second_strike is the payment strike K1 (gap) or
/// the cap K+ (capped/outside). power is the exponent a of power payoffs.
struct PayoffSpec {
    PayoffKind kind = PayoffKind::european_call;
    std::optional<double> second_strike;
    std::optional<double> power;

    /// Throws std::invalid_argument on missing or inconsistent strikes and exponents.
    void validate(const MarketContext& context) const;
    /// Fills unset fields from context.strike2 / context.power.
    PayoffSpec resolved(const MarketContext& context) const;
};

struct SeriesOptions {
    double eps = 1e-10;
    /// Fixed inclusive rank; when unset the rank starts at n_eps and is extended
    /// until the outermost shell of terms falls below eps.
    std::optional<int> rank;
    /// Extend a fixed rank adaptively as well.
    bool extend_rank = false;
    /// Price even when the convergence gate fails; the bound becomes heuristic.
    bool override_gate = false;
    int max_rank = 256;
};

struct SeriesResult {
    double price = 0.0;
    int truncation_rank = 0;
    std::size_t terms_evaluated = 0;
    std::size_t zero_terms_skipped = 0;
    double error_bound = 0.0;
    bool error_bound_heuristic = false;
    /// The outermost shell of terms fell below eps times the payoff scale.
    bool converged = false;
    /// Sum of |terms| in the outermost shell, in price units.
    double last_shell = 0.0;
    GateOutcome gate;
};

/// n_eps = 2 ceil(log(alpha eps) / (2 log|k0/(delta tau)|)) + 1.
/// Throws GateViolation when |k0| >= delta tau.
int truncation_rank(const NigParams& params, const MarketContext& context, double eps);
int truncation_rank(double k0, const NigParams& params, double tau, double eps);

/// K alpha e^{(alpha delta - r) tau} / sqrt(pi) * eps (the strike factor is
/// dropped for cash digitals, whose payoff is one unit of cash).
double price_error_bound(const NigParams& params, const MarketContext& context, PayoffKind kind,
                         double eps);

/// Number of grid terms at inclusive rank n: (n+1)^2, n(n+1) or n+1.
std::size_t grid_size(PayoffKind kind, int rank);

/// Symmetric model (beta = 0), every payoff kind.
SeriesResult price_sym(const NigParams& params, const MarketContext& context,
                       const PayoffSpec& payoff, const SeriesOptions& options = {});

/// Asymmetric model: asset-or-nothing, European and cash-or-nothing calls.
SeriesResult price_asym(const NigParams& params, const MarketContext& context,
                        const PayoffSpec& payoff, const SeriesOptions& options = {});

/// price_sym when beta = 0, price_asym otherwise.
SeriesResult price(const NigParams& params, const MarketContext& context,
                   const PayoffSpec& payoff, const SeriesOptions& options = {});

/// Symmetric asset-or-nothing terms in price units, rows n1 and columns n2,
/// 0..n_max each. Column 0 sums to K times the cash-or-nothing call and the
/// remaining block to the European call.
Eigen::MatrixXd term_grid(const NigParams& params, const MarketContext& context, int n_max,
                          bool override_gate = false);

/// Spreadsheet-style CSV: header row of n2, one row per n1 led by its index.
void write_term_grid_csv(std::ostream& out, const Eigen::MatrixXd& grid);

/// Structurally null terms (Gamma poles) of the symmetric grid at rank n_max.
std::size_t null_term_count(PayoffKind kind, int n_max);

/// Symmetric European calls over many strikes at a fixed rank. The Bessel and
/// Gamma factors do not depend on the strike, so they are folded into one
/// coefficient per power of k0 and each strike costs a polynomial evaluation.
class EuropeanStrikeSweep {
public:
    EuropeanStrikeSweep(const NigParams& params, double spot, double rate, double dividend,
                        double tau, int rank);

    double price(double strike) const;
    Eigen::VectorXd prices(const Eigen::VectorXd& strikes) const;

    int rank() const { return rank_; }
    std::size_t grid_terms() const { return grid_terms_; }
    std::size_t null_terms() const { return null_terms_; }

private:
    NigParams params_;
    double spot_, rate_, dividend_, tau_;
    int rank_;
    std::size_t grid_terms_ = 0;
    std::size_t null_terms_ = 0;
    Eigen::VectorXd coefficients_;  // per n1, with 1/n1! and the alpha/sqrt(pi) factor
};

/// Leading-term ATMF approximation S delta tau e^{alpha delta tau} K_0(alpha delta tau) / pi.
/// Requires beta = 0 and spot equal to the forward-discounted strike.
double atmf_approx_call(const NigParams& params, const MarketContext& context);

struct ImpliedDelta {
    double delta = 0.0;
    /// sqrt(2 pi / tau) C / S
    double sigma_first_order = 0.0;
    /// Positive root X of X^2 - alpha sqrt(2 pi) (C/S) X - 1/8 = 0.
    double root = 0.0;
};

/// delta = 2 pi alpha / tau (C/S)^2 + 1 / (4 alpha tau) from an ATMF call price.
ImpliedDelta implied_delta_atmf(double alpha, double call_price, double spot, double tau);

}  // namespace nig
