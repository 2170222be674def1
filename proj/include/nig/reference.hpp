#pragma once

// Independent pricers used to cross-check the residue series: Lewis digital
// integrals, the damped Carr-Madan integral and its FFT strike grid, and
// terminal-value Monte Carlo.

#include "nig/model.hpp"
#include "nig/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace nig {

struct QuadratureConfig {
    double upper_bound = 1e4;
    /// Target on the price, not on the raw integral.
    double abs_tol = 1e-10;
    /// Relative to the payoff scale (spot for asset digitals, strike for calls, 1 for cash).
    double rel_tol = 1e-12;
    std::size_t max_subdivisions = 1'000'000;

    void validate() const;
};

struct OracleResult {
    double price = 0.0;
    double error_estimate = 0.0;
    /// |integral over [U, 2U]|, scaled like the price.
    double tail_estimate = 0.0;
    std::size_t intervals = 0;
    std::string method;
};

enum class DigitalKind { asset, cash };

/// Asset: S e^{-q tau} (1/2 + 1/pi int Re[e^{iuk} Psi_L(u - i) / (iu)] du);
/// cash:  e^{-r tau} (1/2 + 1/pi int Re[e^{iuk} Psi_L(u) / (iu)] du), k = log(S/K) + (r - q) tau.
OracleResult lewis_digital(const NigParams& params, const MarketContext& context, DigitalKind kind,
                           const QuadratureConfig& cfg = {});

/// Cash-or-nothing put from the same integral with the opposite sign.
OracleResult lewis_cash_put(const NigParams& params, const MarketContext& context,
                            const QuadratureConfig& cfg = {});

/// min(1.5, (alpha - beta - 1) / 2).
double default_damping(const NigParams& params);

/// e^{-a log K - r tau} / pi int Re[e^{-iu log K} Psi_CM(u - (a+1)i) / (a^2 + a - u^2 + i(2a+1)u)] du.
/// Throws DomainError unless 0 < damping < alpha - beta - 1.
OracleResult carr_madan_integral(const NigParams& params, const MarketContext& context,
                                 double damping, const QuadratureConfig& cfg = {});

struct FftConfig {
    std::size_t n_points = 4096;
    double eta = 0.25;
    /// Non-positive selects default_damping.
    double damping = 0.0;

    double lambda() const;
    void validate(const NigParams& params) const;
};

struct FftGrid {
    double lambda = 0.0;
    double damping = 0.0;
    Eigen::VectorXd log_strikes;
    Eigen::VectorXd prices;
    /// (strike, price) pairs whose strike lies in the requested window.
    std::vector<std::pair<double, double>> window;
};

/// Carr-Madan FFT with Simpson weights over log-strikes -lambda N / 2 + lambda (v - 1).
/// context.strike is ignored; strikes in [strike_lo, strike_hi] are collected in window.
FftGrid fft_strike_grid(const NigParams& params, const MarketContext& context, const FftConfig& cfg,
                        double strike_lo, double strike_hi);

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    double ci95_halfwidth = 0.0;
    std::size_t paths = 0;
    std::uint64_t seed = 0;
};

/// Discounted payoff mean over exact terminal draws S_T = S e^{(r - q + omega) tau + X_tau}.
/// Supports log_call, power_european_call, capped_cash_call, european_call,
/// cash_or_nothing_call and asset_or_nothing_call. Paths are drawn in fixed-size
/// blocks with seeds derived from the master seed, so the estimate does not
/// depend on the thread count (0 = hardware concurrency).
McResult mc_price(const NigParams& params, const MarketContext& context, const PayoffSpec& payoff,
                  std::size_t paths, std::uint64_t seed, unsigned threads = 0);

/// Seed of block b under the master seed (splitmix64 finaliser).
std::uint64_t block_seed(std::uint64_t master, std::uint64_t block);

inline constexpr std::size_t kMcBlockSize = 8192;

}  // namespace nig
