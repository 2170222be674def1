#pragma once

// Command-line front end. run() parses argv, dispatches one subcommand and
// returns the process exit code; all output goes through the given streams.

#include "nig/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace nig::cli {

enum ExitCode : int {
    kOk = 0,
    kGateViolation = 2,
    kConfigError = 3,
    kToleranceBreach = 4,
};

enum class Format { text, csv };

struct RunConfig {
    std::string command;
    std::string model_path;
    std::string market_path;
    std::string payoff = "european_call";
    double eps = 1e-10;
    std::optional<int> rank;
    bool extend_rank = false;
    bool override_gate = false;
    std::uint64_t seed = 20200601;
    std::size_t paths = 100000;
    unsigned threads = 0;
    std::size_t fft_n = 4096;
    double eta = 0.25;
    double damping = 0.0;
    std::optional<double> strike_lo;
    std::optional<double> strike_hi;
    double tolerance = 5e-4;
    std::string table = "all";
    std::size_t strikes = 300;
    Format format = Format::text;
    std::string out_path;
};

/// Work counts of a strike sweep priced by the series versus the FFT.
struct BenchReport {
    int rank = 0;
    std::size_t strikes = 0;
    std::size_t grid_terms = 0;
    std::size_t null_terms = 0;
    /// Non-null grid terms plus one Horner step per strike and power of k0.
    std::size_t series_work = 0;
    std::size_t fft_points = 0;
    /// N ceil(log2 N) butterfly operations plus N characteristic evaluations.
    std::size_t fft_work = 0;
    std::size_t fft_window_strikes = 0;
    double series_seconds = 0.0;
    double fft_seconds = 0.0;
};

/// Sweep of `strikes` log-spaced strikes over [lo, hi] at the given rank, against an
/// FFT grid with fft_points nodes and spacing eta.
BenchReport run_bench(const NigParams& params, const MarketContext& context, int rank, std::size_t strikes,
                      double lo, double hi, std::size_t fft_points, double eta);

/// The default bench setup: alpha = 40, delta = 25, S = 3000, r = 1%, tau = 1 month.
NigParams bench_params();
MarketContext bench_market();

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nig::cli
