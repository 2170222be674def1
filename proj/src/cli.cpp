#include "nig/cli.hpp"

#include "nig/config.hpp"
#include "nig/errors.hpp"
#include "nig/reference.hpp"
#include "nig/series.hpp"
#include "nig/tables.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

namespace nig::cli {
namespace {

using Clock = std::chrono::steady_clock;

std::string g10(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

struct Inputs {
    NigParams params;
    MarketContext market;
};

NigParams load_model(const RunConfig& cfg) {
    if (cfg.model_path.empty()) throw ConfigError("--model <path> is required");
    try {
        return params_from(read_key_values(cfg.model_path));
    } catch (const ConfigError& e) {
        throw ConfigError(cfg.model_path + ": " + e.what());
    }
}

MarketContext load_market(const RunConfig& cfg) {
    if (cfg.market_path.empty()) throw ConfigError("--market <path> is required");
    try {
        return market_from(read_key_values(cfg.market_path));
    } catch (const ConfigError& e) {
        throw ConfigError(cfg.market_path + ": " + e.what());
    }
}

Inputs load_inputs(const RunConfig& cfg) { return {load_model(cfg), load_market(cfg)}; }

PayoffSpec payoff_from(const RunConfig& cfg, const MarketContext& market) {
    const auto kind = parse_payoff_kind(cfg.payoff);
    if (!kind) throw ConfigError("unknown payoff '" + cfg.payoff + "'");
    PayoffSpec spec;
    spec.kind = *kind;
    spec = spec.resolved(market);
    try {
        spec.validate(market);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

SeriesOptions series_options(const RunConfig& cfg) {
    SeriesOptions o;
    o.eps = cfg.eps;
    o.rank = cfg.rank;
    o.extend_rank = cfg.extend_rank;
    o.override_gate = cfg.override_gate;
    return o;
}

int cmd_price(const RunConfig& cfg, std::ostream& out) {
    const Inputs in = load_inputs(cfg);
    const PayoffSpec spec = payoff_from(cfg, in.market);
    const SeriesResult r = price(in.params, in.market, spec, series_options(cfg));
    if (cfg.format == Format::csv) {
        out << "payoff,price,rank,terms_evaluated,zero_terms_skipped,error_bound,heuristic,converged,gate_ratio\n"
            << to_string(spec.kind) << ',' << g10(r.price) << ',' << r.truncation_rank << ',' << r.terms_evaluated
            << ',' << r.zero_terms_skipped << ',' << g10(r.error_bound) << ',' << (r.error_bound_heuristic ? 1 : 0)
            << ',' << (r.converged ? 1 : 0) << ',' << g10(r.gate.ratio) << '\n';
        return kOk;
    }
    out << "payoff           " << to_string(spec.kind) << '\n'
        << "model            " << (in.params.symmetric() ? "symmetric" : "asymmetric") << '\n'
        << "price            " << g10(r.price) << '\n'
        << "truncation rank  " << r.truncation_rank << '\n'
        << "terms evaluated  " << r.terms_evaluated << '\n'
        << "zero terms       " << r.zero_terms_skipped << '\n'
        << "error bound      " << g10(r.error_bound) << (r.error_bound_heuristic ? " (heuristic)" : "") << '\n'
        << "last shell       " << g10(r.last_shell) << (r.converged ? " (converged)" : " (not converged)") << '\n'
        << "gate             |k0|/(delta tau) = " << g10(r.gate.ratio)
        << (r.gate.satisfied ? " (satisfied)" : " (violated, overridden)") << '\n';
    return kOk;
}

struct Check {
    std::string oracle;
    double value = 0.0;
    double tolerance = 0.0;
};

Check oracle_for(const RunConfig& cfg, const NigParams& p, const MarketContext& c, const PayoffSpec& spec) {
    switch (spec.kind) {
        case PayoffKind::asset_or_nothing_call:
            return {"lewis", lewis_digital(p, c, DigitalKind::asset).price, cfg.tolerance};
        case PayoffKind::cash_or_nothing_call:
            return {"lewis", lewis_digital(p, c, DigitalKind::cash).price, cfg.tolerance};
        case PayoffKind::cash_or_nothing_put:
            return {"lewis", lewis_cash_put(p, c).price, cfg.tolerance};
        case PayoffKind::european_call: {
            const double a = cfg.damping > 0.0 ? cfg.damping : default_damping(p);
            return {"carr-madan", carr_madan_integral(p, c, a).price, cfg.tolerance};
        }
        case PayoffKind::gap_call: {
            const double asset = lewis_digital(p, c, DigitalKind::asset).price;
            const double cash = lewis_digital(p, c, DigitalKind::cash).price;
            return {"lewis", asset - *spec.second_strike * cash, cfg.tolerance};
        }
        case PayoffKind::log_call:
        case PayoffKind::power_european_call:
        case PayoffKind::capped_cash_call: {
            const McResult mc = mc_price(p, c, spec, cfg.paths, cfg.seed, cfg.threads);
            return {"monte-carlo", mc.estimate, 4.0 * mc.std_error};
        }
        default:
            throw ConfigError("no reference pricer for payoff '" + std::string(to_string(spec.kind)) + "'");
    }
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    const Inputs in = load_inputs(cfg);
    const PayoffSpec spec = payoff_from(cfg, in.market);
    const SeriesResult r = price(in.params, in.market, spec, series_options(cfg));
    const Check oracle = oracle_for(cfg, in.params, in.market, spec);
    const double diff = std::fabs(r.price - oracle.value);
    const bool ok = diff <= oracle.tolerance;
    if (cfg.format == Format::csv) {
        out << "payoff,series,oracle,method,abs_diff,tolerance,status\n"
            << to_string(spec.kind) << ',' << g10(r.price) << ',' << g10(oracle.value) << ',' << oracle.oracle << ','
            << g10(diff) << ',' << g10(oracle.tolerance) << ',' << (ok ? "ok" : "FAIL") << '\n';
    } else {
        out << "series   " << g10(r.price) << " (rank " << r.truncation_rank << ")\n"
            << "oracle   " << g10(oracle.value) << " (" << oracle.oracle << ")\n"
            << "abs diff " << g10(diff) << " tolerance " << g10(oracle.tolerance) << ' ' << (ok ? "ok" : "FAIL")
            << '\n';
    }
    return ok ? kOk : kToleranceBreach;
}

int cmd_fft(const RunConfig& cfg, std::ostream& out) {
    const Inputs in = load_inputs(cfg);
    FftConfig fc;
    fc.n_points = cfg.fft_n;
    fc.eta = cfg.eta;
    fc.damping = cfg.damping;
    try {
        fc.validate(in.params);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    const double lo = cfg.strike_lo.value_or(0.5 * in.market.strike);
    const double hi = cfg.strike_hi.value_or(2.0 * in.market.strike);
    const FftGrid grid = fft_strike_grid(in.params, in.market, fc, lo, hi);
    if (cfg.format == Format::text) {
        out << "# N=" << cfg.fft_n << " eta=" << g10(cfg.eta) << " lambda=" << g10(grid.lambda)
            << " damping=" << g10(grid.damping) << " strikes in [" << g10(lo) << ", " << g10(hi)
            << "]: " << grid.window.size() << '\n';
    }
    out << "strike,price\n";
    for (const auto& [k, v] : grid.window) out << g10(k) << ',' << g10(v) << '\n';
    return kOk;
}

int cmd_mc(const RunConfig& cfg, std::ostream& out) {
    const Inputs in = load_inputs(cfg);
    const PayoffSpec spec = payoff_from(cfg, in.market);
    McResult r;
    try {
        r = mc_price(in.params, in.market, spec, cfg.paths, cfg.seed, cfg.threads);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.format == Format::csv) {
        out << "estimate,std_error,ci95,paths,seed\n"
            << g10(r.estimate) << ',' << g10(r.std_error) << ',' << g10(r.ci95_halfwidth) << ',' << r.paths << ','
            << r.seed << '\n';
    } else {
        out << "estimate   " << g10(r.estimate) << '\n'
            << "std error  " << g10(r.std_error) << '\n'
            << "95% CI     [" << g10(r.estimate - r.ci95_halfwidth) << ", " << g10(r.estimate + r.ci95_halfwidth)
            << "]\n"
            << "paths      " << r.paths << '\n'
            << "seed       " << r.seed << '\n';
    }
    return kOk;
}

std::vector<int> table_ids(const std::string& which) {
    if (which == "all") return {1, 2, 3, 4, 5, 6};
    int id = 0;
    try {
        std::size_t used = 0;
        id = std::stoi(which, &used);
        if (used != which.size()) id = 0;
    } catch (const std::exception&) {
        id = 0;
    }
    if (id < 1 || id > 6) throw ConfigError("table id must be 1..6 or 'all', got '" + which + "'");
    return {id};
}

TableOptions table_options(const RunConfig& cfg) {
    TableOptions o;
    o.seed = cfg.seed;
    o.mc_paths = cfg.paths;
    return o;
}

void emit_tables(const RunConfig& cfg, const std::vector<int>& ids, std::ostream& out, std::size_t& failures) {
    bool header = true;
    for (int id : ids) {
        const TableReport rep = reproduce_table(id, table_options(cfg));
        failures += rep.failures();
        if (cfg.format == Format::csv) {
            write_table_csv(out, rep, header);
            header = false;
        } else {
            write_table_text(out, rep);
        }
    }
}

int cmd_table(const RunConfig& cfg, std::ostream& out) {
    std::size_t failures = 0;
    emit_tables(cfg, table_ids(cfg.table), out, failures);
    return kOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
    std::size_t failures = 0;
    for (int id : table_ids("all")) {
        const TableReport rep = reproduce_table(id, table_options(cfg));
        failures += rep.failures();
        char buf[160];
        std::snprintf(buf, sizeof buf, "table %d: %zu cell(s), max abs deviation %.3g, %s (%.3f s)\n", id,
                      rep.cells.size(), rep.max_abs_deviation(),
                      rep.all_pass() ? "ok" : (std::to_string(rep.failures()) + " failing").c_str(), rep.seconds);
        out << buf;
        for (const auto& c : rep.cells) {
            if (c.checked && !c.pass()) {
                out << "  FAIL " << c.row << " / " << c.column << ": expected " << g10(c.expected) << ", got "
                    << g10(c.computed);
                if (!c.note.empty()) out << " (" << c.note << ')';
                out << '\n';
            }
        }
    }
    return failures == 0 ? kOk : kToleranceBreach;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, bool fft_n_given) {
    const NigParams p = cfg.model_path.empty() ? bench_params() : load_model(cfg);
    const MarketContext c = cfg.market_path.empty() ? bench_market() : load_market(cfg);
    const int rank = cfg.rank.value_or(30);
    const double lo = cfg.strike_lo.value_or(2000.0);
    const double hi = cfg.strike_hi.value_or(5000.0);
    const std::size_t n = fft_n_given ? cfg.fft_n : 50000;
    const BenchReport b = run_bench(p, c, rank, cfg.strikes, lo, hi, n, cfg.eta);
    if (cfg.format == Format::csv) {
        out << "rank,strikes,grid_terms,null_terms,series_work,fft_points,fft_work,fft_window_strikes,"
               "series_seconds,fft_seconds\n"
            << b.rank << ',' << b.strikes << ',' << b.grid_terms << ',' << b.null_terms << ',' << b.series_work << ','
            << b.fft_points << ',' << b.fft_work << ',' << b.fft_window_strikes << ',' << g10(b.series_seconds) << ','
            << g10(b.fft_seconds) << '\n';
        return kOk;
    }
    out << "series rank " << b.rank << ": " << b.grid_terms << " grid terms, " << b.null_terms << " null, "
        << b.grid_terms - b.null_terms << " evaluated\n"
        << "series sweep of " << b.strikes << " strikes: work " << b.series_work << ", " << g10(b.series_seconds)
        << " s\n"
        << "fft N=" << b.fft_points << ": work " << b.fft_work << ", " << b.fft_window_strikes << " strikes in ["
        << g10(lo) << ", " << g10(hi) << "], " << g10(b.fft_seconds) << " s\n";
    return kOk;
}

int cmd_grid(const RunConfig& cfg, std::ostream& out) {
    const Inputs in = load_inputs(cfg);
    const int n_max = cfg.rank.value_or(10);
    write_term_grid_csv(out, term_grid(in.params, in.market, n_max, cfg.override_gate));
    return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--model", cfg.model_path, "model parameter file (alpha, beta, delta, mu)");
    sub->add_option("--market", cfg.market_path, "market file (spot, strike, strike2, power, rate, dividend, tau)");
    sub->add_option("--format", cfg.format, "text or csv")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::text}, {"csv", Format::csv}},
                                            CLI::ignore_case));
    sub->add_option("--out", cfg.out_path, "write output to this file instead of stdout");
}

void add_series(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--payoff", cfg.payoff, "payoff kind")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "truncation tolerance in (0, 1)")->capture_default_str();
    sub->add_option("--rank", cfg.rank, "fixed inclusive truncation rank")->check(CLI::PositiveNumber);
    sub->add_flag("--extend-rank", cfg.extend_rank, "extend a fixed rank until the last shell is below eps");
    sub->add_flag("--override-gate", cfg.override_gate, "price even when |k0|/(delta tau) >= 1");
}

void add_mc(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    sub->add_option("--paths", cfg.paths, "Monte Carlo paths")->capture_default_str()->check(CLI::Range(2ul, ~0ul));
    sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
}

void add_fft(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--fft-n", cfg.fft_n, "FFT points")->capture_default_str();
    sub->add_option("--eta", cfg.eta, "integration spacing")->capture_default_str();
    sub->add_option("--damping", cfg.damping, "Carr-Madan damping (default min(1.5, (alpha-beta-1)/2))");
    sub->add_option("--strike-lo", cfg.strike_lo, "lower end of the strike window");
    sub->add_option("--strike-hi", cfg.strike_hi, "upper end of the strike window");
}

}  // namespace

NigParams bench_params() { return {40.0, 0.0, 25.0, 0.0}; }
MarketContext bench_market() { return {3000.0, 3000.0, 0.01, 0.0, 1.0 / 12.0, {}, {}}; }

BenchReport run_bench(const NigParams& p, const MarketContext& c, int rank, std::size_t strikes, double lo,
                      double hi, std::size_t fft_points, double eta) {
    if (strikes < 2) throw std::invalid_argument("run_bench: need at least two strikes");
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("run_bench: invalid strike window");
    BenchReport b;
    b.rank = rank;
    b.strikes = strikes;
    b.fft_points = fft_points;

    const auto t0 = Clock::now();
    const EuropeanStrikeSweep sweep(p, c.spot, c.rate, c.dividend, c.tau, rank);
    Eigen::VectorXd ks = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(strikes), std::log(lo), std::log(hi));
    ks = ks.array().exp();
    const Eigen::VectorXd prices = sweep.prices(ks);
    b.series_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    b.grid_terms = sweep.grid_terms();
    b.null_terms = sweep.null_terms();
    b.series_work = (b.grid_terms - b.null_terms) + strikes * static_cast<std::size_t>(rank + 1);
    if (!prices.allFinite()) throw std::runtime_error("run_bench: series sweep produced non-finite prices");

    FftConfig fc;
    fc.n_points = fft_points;
    fc.eta = eta;
    const auto t1 = Clock::now();
    const FftGrid grid = fft_strike_grid(p, c, fc, lo, hi);
    b.fft_seconds = std::chrono::duration<double>(Clock::now() - t1).count();
    b.fft_window_strikes = grid.window.size();
    const auto log2n = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(fft_points))));
    b.fft_work = fft_points * log2n + fft_points;
    return b;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Option pricing under the exponential NIG model by residue series, with reference pricers"};
    app.name("nigprice");
    app.require_subcommand(1);

    auto* price_cmd = app.add_subcommand("price", "price one instrument by the residue series");
    add_common(price_cmd, cfg);
    add_series(price_cmd, cfg);

    auto* table_cmd = app.add_subcommand("table", "regenerate a built-in reference table and diff it");
    table_cmd->add_option("id", cfg.table, "1..6 or all")->capture_default_str();
    add_common(table_cmd, cfg);
    add_mc(table_cmd, cfg);

    auto* validate_cmd = app.add_subcommand("validate", "compare the series price with an independent pricer");
    add_common(validate_cmd, cfg);
    add_series(validate_cmd, cfg);
    add_mc(validate_cmd, cfg);
    validate_cmd->add_option("--damping", cfg.damping, "Carr-Madan damping");
    validate_cmd->add_option("--tol", cfg.tolerance, "absolute tolerance for quadrature oracles")
        ->capture_default_str();

    auto* fft_cmd = app.add_subcommand("fft", "Carr-Madan FFT strike grid as CSV");
    add_common(fft_cmd, cfg);
    add_fft(fft_cmd, cfg);

    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo price with confidence interval");
    add_common(mc_cmd, cfg);
    add_mc(mc_cmd, cfg);
    mc_cmd->add_option("--payoff", cfg.payoff, "payoff kind")->capture_default_str();

    auto* check_cmd = app.add_subcommand("check", "regenerate every table and report failing cells");
    add_common(check_cmd, cfg);
    add_mc(check_cmd, cfg);

    auto* bench_cmd = app.add_subcommand("bench", "series strike sweep versus FFT work counts");
    add_common(bench_cmd, cfg);
    add_fft(bench_cmd, cfg);
    bench_cmd->add_option("--rank", cfg.rank, "series rank (default 30)");
    bench_cmd->add_option("--strikes", cfg.strikes, "strikes in the sweep")->capture_default_str();

    auto* grid_cmd = app.add_subcommand("grid", "symmetric asset-or-nothing term grid as CSV");
    add_common(grid_cmd, cfg);
    grid_cmd->add_option("--rank", cfg.rank, "largest n1 and n2 (default 10)");
    grid_cmd->add_flag("--override-gate", cfg.override_gate, "emit terms even when the gate fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.out_path.empty()) {
        file.open(cfg.out_path);
        if (!file) {
            err << "error: cannot write '" << cfg.out_path << "'\n";
            return kConfigError;
        }
        sink = &file;
    }

    try {
        if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("--eps must lie in (0, 1)");
        if (*price_cmd) return cmd_price(cfg, *sink);
        if (*table_cmd) return cmd_table(cfg, *sink);
        if (*validate_cmd) return cmd_validate(cfg, *sink);
        if (*fft_cmd) return cmd_fft(cfg, *sink);
        if (*mc_cmd) return cmd_mc(cfg, *sink);
        if (*check_cmd) return cmd_check(cfg, *sink);
        if (*bench_cmd) return cmd_bench(cfg, *sink, bench_cmd->count("--fft-n") > 0);
        if (*grid_cmd) return cmd_grid(cfg, *sink);
    } catch (const GateViolation& e) {
        err << "error: " << e.what() << '\n';
        return kGateViolation;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const AdmissibilityError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kConfigError;
}

}  // namespace nig::cli
