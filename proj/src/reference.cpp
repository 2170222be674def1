#include "nig/reference.hpp"

#include "nig/errors.hpp"
#include "nig/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/FFT>

namespace nig {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

struct Integrated {
    QuadratureResult body;
    double tail = 0.0;
};

template <class F>
Integrated integrate_half_line(F&& f, const QuadratureConfig& cfg, double tol) {
    QuadratureOptions opts;
    opts.abs_tol = tol;
    opts.max_subdivisions = cfg.max_subdivisions;
    // Geometric panels so the initial rule sees the peak near u = 0.
    std::vector<double> points{0.0};
    for (double x = 1.0 / 64.0; x < cfg.upper_bound; x *= 2.0) points.push_back(x);
    points.push_back(cfg.upper_bound);
    Integrated out;
    out.body = integrate(f, points, opts);
    if (!out.body.converged && out.body.intervals >= cfg.max_subdivisions) {
        throw QuadratureError("quadrature hit the subdivision cap before reaching tolerance");
    }
    QuadratureOptions tail_opts;
    tail_opts.abs_tol = tol;
    tail_opts.max_subdivisions = 200;
    out.tail = std::fabs(integrate(f, cfg.upper_bound, 2.0 * cfg.upper_bound, tail_opts).value);
    return out;
}

// Lewis integrand Im[e^{iuk} Psi_L(u + shift)] / u with its limit at u = 0.
OracleResult lewis_integral(const NigParams& p, const MarketContext& c, Complex shift, double scale,
                            double sign, const QuadratureConfig& cfg, const char* method) {
    validate(p);
    validate(c);
    cfg.validate();
    const double tau = c.tau;
    const double k = std::log(c.spot / c.strike) + (c.rate - c.dividend) * tau;
    const double omega = martingale_adjustment(p);
    const double limit = k + omega * tau + tau * levy_symbol_derivative(p, shift).imag();
    auto f = [&](double u) {
        if (u < 1e-8) return limit;
        const Complex v = u + shift;
        const Complex e = kI * u * k + kI * v * omega * tau + tau * levy_symbol(p, v);
        return std::exp(e).imag() / u;
    };
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * scale) * kPi / scale;
    const Integrated r = integrate_half_line(f, cfg, tol);
    OracleResult out;
    out.price = scale * (0.5 + sign * r.body.value / kPi);
    out.error_estimate = scale * r.body.abs_error / kPi;
    out.tail_estimate = scale * r.tail / kPi;
    out.intervals = r.body.intervals;
    out.method = method;
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0) return;
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }
};

}  // namespace

void QuadratureConfig::validate() const {
    if (!(upper_bound > 0.0)) throw std::invalid_argument("quadrature upper_bound must be positive");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("quadrature abs_tol must be positive");
    if (rel_tol < 0.0) throw std::invalid_argument("quadrature rel_tol must be non-negative");
    if (max_subdivisions == 0) throw std::invalid_argument("quadrature max_subdivisions must be positive");
}

OracleResult lewis_digital(const NigParams& params, const MarketContext& context, DigitalKind kind,
                           const QuadratureConfig& cfg) {
    if (kind == DigitalKind::asset) {
        const double scale = context.spot * std::exp(-context.dividend * context.tau);
        return lewis_integral(params, context, Complex(0.0, -1.0), scale, 1.0, cfg, "lewis-asset");
    }
    const double scale = std::exp(-context.rate * context.tau);
    return lewis_integral(params, context, Complex(0.0, 0.0), scale, 1.0, cfg, "lewis-cash");
}

OracleResult lewis_cash_put(const NigParams& params, const MarketContext& context,
                            const QuadratureConfig& cfg) {
    const double scale = std::exp(-context.rate * context.tau);
    return lewis_integral(params, context, Complex(0.0, 0.0), scale, -1.0, cfg, "lewis-cash-put");
}

double default_damping(const NigParams& params) {
    return std::min(1.5, 0.5 * (params.alpha - params.beta - 1.0));
}

OracleResult carr_madan_integral(const NigParams& p, const MarketContext& c, double a,
                                 const QuadratureConfig& cfg) {
    validate(p);
    validate(c);
    cfg.validate();
    if (!(a > 0.0 && a < p.alpha - p.beta - 1.0)) {
        throw DomainError("carr_madan_integral: damping must lie in (0, alpha - beta - 1)");
    }
    const double tau = c.tau;
    const double log_k = std::log(c.strike);
    const double drift = std::log(c.spot) + (c.rate - c.dividend + martingale_adjustment(p)) * tau;
    // e^{-a log K - r tau} is folded into the exponent so that S^{a+1} never appears on its own.
    auto f = [&](double u) {
        const Complex v(u, -(a + 1.0));
        const Complex e = -kI * u * log_k - a * log_k - c.rate * tau + kI * v * drift +
                          tau * levy_symbol(p, v);
        const Complex denom(a * a + a - u * u, (2.0 * a + 1.0) * u);
        return (std::exp(e) / denom).real();
    };
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * c.strike) * kPi;
    const Integrated r = integrate_half_line(f, cfg, tol);
    OracleResult out;
    out.price = r.body.value / kPi;
    out.error_estimate = r.body.abs_error / kPi;
    out.tail_estimate = r.tail / kPi;
    out.intervals = r.body.intervals;
    out.method = "carr-madan";
    return out;
}

double FftConfig::lambda() const { return 2.0 * kPi / (static_cast<double>(n_points) * eta); }

void FftConfig::validate(const NigParams& params) const {
    if (n_points < 2) throw std::invalid_argument("fft n_points must be at least 2");
    if (!(eta > 0.0)) throw std::invalid_argument("fft eta must be positive");
    const double a = damping > 0.0 ? damping : default_damping(params);
    if (!(a > 0.0 && a < params.alpha - params.beta - 1.0)) {
        throw DomainError("fft damping must lie in (0, alpha - beta - 1)");
    }
}

FftGrid fft_strike_grid(const NigParams& p, const MarketContext& c, const FftConfig& cfg,
                        double strike_lo, double strike_hi) {
    validate(p);
    cfg.validate(p);
    const std::size_t n = cfg.n_points;
    const double a = cfg.damping > 0.0 ? cfg.damping : default_damping(p);
    const double eta = cfg.eta;
    const double lambda = cfg.lambda();
    const double b = 0.5 * lambda * static_cast<double>(n);
    const double tau = c.tau;
    const double drift = std::log(c.spot) + (c.rate - c.dividend + martingale_adjustment(p)) * tau;

    std::vector<Complex> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double u = eta * static_cast<double>(j);
        const Complex v(u, -(a + 1.0));
        const Complex psi_cm = std::exp(kI * v * drift + tau * levy_symbol(p, v));
        const Complex denom(a * a + a - u * u, (2.0 * a + 1.0) * u);
        // (3 + (-1)^j - delta_{j-1}) / 3 with the 1-based j of the textbook rule.
        const double simpson = (3.0 + ((j % 2 == 0) ? -1.0 : 1.0) - (j == 0 ? 1.0 : 0.0)) / 3.0;
        x[j] = std::exp(kI * b * u) * psi_cm / denom * eta * simpson;
    }
    Eigen::FFT<double> fft;
    std::vector<Complex> y;
    fft.fwd(y, x);

    FftGrid out;
    out.lambda = lambda;
    out.damping = a;
    out.log_strikes.resize(static_cast<Eigen::Index>(n));
    out.prices.resize(static_cast<Eigen::Index>(n));
    for (std::size_t v = 0; v < n; ++v) {
        const double kappa = -b + lambda * static_cast<double>(v);
        const double price = std::exp(-a * kappa - c.rate * tau) / kPi * y[v].real();
        out.log_strikes[static_cast<Eigen::Index>(v)] = kappa;
        out.prices[static_cast<Eigen::Index>(v)] = price;
        const double strike = std::exp(kappa);
        if (strike >= strike_lo && strike <= strike_hi) out.window.emplace_back(strike, price);
    }
    return out;
}

std::uint64_t block_seed(std::uint64_t master, std::uint64_t block) {
    return splitmix64(master ^ splitmix64(block));
}

McResult mc_price(const NigParams& p, const MarketContext& c, const PayoffSpec& payoff_in,
                  std::size_t paths, std::uint64_t seed, unsigned threads) {
    validate(p);
    validate(c);
    if (paths < 2) throw std::invalid_argument("mc_price: paths must be at least 2");
    const PayoffSpec payoff = payoff_in.resolved(c);
    payoff.validate(c);
    switch (payoff.kind) {
        case PayoffKind::log_call:
        case PayoffKind::power_european_call:
        case PayoffKind::capped_cash_call:
        case PayoffKind::european_call:
        case PayoffKind::cash_or_nothing_call:
        case PayoffKind::asset_or_nothing_call:
            break;
        default:
            throw std::invalid_argument("mc_price: unsupported payoff " + std::string(to_string(payoff.kind)));
    }

    const double tau = c.tau;
    const double disc = std::exp(-c.rate * tau);
    const double log_fwd = std::log(c.spot) + (c.rate - c.dividend + martingale_adjustment(p)) * tau;
    const double log_k = std::log(c.strike);
    auto discounted_payoff = [&](double x) {
        const double log_st = log_fwd + x;
        switch (payoff.kind) {
            case PayoffKind::log_call:
                return disc * std::max(log_st - log_k, 0.0);
            case PayoffKind::power_european_call:
                return disc * std::max(std::exp(*payoff.power * log_st) - c.strike, 0.0);
            case PayoffKind::capped_cash_call: {
                const double st = std::exp(log_st);
                return (st > c.strike && st < *payoff.second_strike) ? disc : 0.0;
            }
            case PayoffKind::european_call:
                return disc * std::max(std::exp(log_st) - c.strike, 0.0);
            case PayoffKind::cash_or_nothing_call:
                return log_st > log_k ? disc : 0.0;
            case PayoffKind::asset_or_nothing_call:
                return log_st > log_k ? disc * std::exp(log_st) : 0.0;
            default:
                return 0.0;
        }
    };

    const std::size_t blocks = (paths + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<Moments> per_block(blocks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
            const std::size_t count = std::min(kMcBlockSize, paths - b * kMcBlockSize);
            const SamplePath path = sample_increments(p, tau, count, block_seed(seed, b));
            Moments m;
            for (Eigen::Index i = 0; i < path.increments.size(); ++i) m.push(discounted_payoff(path.increments[i]));
            per_block[b] = m;
        }
    };
    unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, blocks));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Moments total;
    for (const Moments& m : per_block) total.merge(m);
    McResult out;
    out.estimate = total.mean;
    out.std_error = std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n));
    out.ci95_halfwidth = 1.96 * out.std_error;
    out.paths = paths;
    out.seed = seed;
    return out;
}

}  // namespace nig
