#include "nig/series.hpp"

#include "nig/errors.hpp"
#include "nig/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nig {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(std::numbers::pi);

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

// sign == 0 marks an exact zero.
struct SignedLog {
    double log_abs = 0.0;
    int sign = 0;
};

SignedLog log_recip_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return {};
    int sign = 1;
    if (x < 0.0) sign = (static_cast<long long>(std::ceil(-x)) % 2 == 1) ? -1 : 1;
    return {-log_abs_gamma(x), sign};
}

// x^k / k! for k = 0..n; 0^0 = 1.
std::vector<double> scaled_powers(double x, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    out[0] = 1.0;
    for (int k = 1; k <= n; ++k) out[k] = out[k - 1] * x / k;
    return out;
}

bool strike_denominated(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::asset_or_nothing_call:
        case PayoffKind::european_call:
        case PayoffKind::gap_call:
        case PayoffKind::power_asset_call:
        case PayoffKind::power_european_call:
            return true;
        default:
            return false;
    }
}

bool double_grid(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::asset_or_nothing_call:
        case PayoffKind::gap_call:
        case PayoffKind::power_asset_call:
        case PayoffKind::european_call:
        case PayoffKind::power_european_call:
            return true;
        default:
            return false;
    }
}

// Symmetric kernel: for m = n1 - n2 in [-N, N],
// 1/Gamma(1 - m/2) e^z K_{(m+1)/2}(z) (delta tau / 2 alpha)^{(1-m)/2} in signed log form.
class SymKernel {
public:
    SymKernel(const NigParams& p, double tau, int rank) : rank_(rank), v_(2 * rank + 1) {
        const double z = p.alpha * p.delta * tau;
        const double log_h = std::log(p.delta * tau / (2.0 * p.alpha));
        for (int m = -rank; m <= rank; ++m) {
            SignedLog rg = log_recip_gamma(1.0 - 0.5 * m);
            if (rg.sign != 0) {
                rg.log_abs += log_bessel_k_scaled(0.5 * (m + 1), z) + 0.5 * (1 - m) * log_h;
            }
            v_[m + rank] = rg;
        }
    }

    const SignedLog& at(int m) const { return v_[m + rank_]; }
    double value(int m) const {
        const SignedLog& s = at(m);
        return s.sign == 0 ? 0.0 : s.sign * std::exp(s.log_abs);
    }

private:
    int rank_;
    std::vector<SignedLog> v_;
};

struct SeriesSum {
    double value = 0.0;
    double shell = 0.0;  // sum of |terms| with max index >= rank - 1
    std::size_t evaluated = 0;
    std::size_t zeros = 0;
};

// sum_{n1=0..N} sum_{n2=lo..N} w(n2) a^{n2} k0^{n1}/n1! V(n1 - n2), with w = column0_weight at n2 = 0.
SeriesSum sym_double_sum(const SymKernel& ker, double k0, double a, int lo, int rank,
                         double column0_weight) {
    const std::vector<double> kp = scaled_powers(k0, rank);
    std::vector<double> ap(static_cast<std::size_t>(rank) + 1, 1.0);
    for (int n = 1; n <= rank; ++n) ap[n] = ap[n - 1] * a;

    std::vector<Neumaier> diagonals(static_cast<std::size_t>(2 * rank) + 1);
    SeriesSum out;
    for (int n1 = 0; n1 <= rank; ++n1) {
        for (int n2 = lo; n2 <= rank; ++n2) {
            const SignedLog& v = ker.at(n1 - n2);
            if (v.sign == 0) {
                ++out.zeros;
                continue;
            }
            ++out.evaluated;
            double term = kp[n1] * ap[n2] * v.sign * std::exp(v.log_abs);
            if (n2 == 0) term *= column0_weight;
            diagonals[n1 + n2].add(term);
            if (std::max(n1, n2) >= rank - 1) out.shell += std::fabs(term);
        }
    }
    Neumaier total;
    for (const auto& d : diagonals) total.add(d.value());
    out.value = total.value();
    return out;
}

// Odd part of the cash-or-nothing series, sum_{n=1..N} k0^n/n! V(n); the n = 0 term is 1/2.
SeriesSum sym_cash_odd_sum(const SymKernel& ker, double k0, int rank) {
    const std::vector<double> kp = scaled_powers(k0, rank);
    SeriesSum out;
    out.evaluated = 1;  // the n = 0 term, taken in closed form
    Neumaier total;
    for (int n = 1; n <= rank; ++n) {
        const SignedLog& v = ker.at(n);
        if (v.sign == 0) {
            ++out.zeros;
            continue;
        }
        ++out.evaluated;
        const double term = kp[n] * v.sign * std::exp(v.log_abs);
        total.add(term);
        if (n >= rank - 1) out.shell += std::fabs(term);
    }
    out.value = total.value();
    return out;
}

// sum_{n=0..N} (-1)^{n-1} k0^{2n} / (n! (2n-1)) e^z K_n(z) (2 delta tau / alpha)^{1-n}.
SeriesSum sym_log_sum(const NigParams& p, double tau, double k0, int rank) {
    const double z = p.alpha * p.delta * tau;
    const double log_g = std::log(2.0 * p.delta * tau / p.alpha);
    const std::vector<double> kp = scaled_powers(k0 * k0, rank);
    SeriesSum out;
    Neumaier total;
    for (int n = 0; n <= rank; ++n) {
        ++out.evaluated;
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        const double mag = std::exp(log_bessel_k_scaled(static_cast<double>(n), z) + (1 - n) * log_g);
        const double term = sign * kp[n] * mag / (2.0 * n - 1.0);
        total.add(term);
        if (n >= rank - 1) out.shell += std::fabs(term);
    }
    out.value = total.value();
    return out;
}

// Asymmetric kernel. With j = -n1 + n2 + n3 the Gamma, Bessel and (delta tau/2 alpha) factors
// depend on j alone; the Pochhammer symbol (n3 - n1 + 1)_{n2} is tabulated over its two arguments.
class AsymKernel {
public:
    AsymKernel(const NigParams& p, double tau, int rank)
        : rank_(rank), g_(3 * rank + 1), poch_((2 * rank + 1) * (rank + 1)) {
        const double z = p.alpha * p.delta * tau;
        const double log_h = std::log(p.delta * tau / (2.0 * p.alpha));
        for (int j = -rank; j <= 2 * rank; ++j) {
            SignedLog rg = log_recip_gamma(1.0 + 0.5 * j);
            if (rg.sign != 0) {
                rg.log_abs += log_bessel_k_scaled(0.5 * (1 - j), z) + 0.5 * (j + 1) * log_h;
            }
            g_[j + rank] = rg;
        }
        for (int a = 1 - rank; a <= rank + 1; ++a) {
            SignedLog acc{0.0, 1};
            poch_at(a, 0) = acc;
            for (int n = 1; n <= rank; ++n) {
                const int factor = a + n - 1;
                if (factor == 0 || acc.sign == 0) {
                    acc = {};
                } else {
                    acc.log_abs += std::log(std::fabs(static_cast<double>(factor)));
                    if (factor < 0) acc.sign = -acc.sign;
                }
                poch_at(a, n) = acc;
            }
        }
    }

    const SignedLog& g(int j) const { return g_[j + rank_]; }
    const SignedLog& poch(int a, int n) const {
        return poch_[static_cast<std::size_t>(a - 1 + rank_) * (rank_ + 1) + n];
    }

private:
    SignedLog& poch_at(int a, int n) {
        return poch_[static_cast<std::size_t>(a - 1 + rank_) * (rank_ + 1) + n];
    }

    int rank_;
    std::vector<SignedLog> g_;
    std::vector<SignedLog> poch_;
};

// log|x^k / k!| and its sign; sign 0 for x = 0, k > 0.
std::vector<SignedLog> log_scaled_powers(double x, int n) {
    std::vector<SignedLog> out(static_cast<std::size_t>(n) + 1);
    out[0] = {0.0, 1};
    const double lx = std::log(std::fabs(x));
    for (int k = 1; k <= n; ++k) {
        if (x == 0.0) {
            out[k] = {};
        } else {
            out[k] = {out[k - 1].log_abs + lx - std::log(static_cast<double>(k)),
                      x < 0.0 ? -out[k - 1].sign : out[k - 1].sign};
        }
    }
    return out;
}

SeriesSum asym_sum(const AsymKernel& ker, double k0, double beta, int n3_lo, int n3_hi, int rank) {
    // Pochhammer and Bessel factors overflow at high rank while the powers underflow,
    // so every factor stays in log form until the product is formed.
    const std::vector<SignedLog> kp = log_scaled_powers(k0, rank);
    const std::vector<SignedLog> bp = log_scaled_powers(beta, rank);
    std::vector<Neumaier> shells(static_cast<std::size_t>(3 * rank) + 1);
    SeriesSum out;
    for (int n1 = 0; n1 <= rank; ++n1) {
        for (int n2 = 0; n2 <= rank; ++n2) {
            for (int n3 = n3_lo; n3 <= n3_hi; ++n3) {
                const SignedLog& g = ker.g(n2 + n3 - n1);
                const SignedLog& q = ker.poch(n3 - n1 + 1, n2);
                if (g.sign == 0 || q.sign == 0 || bp[n2].sign == 0) {
                    ++out.zeros;
                    continue;
                }
                ++out.evaluated;
                if (kp[n1].sign == 0) continue;
                const double term = (kp[n1].sign * bp[n2].sign * g.sign * q.sign) *
                                    std::exp(kp[n1].log_abs + bp[n2].log_abs + g.log_abs + q.log_abs);
                shells[n1 + n2 + n3].add(term);
                if (std::max({n1, n2, n3}) >= rank - 1) out.shell += std::fabs(term);
            }
        }
    }
    Neumaier total;
    for (const auto& s : shells) total.add(s.value());
    out.value = total.value();
    return out;
}

std::string gate_message(double ratio, const NigParams& p, const MarketContext& c) {
    std::ostringstream os;
    os << "convergence gate violated: |k0|/(delta tau) = " << ratio << " >= 1";
    const MaturityCondition cond = accessible_maturities(p, c);
    os << " (rho+ = " << cond.rho_plus << ", rho- = " << cond.rho_minus << "; " << cond.describe()
       << ")";
    return os.str();
}

double log_prefactor(const NigParams& p, const MarketContext& c, PayoffKind kind) {
    const double scale = strike_denominated(kind) ? c.strike : 1.0;
    return std::log(scale) + std::log(p.alpha) + (p.gamma() * p.delta - c.rate) * c.tau -
           std::log(kSqrtPi);
}

struct Plan {
    GateOutcome gate;
    int n_eps = 0;
    int start = 0;
    bool adaptive = false;
};

Plan plan_rank(const std::vector<double>& k0s, const NigParams& p, const MarketContext& c,
               const SeriesOptions& opt) {
    if (!(opt.eps > 0.0 && opt.eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    Plan plan;
    plan.gate.satisfied = true;
    for (double k0 : k0s) {
        const GateOutcome g = convergence_gate(k0, p, c.tau);
        plan.gate.ratio = std::max(plan.gate.ratio, g.ratio);
        plan.gate.satisfied = plan.gate.satisfied && g.satisfied;
    }
    if (!plan.gate.satisfied && !opt.override_gate) {
        throw GateViolation(gate_message(plan.gate.ratio, p, c), plan.gate.ratio);
    }
    if (plan.gate.satisfied) {
        for (double k0 : k0s) plan.n_eps = std::max(plan.n_eps, truncation_rank(k0, p, c.tau, opt.eps));
    }
    if (opt.rank) {
        if (*opt.rank < 1) throw std::invalid_argument("rank must be at least 1");
        plan.start = *opt.rank;
        plan.adaptive = opt.extend_rank && plan.gate.satisfied;
    } else {
        plan.start = plan.gate.satisfied ? std::max(plan.n_eps, 1) : 31;
        plan.adaptive = plan.gate.satisfied;
    }
    plan.start = std::min(plan.start, std::max(opt.max_rank, 1));
    return plan;
}

// Runs evaluate(rank) -> SeriesResult, doubling the rank while the outermost shell exceeds tol.
template <class Eval>
SeriesResult run_adaptive(const Plan& plan, const SeriesOptions& opt, double tol, Eval&& evaluate) {
    int rank = plan.start;
    SeriesResult r;
    while (true) {
        r = evaluate(rank);
        r.truncation_rank = rank;
        r.converged = r.last_shell <= tol;
        if (r.converged || !plan.adaptive || rank >= opt.max_rank) break;
        rank = std::min(2 * rank, opt.max_rank);
    }
    r.gate = plan.gate;
    return r;
}

}  // namespace

std::string_view to_string(PayoffKind kind) {
    switch (kind) {
        case PayoffKind::asset_or_nothing_call: return "asset_or_nothing_call";
        case PayoffKind::cash_or_nothing_call: return "cash_or_nothing_call";
        case PayoffKind::cash_or_nothing_put: return "cash_or_nothing_put";
        case PayoffKind::european_call: return "european_call";
        case PayoffKind::gap_call: return "gap_call";
        case PayoffKind::power_asset_call: return "power_asset_call";
        case PayoffKind::power_european_call: return "power_european_call";
        case PayoffKind::power_cash_call: return "power_cash_call";
        case PayoffKind::log_call: return "log_call";
        case PayoffKind::log_put: return "log_put";
        case PayoffKind::log_contract: return "log_contract";
        case PayoffKind::capped_cash_call: return "capped_cash_call";
        case PayoffKind::outside_cash_call: return "outside_cash_call";
    }
    return "unknown";
}

std::optional<PayoffKind> parse_payoff_kind(std::string_view text) {
    struct Alias {
        std::string_view name;
        PayoffKind kind;
    };
    static constexpr Alias aliases[] = {
        {"a/n", PayoffKind::asset_or_nothing_call},   {"asset", PayoffKind::asset_or_nothing_call},
        {"c/n", PayoffKind::cash_or_nothing_call},    {"cash", PayoffKind::cash_or_nothing_call},
        {"cash_put", PayoffKind::cash_or_nothing_put}, {"eur", PayoffKind::european_call},
        {"european", PayoffKind::european_call},      {"call", PayoffKind::european_call},
        {"gap", PayoffKind::gap_call},                {"power", PayoffKind::power_european_call},
        {"power_asset", PayoffKind::power_asset_call}, {"power_cash", PayoffKind::power_cash_call},
        {"capped", PayoffKind::capped_cash_call},     {"outside", PayoffKind::outside_cash_call},
    };
    for (const Alias& a : aliases) {
        if (a.name == text) return a.kind;
    }
    for (int k = 0; k <= static_cast<int>(PayoffKind::outside_cash_call); ++k) {
        const auto kind = static_cast<PayoffKind>(k);
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

PayoffSpec PayoffSpec::resolved(const MarketContext& context) const {
    PayoffSpec out = *this;
    if (!out.second_strike) out.second_strike = context.strike2;
    if (!out.power) out.power = context.power;
    return out;
}

void PayoffSpec::validate(const MarketContext& context) const {
    switch (kind) {
        case PayoffKind::gap_call:
            if (!second_strike || !(*second_strike > 0.0)) {
                throw std::invalid_argument("gap_call needs a positive payment strike (strike2)");
            }
            break;
        case PayoffKind::capped_cash_call:
        case PayoffKind::outside_cash_call:
            if (!second_strike || !(*second_strike > context.strike)) {
                throw std::invalid_argument(std::string(to_string(kind)) +
                                            " needs a cap strike2 above the strike");
            }
            break;
        case PayoffKind::power_asset_call:
        case PayoffKind::power_european_call:
        case PayoffKind::power_cash_call:
            if (!power || !(*power > 0.0)) {
                throw std::invalid_argument(std::string(to_string(kind)) + " needs a positive power");
            }
            break;
        default:
            break;
    }
}

int truncation_rank(double k0, const NigParams& p, double tau, double eps) {
    const GateOutcome g = convergence_gate(k0, p, tau);
    if (!g.satisfied) {
        throw GateViolation("truncation_rank: |k0|/(delta tau) = " + std::to_string(g.ratio) + " >= 1",
                            g.ratio);
    }
    const double x = std::log(p.alpha * eps) / (2.0 * std::log(g.ratio));
    const double p_eps = std::max(0.0, std::ceil(x));
    return 2 * static_cast<int>(p_eps) + 1;
}

int truncation_rank(const NigParams& p, const MarketContext& c, double eps) {
    return truncation_rank(moneyness(p, c).k0, p, c.tau, eps);
}

double price_error_bound(const NigParams& p, const MarketContext& c, PayoffKind kind, double eps) {
    return std::exp(log_prefactor(p, c, kind) + std::log(eps));
}

std::size_t grid_size(PayoffKind kind, int rank) {
    const auto n = static_cast<std::size_t>(std::max(rank, 0));
    if (kind == PayoffKind::log_contract) return 1;
    if (kind == PayoffKind::european_call || kind == PayoffKind::power_european_call) return n * (n + 1);
    if (double_grid(kind)) return (n + 1) * (n + 1);
    return n + 1;
}

std::size_t null_term_count(PayoffKind kind, int n_max) {
    std::size_t zeros = 0;
    if (double_grid(kind)) {
        const int lo = (kind == PayoffKind::european_call || kind == PayoffKind::power_european_call) ? 1 : 0;
        for (int n1 = 0; n1 <= n_max; ++n1) {
            for (int n2 = lo; n2 <= n_max; ++n2) {
                const int m = n1 - n2;
                if (m >= 2 && m % 2 == 0) ++zeros;
            }
        }
    } else if (kind != PayoffKind::log_call && kind != PayoffKind::log_put &&
               kind != PayoffKind::log_contract) {
        for (int n = 2; n <= n_max; n += 2) ++zeros;
    }
    return zeros;
}

SeriesResult price_sym(const NigParams& params, const MarketContext& context,
                       const PayoffSpec& payoff_in, const SeriesOptions& opt) {
    validate(params);
    validate(context);
    if (params.beta != 0.0) throw std::invalid_argument("price_sym requires beta = 0");
    const PayoffSpec payoff = payoff_in.resolved(context);
    payoff.validate(context);
    const PayoffKind kind = payoff.kind;
    const Moneyness m = moneyness(params, context);
    const double tau = context.tau;
    const double disc = std::exp(-context.rate * tau);

    if (kind == PayoffKind::log_contract) {
        SeriesResult r;
        r.gate = convergence_gate(m.k0, params, tau);
        r.price = disc * m.k0;
        r.terms_evaluated = 1;
        r.converged = true;
        return r;
    }

    const bool is_power = kind == PayoffKind::power_asset_call ||
                          kind == PayoffKind::power_european_call || kind == PayoffKind::power_cash_call;
    const double a = is_power ? *payoff.power : 1.0;
    double k0 = m.k0;
    if (is_power) {
        k0 = log_forward_moneyness(params, context.spot, std::pow(context.strike, 1.0 / a),
                                   context.rate, context.dividend, tau);
    }
    std::vector<double> k0s{k0};
    double k0_cap = 0.0;
    if (kind == PayoffKind::capped_cash_call || kind == PayoffKind::outside_cash_call) {
        k0_cap = log_forward_moneyness(params, context.spot, *payoff.second_strike, context.rate,
                                       context.dividend, tau);
        k0s.push_back(k0_cap);
    }

    const Plan plan = plan_rank(k0s, params, context, opt);
    const double scale = strike_denominated(kind) ? context.strike : 1.0;
    const double tol = opt.eps * scale;
    // alpha e^{(alpha delta - r) tau} K_nu(z) / sqrt(pi) with the exponential absorbed in the scaled Bessel.
    const double front = params.alpha * disc / kSqrtPi;

    SeriesResult r = run_adaptive(plan, opt, tol, [&](int rank) {
        const SymKernel ker(params, tau, rank);
        SeriesResult out;
        SeriesSum s;
        double price = 0.0;
        switch (kind) {
            case PayoffKind::asset_or_nothing_call:
            case PayoffKind::power_asset_call:
                s = sym_double_sum(ker, k0, a, 0, rank, 1.0);
                price = context.strike * front * s.value;
                s.shell *= context.strike * front;
                break;
            case PayoffKind::european_call:
            case PayoffKind::power_european_call:
                s = sym_double_sum(ker, k0, a, 1, rank, 1.0);
                price = context.strike * front * s.value;
                s.shell *= context.strike * front;
                break;
            case PayoffKind::gap_call: {
                const double weight = 1.0 - *payoff.second_strike / context.strike;
                s = sym_double_sum(ker, k0, 1.0, 0, rank, weight);
                price = context.strike * front * s.value;
                s.shell *= context.strike * front;
                break;
            }
            case PayoffKind::cash_or_nothing_call:
            case PayoffKind::power_cash_call:
                s = sym_cash_odd_sum(ker, k0, rank);
                price = 0.5 * disc + front * s.value;
                s.shell *= front;
                break;
            case PayoffKind::cash_or_nothing_put:
                s = sym_cash_odd_sum(ker, k0, rank);
                price = 0.5 * disc - front * s.value;
                s.shell *= front;
                break;
            case PayoffKind::log_call:
            case PayoffKind::log_put: {
                s = sym_log_sum(params, tau, k0, rank);
                const double half = kind == PayoffKind::log_call ? 0.5 * k0 : -0.5 * k0;
                const double log_front = params.alpha / (2.0 * kPi);
                price = disc * (half + log_front * s.value);
                s.shell *= disc * log_front;
                break;
            }
            case PayoffKind::capped_cash_call:
            case PayoffKind::outside_cash_call: {
                const SeriesSum lower = sym_cash_odd_sum(ker, k0, rank);
                const SeriesSum upper = sym_cash_odd_sum(ker, k0_cap, rank);
                const double capped = front * (lower.value - upper.value);
                price = kind == PayoffKind::capped_cash_call ? capped : disc - capped;
                s = lower;
                s.shell = front * (lower.shell + upper.shell);
                break;
            }
            case PayoffKind::log_contract:
                break;
        }
        out.price = price;
        out.last_shell = s.shell;
        out.terms_evaluated = s.evaluated;
        out.zero_terms_skipped = s.zeros;
        return out;
    });

    PayoffKind bound_kind = kind;
    r.error_bound = price_error_bound(params, context, bound_kind, opt.eps);
    const bool certified_kind = kind == PayoffKind::asset_or_nothing_call ||
                                kind == PayoffKind::european_call ||
                                kind == PayoffKind::cash_or_nothing_call ||
                                kind == PayoffKind::cash_or_nothing_put;
    const bool needs_tau = kind == PayoffKind::asset_or_nothing_call || kind == PayoffKind::european_call;
    const bool tau_ok = tau < 2.0 * params.alpha / (kPi * params.delta);
    r.error_bound_heuristic = !r.gate.satisfied || !certified_kind || r.truncation_rank < plan.n_eps ||
                              (needs_tau && !tau_ok) || (plan.adaptive && !r.converged);
    return r;
}

SeriesResult price_asym(const NigParams& params, const MarketContext& context,
                        const PayoffSpec& payoff_in, const SeriesOptions& opt) {
    validate(params);
    validate(context);
    const PayoffSpec payoff = payoff_in.resolved(context);
    const PayoffKind kind = payoff.kind;
    if (kind != PayoffKind::asset_or_nothing_call && kind != PayoffKind::european_call &&
        kind != PayoffKind::cash_or_nothing_call) {
        throw std::invalid_argument("price_asym supports asset_or_nothing_call, european_call and "
                                    "cash_or_nothing_call only");
    }
    const Moneyness m = moneyness(params, context);
    const double tau = context.tau;
    const Plan plan = plan_rank({m.k0}, params, context, opt);
    const double scale = strike_denominated(kind) ? context.strike : 1.0;
    const double tol = opt.eps * scale;
    const double front = scale * params.alpha / kSqrtPi *
                         std::exp((-context.rate + (params.gamma() - params.alpha) * params.delta) * tau);

    SeriesResult r = run_adaptive(plan, opt, tol, [&](int rank) {
        const AsymKernel ker(params, tau, rank);
        SeriesSum s;
        switch (kind) {
            case PayoffKind::asset_or_nothing_call:
                s = asym_sum(ker, m.k0, params.beta, 0, rank, rank);
                break;
            case PayoffKind::european_call:
                s = asym_sum(ker, m.k0, params.beta, 1, rank, rank);
                break;
            default:
                s = asym_sum(ker, m.k0, params.beta, 0, 0, rank);
                break;
        }
        SeriesResult out;
        out.price = front * s.value;
        out.last_shell = front * s.shell;
        out.terms_evaluated = s.evaluated;
        out.zero_terms_skipped = s.zeros;
        return out;
    });

    r.error_bound = price_error_bound(params, context, kind, opt.eps);
    const bool needs_tau = kind != PayoffKind::cash_or_nothing_call;
    const bool tau_ok = tau < 2.0 * params.alpha / (kPi * params.delta);
    r.error_bound_heuristic = !r.gate.satisfied || !r.converged || r.truncation_rank < plan.n_eps ||
                              (needs_tau && !tau_ok);
    return r;
}

SeriesResult price(const NigParams& params, const MarketContext& context, const PayoffSpec& payoff,
                   const SeriesOptions& options) {
    if (params.beta == 0.0) return price_sym(params, context, payoff, options);
    return price_asym(params, context, payoff, options);
}

Eigen::MatrixXd term_grid(const NigParams& params, const MarketContext& context, int n_max,
                          bool override_gate) {
    validate(params);
    validate(context);
    if (params.beta != 0.0) throw std::invalid_argument("term_grid requires beta = 0");
    if (n_max < 0) throw std::invalid_argument("term_grid: n_max must be non-negative");
    const Moneyness m = moneyness(params, context);
    const GateOutcome gate = convergence_gate(m.k0, params, context.tau);
    if (!gate.satisfied && !override_gate) {
        throw GateViolation(gate_message(gate.ratio, params, context), gate.ratio);
    }
    const SymKernel ker(params, context.tau, n_max);
    const std::vector<double> kp = scaled_powers(m.k0, n_max);
    const double front =
        context.strike * params.alpha * std::exp(-context.rate * context.tau) / kSqrtPi;
    Eigen::MatrixXd grid(n_max + 1, n_max + 1);
    for (int n1 = 0; n1 <= n_max; ++n1) {
        for (int n2 = 0; n2 <= n_max; ++n2) grid(n1, n2) = front * kp[n1] * ker.value(n1 - n2);
    }
    return grid;
}

void write_term_grid_csv(std::ostream& out, const Eigen::MatrixXd& grid) {
    const auto old_precision = out.precision(10);
    out << "n1\\n2";
    for (Eigen::Index c = 0; c < grid.cols(); ++c) out << ',' << c;
    out << '\n';
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        out << r;
        for (Eigen::Index c = 0; c < grid.cols(); ++c) out << ',' << grid(r, c);
        out << '\n';
    }
    out.precision(old_precision);
}

EuropeanStrikeSweep::EuropeanStrikeSweep(const NigParams& params, double spot, double rate,
                                         double dividend, double tau, int rank)
    : params_(params), spot_(spot), rate_(rate), dividend_(dividend), tau_(tau), rank_(rank) {
    validate(params);
    if (params.beta != 0.0) throw std::invalid_argument("EuropeanStrikeSweep requires beta = 0");
    if (rank < 1) throw std::invalid_argument("EuropeanStrikeSweep: rank must be at least 1");
    const SymKernel ker(params, tau, rank);
    coefficients_.setZero(rank + 1);
    double inv_factorial = 1.0;
    for (int n1 = 0; n1 <= rank; ++n1) {
        if (n1 > 0) inv_factorial /= n1;
        Neumaier acc;
        for (int n2 = 1; n2 <= rank; ++n2) {
            ++grid_terms_;
            if (ker.at(n1 - n2).sign == 0) {
                ++null_terms_;
                continue;
            }
            acc.add(ker.value(n1 - n2));
        }
        coefficients_[n1] = acc.value() * inv_factorial * params.alpha / kSqrtPi;
    }
}

double EuropeanStrikeSweep::price(double strike) const {
    const double k0 = log_forward_moneyness(params_, spot_, strike, rate_, dividend_, tau_);
    const GateOutcome gate = convergence_gate(k0, params_, tau_);
    if (!gate.satisfied) {
        throw GateViolation("EuropeanStrikeSweep: gate violated at strike " + std::to_string(strike),
                            gate.ratio);
    }
    double acc = 0.0;
    for (int n1 = rank_; n1 >= 0; --n1) acc = acc * k0 + coefficients_[n1];
    return strike * std::exp(-rate_ * tau_) * acc;
}

Eigen::VectorXd EuropeanStrikeSweep::prices(const Eigen::VectorXd& strikes) const {
    Eigen::VectorXd out(strikes.size());
    for (Eigen::Index i = 0; i < strikes.size(); ++i) out[i] = price(strikes[i]);
    return out;
}

double atmf_approx_call(const NigParams& params, const MarketContext& context) {
    validate(params);
    validate(context);
    if (params.beta != 0.0) throw std::invalid_argument("atmf_approx_call requires beta = 0");
    const double forward = context.strike * std::exp(-(context.rate - context.dividend) * context.tau);
    if (std::fabs(context.spot / forward - 1.0) > 1e-8) {
        throw DomainError("atmf_approx_call: spot must equal K e^{-(r-q) tau}");
    }
    const double dt = params.delta * context.tau;
    const double z = params.alpha * dt;
    return context.spot * std::exp(-context.dividend * context.tau) * dt * bessel_k_scaled(0.0, z) / kPi;
}

ImpliedDelta implied_delta_atmf(double alpha, double call_price, double spot, double tau) {
    if (!(alpha > 0.0) || !(call_price > 0.0) || !(spot > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("implied_delta_atmf: inputs must be positive");
    }
    const double c = call_price / spot;
    const double b = alpha * std::sqrt(2.0 * kPi) * c;
    ImpliedDelta out;
    out.root = 0.5 * (b + std::sqrt(b * b + 0.5));
    out.delta = 2.0 * kPi * alpha / tau * c * c + 1.0 / (4.0 * alpha * tau);
    out.sigma_first_order = std::sqrt(2.0 * kPi / tau) * c;
    return out;
}

}  // namespace nig
