#include "nig/config.hpp"

#include "nig/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace nig {
namespace {

constexpr std::array<std::string_view, 11> kKeys = {"alpha", "beta",  "delta",   "mu",       "spot", "strike",
                                                    "strike2", "power", "rate", "dividend", "tau"};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, int line, std::string_view key) {
    double x = 0.0;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError("value of '" + std::string(key) + "' is not a number: '" + std::string(text) + "'",
                          line);
    }
    return x;
}

int line_of(const KeyValues& kv, const std::string& key) {
    const auto it = kv.lines.find(key);
    return it == kv.lines.end() ? 0 : it->second;
}

double required(const KeyValues& kv, const std::string& key) {
    if (!kv.has(key)) throw ConfigError("missing required key '" + key + "'");
    return kv.values.at(key);
}

double optional_or(const KeyValues& kv, const std::string& key, double fallback) {
    return kv.has(key) ? kv.values.at(key) : fallback;
}

// Maps an admissibility message back to the first key it names.
int blame_line(const KeyValues& kv, const std::string& message) {
    std::size_t best = std::string::npos;
    std::size_t best_len = 0;
    int line = 0;
    for (std::string_view key : kKeys) {
        const std::size_t at = message.find(key);
        if (at == std::string::npos || !kv.has(std::string(key))) continue;
        if (best == std::string::npos || at < best || (at == best && key.size() > best_len)) {
            best = at;
            best_len = key.size();
            line = line_of(kv, std::string(key));
        }
    }
    return line;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key(trim(text.substr(0, eq)));
        const std::string_view value = trim(text.substr(eq + 1));
        bool known = false;
        for (std::string_view k : kKeys) known = known || k == key;
        if (!known) throw ConfigError("unknown key '" + key + "'", line);
        if (kv.has(key)) throw ConfigError("duplicate key '" + key + "'", line);
        kv.values[key] = parse_number(value, line, key);
        kv.lines[key] = line;
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    return parse_key_values(in);
}

NigParams params_from(const KeyValues& kv) {
    NigParams p;
    p.alpha = required(kv, "alpha");
    p.delta = required(kv, "delta");
    p.beta = optional_or(kv, "beta", 0.0);
    p.mu = optional_or(kv, "mu", 0.0);
    try {
        validate(p);
    } catch (const AdmissibilityError& e) {
        throw ConfigError(e.what(), blame_line(kv, e.what()));
    }
    return p;
}

MarketContext market_from(const KeyValues& kv) {
    MarketContext c;
    c.spot = required(kv, "spot");
    c.strike = required(kv, "strike");
    c.tau = required(kv, "tau");
    c.rate = optional_or(kv, "rate", 0.0);
    c.dividend = optional_or(kv, "dividend", 0.0);
    if (kv.has("strike2")) c.strike2 = kv.values.at("strike2");
    if (kv.has("power")) c.power = kv.values.at("power");
    try {
        validate(c);
    } catch (const AdmissibilityError& e) {
        throw ConfigError(e.what(), blame_line(kv, e.what()));
    }
    return c;
}

std::string format_exact(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

void write_key_values(std::ostream& out, const NigParams& p) {
    out << "alpha = " << format_exact(p.alpha) << '\n'
        << "beta = " << format_exact(p.beta) << '\n'
        << "delta = " << format_exact(p.delta) << '\n'
        << "mu = " << format_exact(p.mu) << '\n';
}

void write_key_values(std::ostream& out, const MarketContext& c) {
    out << "spot = " << format_exact(c.spot) << '\n'
        << "strike = " << format_exact(c.strike) << '\n';
    if (c.strike2) out << "strike2 = " << format_exact(*c.strike2) << '\n';
    if (c.power) out << "power = " << format_exact(*c.power) << '\n';
    out << "rate = " << format_exact(c.rate) << '\n'
        << "dividend = " << format_exact(c.dividend) << '\n'
        << "tau = " << format_exact(c.tau) << '\n';
}

}  // namespace nig
