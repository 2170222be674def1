#pragma once

// Flat key = value files for model parameters and market contexts.
// Blank lines and '#' comments are ignored; numbers round-trip exactly.

#include "nig/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace nig {

/// Values keyed by name, each remembering the line it came from.
struct KeyValues {
    std::map<std::string, double> values;
    std::map<std::string, int> lines;

    bool has(const std::string& key) const { return values.count(key) != 0; }
};

/// Recognised keys: alpha, beta, delta, mu, spot, strike, strike2, power, rate,
/// dividend, tau. Throws ConfigError with the 1-based line on unknown keys,
/// duplicates, missing '=' and unparsable numbers.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// alpha and delta are required; beta and mu default to 0. The result is validated,
/// and admissibility failures are rethrown as ConfigError on the offending line.
NigParams params_from(const KeyValues& kv);
/// spot, strike and tau are required; rate and dividend default to 0.
MarketContext market_from(const KeyValues& kv);

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double x);

void write_key_values(std::ostream& out, const NigParams& params);
void write_key_values(std::ostream& out, const MarketContext& context);

}  // namespace nig
