#pragma once

#include <stdexcept>
#include <string>

namespace nig {

/// Argument outside the mathematical domain of a function (z <= 0, x = 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Gamma evaluated exactly at one of its poles.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Model parameters violate the NIG admissibility constraints.
class AdmissibilityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The residue series cannot be summed: |k0| / (delta tau) >= 1.
class GateViolation : public std::runtime_error {
public:
    GateViolation(const std::string& what, double ratio)
        : std::runtime_error(what), ratio_(ratio) {}
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration input; line is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace nig
