#pragma once

// Built-in parameter sets and published reference values, regenerated cell by
// cell and diffed against the embedded expectations.

#include "nig/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nig {

struct NamedParams {
    std::string name;
    NigParams params;
};

/// Calibrated sets: Saebo (OBX), Matsuda (S&P 500), Schoutens (SX5E), Albrecher (S&P 500).
const std::vector<NamedParams>& calibrated_params();
/// alpha = 8.9932, delta = 1.1528 with beta = 0 or beta = -4.5176.
NigParams benchmark_symmetric();
NigParams benchmark_asymmetric();

inline constexpr double kOneMonth = 1.0 / 12.0;
inline constexpr double kOneWeek = 1.0 / 52.0;
inline constexpr double kOneDay = 1.0 / 360.0;

struct TableCell {
    std::string row;
    std::string column;
    double expected = 0.0;
    double computed = 0.0;
    double tolerance = 0.0;
    /// Unchecked cells are reported but do not affect pass/fail.
    bool checked = true;
    std::string note;

    double deviation() const;
    bool pass() const;
};

struct TableReport {
    int id = 0;
    std::string title;
    std::vector<TableCell> cells;
    double seconds = 0.0;

    /// Over checked cells only.
    double max_abs_deviation() const;
    bool all_pass() const;
    std::size_t failures() const;
};

struct TableOptions {
    std::uint64_t seed = 20200601;
    std::size_t mc_paths = 100000;
    /// Skip the quadrature and Monte Carlo columns.
    bool series_only = false;
};

/// id in 1..6; throws std::out_of_range otherwise.
TableReport reproduce_table(int id, const TableOptions& options = {});

/// table,row,column,expected,computed,abs_dev,tolerance,status
void write_table_csv(std::ostream& out, const TableReport& report, bool header = true);
void write_table_text(std::ostream& out, const TableReport& report);

}  // namespace nig
