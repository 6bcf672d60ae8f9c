#pragma once

#include "carlab/operators.hpp"
#include "carlab/sharpness.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace carlab {

inline constexpr int kSchemaVersion = 1;

/// p = 1/x as num/den; x = 0 is written 1/0.
std::pair<std::int64_t, std::int64_t> exponent_fraction(const Rational& x);
Rational reciprocal_of(std::int64_t num, std::int64_t den);

/// Lossless decimal form of a double.
std::string format_double(double v);

/// CSV with a leading "# schema=1" line and a header row.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& rows);
std::vector<SweepRecord> read_sweep_csv(std::istream& is);

void write_operator_csv(std::ostream& os, const std::vector<OperatorReport>& rows);
std::vector<OperatorReport> read_operator_csv(std::istream& is);

/// Generic table with the same framing, used for residual and kernel tables.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
void write_table(std::ostream& os, const Table& t);
Table read_table(std::istream& is);

nlohmann::json slope_json(const std::vector<SweepRecord>& rows, const SlopeFit& fit, double tolerance);

nlohmann::json ranges_json(int d);

}  // namespace carlab
