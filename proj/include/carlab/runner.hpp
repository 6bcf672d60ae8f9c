#pragma once

#include "carlab/exponents.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace carlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr double kSlopeTolerance = 0.15;
inline constexpr double kKelvinTolerance = 1e-5;
inline constexpr double kDeltaLimitTolerance = 1e-2;

struct RunConfig {
    std::string command;
    /// 0 picks the command's default dimension.
    int d = 0;
    std::optional<std::string> theorem;
    std::optional<ExponentPoint> point;
    /// Empty picks the family's default ladder.
    std::vector<double> eps;
    std::string family = "knapp";
    double delta = 0.125;
    double angle = 0.0;
    /// Grid overrides: samples per axis and box half-width in units of pi over
    /// the frequency half-width (Knapp); lattice sizes for check-kelvin.
    std::optional<std::size_t> samples;
    std::optional<double> box;
    std::vector<std::size_t> grids;
    /// +1, -1, or 0 for both.
    int sign = 0;
    int sphere_dim = 1;
    double radius_max = 40.0;
    std::size_t count = 81;
    std::vector<double> a_values{1.0, 2.0};
    std::vector<double> lambdas{1e-1, 1e-2, 1e-3};
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
    std::string output_dir;
    std::string report_dir;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

/// "2^-3..2^-8", "2^-4", "0.1,0.05" or a mix of comma-separated items.
std::vector<double> parse_eps_ladder(const std::string& text);

/// Throws ContractViolation naming the offending field.
void validate(const RunConfig& c);

/// Output directory: the config's, else $CARLAB_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const RunConfig& c);

struct RunResult {
    int exit_code = kExitPass;
    std::vector<std::string> artifacts;
};

/// Runs one subcommand, writing artifacts and a short log to `log`.
/// Guard failures propagate as carlab::Error.
RunResult run(const RunConfig& c, std::ostream& log);

/// Aggregates every JSON artifact in `dir` (except report.json).
nlohmann::json emit_report(const std::string& dir);

/// Maps an exception from run() to an exit code and writes a one-line
/// machine-readable reason.
int report_error(const std::exception& e, std::ostream& err);

}  // namespace carlab
