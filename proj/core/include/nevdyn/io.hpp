#pragma once

#include <string>
#include <vector>

#include "nevdyn/scenarios.hpp"
#include "nevdyn/stability.hpp"

namespace nevdyn {

// ============================================================================
// Artifact emission and configuration parsing. All emitters are deterministic:
// identical inputs produce byte-identical output (LF line endings, doubles in
// shortest round-trip decimal form).
// ============================================================================

struct EmitFlags {
    bool csv = true;
    bool svg = false;
    bool report = true;
};

/// A run request: exactly one of preset_name / inline_spec is set.
struct RunConfig {
    std::string label = "run"; ///< artifact file stem
    std::string preset_name;
    std::optional<ScenarioSpec> inline_spec;
    std::string out_dir = ".";
    int stride = 10; ///< every k-th record goes to CSV
    EmitFlags emit{};
    std::vector<std::string> svg_channels = {"x", "pi_F", "pi_E", "N", "Pi"};
};

/// Parses a run config from JSON text. Malformed input raises ConfigError
/// naming the offending field path.
[[nodiscard]] RunConfig parse_run_config(const std::string& json_text);
[[nodiscard]] std::string serialize_run_config(const RunConfig& config);

/// Resolves preset_name or returns the inline spec.
[[nodiscard]] ScenarioSpec resolve_run_config(const RunConfig& config);

[[nodiscard]] SweepSpec parse_sweep_config(const std::string& json_text);

/// Header exactly: t,x,pi_F,pi_E,N,s,g_eff,Pi,neg_pi_E_flag
[[nodiscard]] std::string trajectory_csv(const Trajectory& trajectory, int stride = 1);

/// Inverse of trajectory_csv for the numeric columns; round-trips exactly.
[[nodiscard]] std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& csv_text);

/// Self-contained SVG line chart, one stacked panel per requested channel
/// (subset of x, pi_F, pi_E, N, Pi). A single-record trajectory renders a
/// point marker; an empty one raises EmptyTrajectory.
[[nodiscard]] std::string trajectory_svg(const Trajectory& trajectory,
                                         const std::vector<std::string>& channels);

[[nodiscard]] std::string diagnostics_json(const ScenarioSpec& spec, const RegimeDiagnostics& diagnostics);
[[nodiscard]] std::string stability_report_json(const StabilityReport& report);
[[nodiscard]] std::string fixed_points_json(const std::vector<StabilityReport>& reports);

/// Cell table: one row per cell, axis coordinates first, then diagnostics
/// columns and an error column (empty on success).
[[nodiscard]] std::string sweep_csv(const SweepResult& result);

/// Shortest decimal form that parses back to exactly the same double.
[[nodiscard]] std::string format_double(double value);

} // namespace nevdyn
