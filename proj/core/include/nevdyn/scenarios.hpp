#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nevdyn/integrate.hpp"
#include "nevdyn/model.hpp"

namespace nevdyn {

/// Terminal-state regimes: x above +0.5 means NEV has effectively taken the
/// market, below -0.5 means TFV holds it, anything between is coexistence.
enum class Regime { TFVDominant, Coexistence, NEVDominant };

[[nodiscard]] const char* regime_name(Regime regime) noexcept;

struct ScenarioSpec {
    std::string name;
    ModelParams params{};
    SystemState initial{};
    IntegrationConfig integration{};
    std::optional<Regime> expected_regime; ///< regression pin, where one is established
};

/// Named presets (S1_strong, S1_weak, S2_one_sided, S3_low, S3_mid, S3_high,
/// Macro_fixed, Macro_regulated). Throws UnknownPreset for anything else.
[[nodiscard]] ScenarioSpec preset(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();

struct RegimeDiagnostics {
    double terminal_t = 0.0;
    double terminal_x = 0.0;
    double terminal_pi_F = 0.0;
    double terminal_pi_E = 0.0;
    double terminal_N = 0.0;
    double peak_Pi = 0.0;
    double peak_Pi_t = 0.0;
    Regime regime = Regime::Coexistence;
};

[[nodiscard]] RegimeDiagnostics classify_trajectory(const Trajectory& trajectory,
                                                    double x_threshold = 0.5);

struct ScenarioResult {
    Trajectory trajectory;
    RegimeDiagnostics diagnostics{};
};

[[nodiscard]] ScenarioResult run_scenario(const ScenarioSpec& spec);

/// Addressable scalar knobs for sweeps, e.g. "a0", "growth.g", "x0", "t_end".
/// Throws UnknownParameter for unlisted paths.
void apply_parameter(ScenarioSpec& spec, std::string_view path, double value);
[[nodiscard]] std::vector<std::string> parameter_paths();

struct SweepAxis {
    std::string path;
    std::vector<double> values;
};

struct SweepSpec {
    ScenarioSpec base{};
    std::vector<SweepAxis> axes;
    std::uint64_t cell_cap = 1'000'000;
};

/// One grid cell: its coordinate values (one per axis, same order), and either
/// diagnostics or the name of the error that stopped it. Failed cells never
/// abort the sweep.
struct SweepCell {
    std::vector<double> coordinates;
    std::optional<RegimeDiagnostics> diagnostics;
    std::string error;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells; ///< row-major over axes, independent of execution order
};

/// Runs every cell of the cartesian grid. jobs = 0 uses the hardware thread
/// count; results are ordered canonically regardless of scheduling.
[[nodiscard]] SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 0);

} // namespace nevdyn
