#include "nevdyn/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

/// Shared backbone of every preset: slow fleet time scales against fast
/// opinion dynamics, both externality stocks starting clean, and a slight
/// initial TFV lean.
ScenarioSpec preset_base(std::string name, double t_end) {
    ScenarioSpec spec;
    spec.name = std::move(name);
    spec.params.v = 0.6;
    spec.params.gamma_F = 0.9;
    spec.params.theta_E = 0.2;
    spec.params.alpha1 = 0.03;
    spec.params.alpha2 = 0.07;
    spec.initial = {-0.1, 0.0, 0.0, 10.0};
    spec.integration.t0 = 0.0;
    spec.integration.t_end = t_end;
    spec.integration.dt = 0.01;
    spec.integration.method = Method::RK4;
    spec.integration.adaptive = true;
    return spec;
}

ScenarioSpec make_s1(std::string name, double a1, Regime expected) {
    ScenarioSpec spec = preset_base(std::move(name), 200.0);
    spec.params.a1 = a1;
    spec.params.growth = GrowthPolicy::fixed(0.0);
    spec.expected_regime = expected;
    return spec;
}

ScenarioSpec make_s2() {
    ScenarioSpec spec = preset_base("S2_one_sided", 200.0);
    spec.params.a0 = 1.0;
    spec.params.a1 = 1.5;
    spec.params.a2 = 0.5;
    spec.params.growth = GrowthPolicy::fixed(0.1);
    spec.expected_regime = Regime::NEVDominant;
    return spec;
}

/// The pi_E feedback (a3 < 0) stiffens exponentially with the growing fleet,
/// which holds the full-coupling horizon to 100 time units; the dynamics are
/// settled well before then.
ScenarioSpec make_s3(std::string name, double a0) {
    ScenarioSpec spec = preset_base(std::move(name), 100.0);
    spec.params.a0 = a0;
    spec.params.a1 = 1.5;
    spec.params.a2 = 0.5;
    spec.params.a3 = -0.5;
    spec.params.growth = GrowthPolicy::fixed(0.1);
    spec.expected_regime = Regime::NEVDominant;
    return spec;
}

constexpr const char* kParameterPaths[] = {
    "a0",     "a1",        "a2",         "a3",    "v",     "gamma_F", "theta_E",
    "alpha1", "alpha2",    "s_cap",      "growth.g", "growth.k1", "growth.k2",
    "x0",     "pi_F0",     "pi_E0",      "N0",    "t0",    "t_end",   "dt",
    "rel_tol"};

void run_cells(const SweepSpec& spec, const std::vector<std::uint64_t>& strides,
               std::vector<SweepCell>& cells, std::atomic<std::uint64_t>& next) {
    const std::uint64_t total = cells.size();
    for (std::uint64_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
        SweepCell& cell = cells[i];
        ScenarioSpec cell_spec = spec.base;
        cell.coordinates.resize(spec.axes.size());
        for (std::size_t a = 0; a < spec.axes.size(); ++a) {
            const auto& axis = spec.axes[a];
            const std::uint64_t idx = (i / strides[a]) % axis.values.size();
            cell.coordinates[a] = axis.values[idx];
            apply_parameter(cell_spec, axis.path, axis.values[idx]);
        }
        try {
            cell.diagnostics = run_scenario(cell_spec).diagnostics;
        } catch (const Error& e) {
            cell.error = error_kind_name(e.kind());
        } catch (const std::exception& e) {
            cell.error = std::string("InternalError: ") + e.what();
        }
    }
}

} // namespace

const char* regime_name(Regime regime) noexcept {
    switch (regime) {
    case Regime::TFVDominant: return "TFVDominant";
    case Regime::Coexistence: return "Coexistence";
    case Regime::NEVDominant: return "NEVDominant";
    }
    return "Unknown";
}

ScenarioSpec preset(std::string_view name) {
    if (name == "S1_strong") return make_s1("S1_strong", 1.5, Regime::TFVDominant);
    if (name == "S1_weak") return make_s1("S1_weak", 0.5, Regime::Coexistence);
    if (name == "S2_one_sided") return make_s2();
    if (name == "S3_low") return make_s3("S3_low", 0.5);
    if (name == "S3_mid") return make_s3("S3_mid", 2.5);
    if (name == "S3_high") return make_s3("S3_high", 4.5);
    if (name == "Macro_fixed") return make_s3("Macro_fixed", 2.5);
    if (name == "Macro_regulated") {
        ScenarioSpec spec = make_s3("Macro_regulated", 2.5);
        spec.params.growth = GrowthPolicy::regulated(0.1, 0.01, 0.01);
        return spec;
    }
    std::ostringstream oss;
    oss << "no preset named '" << name << "'; available:";
    for (const auto& known : preset_names()) oss << ' ' << known;
    raise(ErrorKind::UnknownPreset, oss.str());
}

std::vector<std::string> preset_names() {
    return {"S1_strong", "S1_weak",  "S2_one_sided", "S3_low",
            "S3_mid",    "S3_high",  "Macro_fixed",  "Macro_regulated"};
}

RegimeDiagnostics classify_trajectory(const Trajectory& trajectory, double x_threshold) {
    if (trajectory.rows.empty()) raise(ErrorKind::EmptyTrajectory, "cannot classify an empty trajectory");
    if (!(x_threshold > 0.0 && x_threshold < 1.0)) {
        raise(ErrorKind::InvalidParams, "x_threshold must lie in (0, 1)");
    }

    RegimeDiagnostics diag;
    const TrajectoryRow& last = trajectory.back();
    diag.terminal_t = last.t;
    diag.terminal_x = last.x;
    diag.terminal_pi_F = last.pi_F;
    diag.terminal_pi_E = last.pi_E;
    diag.terminal_N = last.N;

    diag.peak_Pi = trajectory.front().Pi;
    diag.peak_Pi_t = trajectory.front().t;
    for (const TrajectoryRow& row : trajectory.rows) {
        if (row.Pi > diag.peak_Pi) { // first occurrence of the maximum wins
            diag.peak_Pi = row.Pi;
            diag.peak_Pi_t = row.t;
        }
    }

    if (last.x > x_threshold) {
        diag.regime = Regime::NEVDominant;
    } else if (last.x < -x_threshold) {
        diag.regime = Regime::TFVDominant;
    } else {
        diag.regime = Regime::Coexistence;
    }
    return diag;
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
    ScenarioResult result;
    result.trajectory = integrate(spec.params, spec.initial, spec.integration);
    result.diagnostics = classify_trajectory(result.trajectory);
    return result;
}

void apply_parameter(ScenarioSpec& spec, std::string_view path, double value) {
    if (path == "a0") spec.params.a0 = value;
    else if (path == "a1") spec.params.a1 = value;
    else if (path == "a2") spec.params.a2 = value;
    else if (path == "a3") spec.params.a3 = value;
    else if (path == "v") spec.params.v = value;
    else if (path == "gamma_F") spec.params.gamma_F = value;
    else if (path == "theta_E") spec.params.theta_E = value;
    else if (path == "alpha1") spec.params.alpha1 = value;
    else if (path == "alpha2") spec.params.alpha2 = value;
    else if (path == "s_cap") spec.params.s_cap = value;
    else if (path == "growth.g") spec.params.growth.g = value;
    else if (path == "growth.k1") spec.params.growth.k1 = value;
    else if (path == "growth.k2") spec.params.growth.k2 = value;
    else if (path == "x0") spec.initial.x = value;
    else if (path == "pi_F0") spec.initial.pi_F = value;
    else if (path == "pi_E0") spec.initial.pi_E = value;
    else if (path == "N0") spec.initial.N = value;
    else if (path == "t0") spec.integration.t0 = value;
    else if (path == "t_end") spec.integration.t_end = value;
    else if (path == "dt") spec.integration.dt = value;
    else if (path == "rel_tol") spec.integration.rel_tol = value;
    else {
        std::ostringstream oss;
        oss << "no sweep parameter named '" << path << "'; available:";
        for (const char* known : kParameterPaths) oss << ' ' << known;
        raise(ErrorKind::UnknownParameter, oss.str());
    }
}

std::vector<std::string> parameter_paths() {
    return {std::begin(kParameterPaths), std::end(kParameterPaths)};
}

SweepResult run_sweep(const SweepSpec& spec, unsigned jobs) {
    std::uint64_t total = 1;
    for (const SweepAxis& axis : spec.axes) {
        if (axis.values.empty()) raise(ErrorKind::InvalidParams, "sweep axis has no values");
        // Reject any path up front rather than failing per cell.
        ScenarioSpec probe = spec.base;
        apply_parameter(probe, axis.path, axis.values.front());
        if (total > spec.cell_cap / axis.values.size()) {
            std::ostringstream oss;
            oss << "sweep grid exceeds the cell cap of " << spec.cell_cap;
            raise(ErrorKind::SweepCapExceeded, oss.str());
        }
        total *= axis.values.size();
    }
    if (total > spec.cell_cap) {
        std::ostringstream oss;
        oss << "sweep grid of " << total << " cells exceeds the cell cap of " << spec.cell_cap;
        raise(ErrorKind::SweepCapExceeded, oss.str());
    }

    // Row-major strides: the last axis varies fastest.
    std::vector<std::uint64_t> strides(spec.axes.size(), 1);
    for (std::size_t a = spec.axes.size(); a-- > 1;) {
        strides[a - 1] = strides[a] * spec.axes[a].values.size();
    }

    SweepResult result;
    result.axes = spec.axes;
    result.cells.resize(total);

    std::atomic<std::uint64_t> next{0};
    unsigned worker_count = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    worker_count = static_cast<unsigned>(
        std::min<std::uint64_t>(worker_count, std::max<std::uint64_t>(total, 1)));

    if (worker_count <= 1) {
        run_cells(spec, strides, result.cells, next);
        return result;
    }
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (unsigned w = 0; w < worker_count; ++w) {
        workers.emplace_back(
            [&] { run_cells(spec, strides, result.cells, next); });
    }
    for (std::thread& worker : workers) worker.join();
    return result;
}

} // namespace nevdyn
