// Command-line front end: simulate presets or JSON-configured scenarios,
// sweep parameter grids, locate and classify equilibria, and run the built-in
// self checks. Exit codes: 0 success, 1 usage/config problems, 2 numerical
// failures.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nevdyn/errors.hpp"
#include "nevdyn/io.hpp"
#include "nevdyn/selfcheck.hpp"
#include "nevdyn/stability.hpp"

namespace {

namespace fs = std::filesystem;
using namespace nevdyn;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::ConfigError, "cannot read '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) raise(ErrorKind::ConfigError, "cannot create '" + path.parent_path().string() + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) raise(ErrorKind::ConfigError, "short write to '" + path.string() + "'");
    std::cout << "wrote " << path.string() << "\n";
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(text, &consumed);
        if (consumed != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        raise(ErrorKind::ConfigError, what + ": '" + text + "' is not a number");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) out.push_back(item);
    return out;
}

void apply_overrides(ScenarioSpec& spec, const std::vector<std::string>& sets) {
    for (const std::string& entry : sets) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0) {
            raise(ErrorKind::ConfigError, "--set expects path=value, got '" + entry + "'");
        }
        apply_parameter(spec, entry.substr(0, eq), parse_number(entry.substr(eq + 1), entry));
    }
}

/// Shared --preset/--config/--set resolution for the analysis subcommands.
struct SpecSource {
    std::string preset_name;
    std::string config_path;
    std::vector<std::string> sets;

    void add_options(CLI::App& app) {
        auto* preset_opt = app.add_option("--preset", preset_name, "Named preset scenario");
        auto* config_opt = app.add_option("--config", config_path, "Run-config JSON file");
        preset_opt->excludes(config_opt);
    }

    [[nodiscard]] ScenarioSpec resolve() const {
        if (preset_name.empty() && config_path.empty()) {
            raise(ErrorKind::ConfigError, "one of --preset or --config is required");
        }
        ScenarioSpec spec = preset_name.empty()
                                ? resolve_run_config(parse_run_config(read_file(config_path)))
                                : preset(preset_name);
        apply_overrides(spec, sets);
        return spec;
    }
};

Dims dims_from_int(int dims) {
    switch (dims) {
    case 2: return Dims::TwoD;
    case 3: return Dims::ThreeD;
    default: return Dims::FourD;
    }
}

void emit_or_print(const std::string& output_path, const std::string& content) {
    if (output_path.empty()) std::cout << content;
    else write_file(output_path, content);
}

int run_simulate(const std::string& config_path, const std::string& preset_name,
                 const std::vector<std::string>& sets, const std::optional<std::string>& label,
                 const std::optional<std::string>& out_dir, const std::optional<int>& stride,
                 const std::optional<std::string>& emit_list,
                 const std::optional<std::string>& channel_list) {
    RunConfig rc;
    if (!config_path.empty()) {
        rc = parse_run_config(read_file(config_path));
    } else {
        rc.preset_name = preset_name;
        rc.label = preset_name;
    }
    if (label) rc.label = *label;
    if (stride) rc.stride = *stride;
    if (out_dir) {
        rc.out_dir = *out_dir;
    } else if (rc.out_dir == ".") {
        if (const char* env = std::getenv("NEVDYN_OUT")) rc.out_dir = env;
    }
    if (emit_list) {
        rc.emit = {false, false, false};
        for (const std::string& kind : split_list(*emit_list)) {
            if (kind == "csv") rc.emit.csv = true;
            else if (kind == "svg") rc.emit.svg = true;
            else if (kind == "report") rc.emit.report = true;
            else raise(ErrorKind::ConfigError, "--emit accepts csv, svg, report; got '" + kind + "'");
        }
    }
    if (channel_list) rc.svg_channels = split_list(*channel_list);

    ScenarioSpec spec = resolve_run_config(rc);
    apply_overrides(spec, sets);

    const ScenarioResult result = run_scenario(spec);
    const fs::path dir(rc.out_dir);
    if (rc.emit.csv) write_file(dir / (rc.label + ".csv"), trajectory_csv(result.trajectory, rc.stride));
    if (rc.emit.svg) write_file(dir / (rc.label + ".svg"), trajectory_svg(result.trajectory, rc.svg_channels));
    if (rc.emit.report) write_file(dir / (rc.label + ".json"), diagnostics_json(spec, result.diagnostics));

    const RegimeDiagnostics& diag = result.diagnostics;
    std::cout << spec.name << ": " << regime_name(diag.regime) << ", terminal x = "
              << diag.terminal_x << " at t = " << diag.terminal_t << " (" << result.trajectory.size()
              << " records)\n";
    if (spec.expected_regime && *spec.expected_regime != diag.regime) {
        std::cout << "note: expected " << regime_name(*spec.expected_regime) << ", observed "
                  << regime_name(diag.regime) << "\n";
    }
    return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::optional<std::string>& out_dir,
                  const std::string& label, unsigned jobs) {
    SweepSpec spec = parse_sweep_config(read_file(config_path));
    const SweepResult result = run_sweep(spec, jobs);

    std::string dir = out_dir ? *out_dir : ".";
    if (!out_dir) {
        if (const char* env = std::getenv("NEVDYN_OUT")) dir = env;
    }
    write_file(fs::path(dir) / (label + ".csv"), sweep_csv(result));

    std::size_t failed = 0;
    for (const SweepCell& cell : result.cells) {
        if (!cell.error.empty()) ++failed;
    }
    std::cout << result.cells.size() << " cells, " << failed << " failed\n";
    return 0;
}

int run_equilibria(const SpecSource& source, int dims, const std::optional<double>& n_override,
                   int grid, const std::string& output_path) {
    const ScenarioSpec spec = source.resolve();
    const double N = n_override ? *n_override : spec.initial.N;
    const auto points = find_fixed_points(spec.params, N, dims_from_int(dims), grid);
    std::vector<StabilityReport> reports;
    reports.reserve(points.size());
    for (const FixedPoint& fp : points) reports.push_back(classify_equilibrium(spec.params, fp));
    emit_or_print(output_path, fixed_points_json(reports));
    return 0;
}

int run_stability(const SpecSource& source, int dims, const std::string& at,
                  const std::optional<double>& n_override, const std::string& output_path) {
    const ScenarioSpec spec = source.resolve();
    const Dims d = dims_from_int(dims);
    const double N = n_override ? *n_override : spec.initial.N;

    SystemState state = balanced_fixed_point(spec.params, N);
    if (!at.empty()) {
        const std::vector<std::string> parts = split_list(at);
        if (parts.size() != static_cast<std::size_t>(dims)) {
            std::ostringstream oss;
            oss << "--at expects " << dims << " comma-separated values for --dims " << dims;
            raise(ErrorKind::ConfigError, oss.str());
        }
        state.x = parse_number(parts[0], "--at x");
        state.pi_F = parse_number(parts[1], "--at pi_F");
        state.pi_E = dims >= 3 ? parse_number(parts[2], "--at pi_E") : 0.0;
        state.N = dims == 4 ? parse_number(parts[3], "--at N") : N;
    }

    emit_or_print(output_path, stability_report_json(stability_report_at(spec.params, state, d)));
    return 0;
}

int run_selfcheck_cmd() {
    const std::vector<CheckResult> results = run_selfchecks();
    bool all_pass = true;
    for (const CheckResult& result : results) {
        all_pass = all_pass && result.pass;
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << ": " << result.detail
                  << "\n";
    }
    std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
    return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic laboratory for a TFV/NEV adoption model with "
                 "environmental externalities and fleet growth"};
    app.set_version_flag("--version", "nevdyn 0.1.0");
    app.require_subcommand(1);

    // simulate ---------------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and emit artifacts");
    std::string sim_config;
    std::string sim_preset;
    std::vector<std::string> sim_sets;
    std::optional<std::string> sim_label;
    std::optional<std::string> sim_out;
    std::optional<int> sim_stride;
    std::optional<std::string> sim_emit;
    std::optional<std::string> sim_channels;
    auto* sim_config_opt = simulate->add_option("--config", sim_config, "Run-config JSON file");
    auto* sim_preset_opt = simulate->add_option("--preset", sim_preset, "Named preset scenario");
    sim_preset_opt->excludes(sim_config_opt);
    simulate->add_option("--set", sim_sets, "Override a parameter, path=value (repeatable)");
    simulate->add_option("--label", sim_label, "Artifact file stem");
    simulate->add_option("--out", sim_out, "Output directory (overrides config and NEVDYN_OUT)");
    simulate->add_option("--stride", sim_stride, "Keep every k-th CSV record")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--emit", sim_emit, "Comma list of artifacts: csv,svg,report");
    simulate->add_option("--channels", sim_channels, "Comma list of SVG channels");

    // scenario ---------------------------------------------------------------
    auto* scenario = app.add_subcommand("scenario", "Inspect the preset catalogue");
    scenario->require_subcommand(1);
    auto* scenario_list = scenario->add_subcommand("list", "List preset names");
    auto* scenario_show = scenario->add_subcommand("show", "Print a preset as run-config JSON");
    std::string show_name;
    scenario_show->add_option("name", show_name, "Preset name")->required();

    // sweep ------------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "Run a parameter grid from a sweep-config file");
    std::string sweep_config;
    std::optional<std::string> sweep_out;
    std::string sweep_label = "sweep";
    unsigned sweep_jobs = 0;
    sweep->add_option("--config", sweep_config, "Sweep-config JSON file")->required();
    sweep->add_option("--out", sweep_out, "Output directory (overrides NEVDYN_OUT)");
    sweep->add_option("--label", sweep_label, "Artifact file stem");
    sweep->add_option("--jobs", sweep_jobs, "Worker threads (0 = hardware)");

    // equilibria -------------------------------------------------------------
    auto* equilibria = app.add_subcommand("equilibria", "Locate and classify all fixed points");
    SpecSource eq_source;
    eq_source.add_options(*equilibria);
    equilibria->add_option("--set", eq_source.sets, "Override a parameter, path=value (repeatable)");
    int eq_dims = 3;
    std::optional<double> eq_n;
    int eq_grid = 1001;
    std::string eq_output;
    equilibria->add_option("--dims", eq_dims, "Reduction: 2 or 3")->check(CLI::IsMember({2, 3}));
    equilibria->add_option("--n", eq_n, "Frozen fleet size (default: the scenario's N0)");
    equilibria->add_option("--grid", eq_grid, "Bracketing grid points")->check(CLI::PositiveNumber);
    equilibria->add_option("--output", eq_output, "Write JSON here instead of stdout");

    // stability --------------------------------------------------------------
    auto* stability = app.add_subcommand("stability", "Stability report at a state");
    SpecSource st_source;
    st_source.add_options(*stability);
    stability->add_option("--set", st_source.sets, "Override a parameter, path=value (repeatable)");
    int st_dims = 3;
    std::string st_at;
    std::optional<double> st_n;
    std::string st_output;
    stability->add_option("--dims", st_dims, "System: 2, 3 or 4")->check(CLI::IsMember({2, 3, 4}));
    stability->add_option("--at", st_at,
                          "State as comma list (x,pi_F for 2; x,pi_F,pi_E for 3; "
                          "x,pi_F,pi_E,N for 4); default: the balanced equilibrium");
    stability->add_option("--n", st_n, "Fleet size when --at omits it");
    stability->add_option("--output", st_output, "Write JSON here instead of stdout");

    // selfcheck --------------------------------------------------------------
    app.add_subcommand("selfcheck", "Run the built-in invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_config, sim_preset, sim_sets, sim_label, sim_out, sim_stride,
                                sim_emit, sim_channels);
        }
        if (scenario->parsed()) {
            if (scenario_list->parsed()) {
                for (const std::string& name : preset_names()) std::cout << name << "\n";
                return 0;
            }
            if (scenario_show->parsed()) {
                RunConfig rc;
                rc.label = show_name;
                rc.inline_spec = preset(show_name);
                std::cout << serialize_run_config(rc);
                return 0;
            }
        }
        if (sweep->parsed()) return run_sweep_cmd(sweep_config, sweep_out, sweep_label, sweep_jobs);
        if (equilibria->parsed()) return run_equilibria(eq_source, eq_dims, eq_n, eq_grid, eq_output);
        if (stability->parsed()) return run_stability(st_source, st_dims, st_at, st_n, st_output);
        return run_selfcheck_cmd();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_usage_error(e.kind()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
