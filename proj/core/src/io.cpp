#include "nevdyn/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kCsvHeader = "t,x,pi_F,pi_E,N,s,g_eff,Pi,neg_pi_E_flag";

[[noreturn]] void config_fail(const std::string& path, const std::string& problem) {
    raise(ErrorKind::ConfigError, "field '" + path + "': " + problem);
}

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
    for (const auto& item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* key) { return item.key() == key; });
        if (!known) config_fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

const Json* find(const Json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const Json& value, const std::string& path) {
    if (!value.is_number()) config_fail(path, "expected a number");
    return value.get<double>();
}

void read_number(const Json& obj, const char* key, double& out, const std::string& path) {
    if (const Json* value = find(obj, key)) out = as_number(*value, path + "." + key);
}

void read_bool(const Json& obj, const char* key, bool& out, const std::string& path) {
    if (const Json* value = find(obj, key)) {
        if (!value->is_boolean()) config_fail(path + "." + key, "expected a boolean");
        out = value->get<bool>();
    }
}

std::string as_string(const Json& value, const std::string& path) {
    if (!value.is_string()) config_fail(path, "expected a string");
    return value.get<std::string>();
}

Regime regime_from_name(const std::string& name, const std::string& path) {
    if (name == "TFVDominant") return Regime::TFVDominant;
    if (name == "Coexistence") return Regime::Coexistence;
    if (name == "NEVDominant") return Regime::NEVDominant;
    config_fail(path, "expected TFVDominant, Coexistence or NEVDominant");
}

void parse_model(const Json& obj, ModelParams& params, const std::string& path) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    check_keys(obj,
               {"a0", "a1", "a2", "a3", "v", "gamma_F", "theta_E", "alpha1", "alpha2", "s_cap",
                "growth"},
               path);
    read_number(obj, "a0", params.a0, path);
    read_number(obj, "a1", params.a1, path);
    read_number(obj, "a2", params.a2, path);
    read_number(obj, "a3", params.a3, path);
    read_number(obj, "v", params.v, path);
    read_number(obj, "gamma_F", params.gamma_F, path);
    read_number(obj, "theta_E", params.theta_E, path);
    read_number(obj, "alpha1", params.alpha1, path);
    read_number(obj, "alpha2", params.alpha2, path);
    read_number(obj, "s_cap", params.s_cap, path);
    if (const Json* growth = find(obj, "growth")) {
        const std::string growth_path = path + ".growth";
        if (!growth->is_object()) config_fail(growth_path, "expected an object");
        check_keys(*growth, {"type", "g", "k1", "k2"}, growth_path);
        if (const Json* type = find(*growth, "type")) {
            const std::string kind = as_string(*type, growth_path + ".type");
            if (kind == "fixed") params.growth.kind = GrowthPolicy::Kind::Fixed;
            else if (kind == "regulated") params.growth.kind = GrowthPolicy::Kind::Regulated;
            else config_fail(growth_path + ".type", "expected 'fixed' or 'regulated'");
        }
        read_number(*growth, "g", params.growth.g, growth_path);
        read_number(*growth, "k1", params.growth.k1, growth_path);
        read_number(*growth, "k2", params.growth.k2, growth_path);
    }
}

void parse_initial(const Json& obj, SystemState& state, const std::string& path) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    check_keys(obj, {"x", "pi_F", "pi_E", "N"}, path);
    read_number(obj, "x", state.x, path);
    read_number(obj, "pi_F", state.pi_F, path);
    read_number(obj, "pi_E", state.pi_E, path);
    read_number(obj, "N", state.N, path);
}

void parse_integration(const Json& obj, IntegrationConfig& config, const std::string& path) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    check_keys(obj, {"t0", "t_end", "dt", "method", "adaptive", "rel_tol", "dt_min", "max_steps"},
               path);
    read_number(obj, "t0", config.t0, path);
    read_number(obj, "t_end", config.t_end, path);
    read_number(obj, "dt", config.dt, path);
    if (const Json* method = find(obj, "method")) {
        const std::string name = as_string(*method, path + ".method");
        if (name == "rk4") config.method = Method::RK4;
        else if (name == "euler") config.method = Method::Euler;
        else config_fail(path + ".method", "expected 'rk4' or 'euler'");
    }
    read_bool(obj, "adaptive", config.adaptive, path);
    read_number(obj, "rel_tol", config.rel_tol, path);
    read_number(obj, "dt_min", config.dt_min, path);
    if (const Json* max_steps = find(obj, "max_steps")) {
        if (!max_steps->is_number_unsigned()) {
            config_fail(path + ".max_steps", "expected a non-negative integer");
        }
        config.max_steps = max_steps->get<std::uint64_t>();
    }
}

ScenarioSpec parse_scenario(const Json& obj, const std::string& path) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    check_keys(obj, {"name", "model", "initial", "integration", "expected_regime"}, path);
    ScenarioSpec spec;
    spec.name = "custom";
    if (const Json* name = find(obj, "name")) spec.name = as_string(*name, path + ".name");
    if (const Json* model = find(obj, "model")) parse_model(*model, spec.params, path + ".model");
    if (const Json* initial = find(obj, "initial")) {
        parse_initial(*initial, spec.initial, path + ".initial");
    }
    if (const Json* integration = find(obj, "integration")) {
        parse_integration(*integration, spec.integration, path + ".integration");
    }
    if (const Json* expected = find(obj, "expected_regime")) {
        spec.expected_regime =
            regime_from_name(as_string(*expected, path + ".expected_regime"), path + ".expected_regime");
    }
    return spec;
}

Json model_to_json(const ModelParams& params) {
    Json growth;
    growth["type"] = params.growth.kind == GrowthPolicy::Kind::Fixed ? "fixed" : "regulated";
    growth["g"] = params.growth.g;
    growth["k1"] = params.growth.k1;
    growth["k2"] = params.growth.k2;
    Json out;
    out["a0"] = params.a0;
    out["a1"] = params.a1;
    out["a2"] = params.a2;
    out["a3"] = params.a3;
    out["v"] = params.v;
    out["gamma_F"] = params.gamma_F;
    out["theta_E"] = params.theta_E;
    out["alpha1"] = params.alpha1;
    out["alpha2"] = params.alpha2;
    out["s_cap"] = params.s_cap;
    out["growth"] = std::move(growth);
    return out;
}

Json initial_to_json(const SystemState& state) {
    Json out;
    out["x"] = state.x;
    out["pi_F"] = state.pi_F;
    out["pi_E"] = state.pi_E;
    out["N"] = state.N;
    return out;
}

Json integration_to_json(const IntegrationConfig& config) {
    Json out;
    out["t0"] = config.t0;
    out["t_end"] = config.t_end;
    out["dt"] = config.dt;
    out["method"] = config.method == Method::RK4 ? "rk4" : "euler";
    out["adaptive"] = config.adaptive;
    out["rel_tol"] = config.rel_tol;
    out["dt_min"] = config.dt_min;
    out["max_steps"] = config.max_steps;
    return out;
}

Json scenario_to_json(const ScenarioSpec& spec) {
    Json out;
    out["name"] = spec.name;
    out["model"] = model_to_json(spec.params);
    out["initial"] = initial_to_json(spec.initial);
    out["integration"] = integration_to_json(spec.integration);
    if (spec.expected_regime) out["expected_regime"] = regime_name(*spec.expected_regime);
    return out;
}

Json parse_text(const std::string& json_text) {
    try {
        return Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        raise(ErrorKind::ConfigError, std::string("invalid JSON: ") + e.what());
    }
}

double parse_csv_number(std::string_view field, std::size_t line_number) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        std::ostringstream oss;
        oss << "line " << line_number << ": '" << field << "' is not a number";
        raise(ErrorKind::ConfigError, oss.str());
    }
    return value;
}

// ---- SVG helpers -----------------------------------------------------------

struct Series {
    const char* color = "#1f77b4";
    std::vector<double> values;
};

double channel_value(const TrajectoryRow& row, const std::string& channel) {
    if (channel == "x") return row.x;
    if (channel == "pi_F") return row.pi_F;
    if (channel == "pi_E") return row.pi_E;
    if (channel == "N") return row.N;
    return row.Pi;
}

const char* channel_color(const std::string& channel) {
    if (channel == "x") return "#1f77b4";
    if (channel == "pi_F") return "#d62728";
    if (channel == "pi_E") return "#2ca02c";
    if (channel == "N") return "#9467bd";
    return "#ff7f0e";
}

std::string fixed2(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                      std::chars_format::fixed, 2);
    return {buffer, result.ptr};
}

double nice_step(double raw) {
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    const double ratio = raw / magnitude;
    if (ratio < 1.5) return magnitude;
    if (ratio < 3.5) return 2.0 * magnitude;
    if (ratio < 7.5) return 5.0 * magnitude;
    return 10.0 * magnitude;
}

std::vector<double> ticks_for(double lo, double hi, int target) {
    const double step = nice_step((hi - lo) / target);
    std::vector<double> out;
    double tick = std::ceil(lo / step) * step;
    while (tick <= hi + 1e-9 * step) {
        out.push_back(tick + 0.0); // normalizes -0
        tick += step;
    }
    return out;
}

void pad_if_degenerate(double& lo, double& hi) {
    if (lo == hi) {
        const double pad = std::max(0.5, 0.1 * std::abs(lo));
        lo -= pad;
        hi += pad;
    }
}

} // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return {buffer, result.ptr};
}

RunConfig parse_run_config(const std::string& json_text) {
    const Json root = parse_text(json_text);
    if (!root.is_object()) config_fail("(root)", "expected an object");
    check_keys(root, {"label", "preset", "scenario", "out_dir", "stride", "emit", "svg_channels"},
               "");

    RunConfig config;
    if (const Json* label = find(root, "label")) config.label = as_string(*label, "label");
    if (const Json* preset_name = find(root, "preset")) {
        config.preset_name = as_string(*preset_name, "preset");
    }
    if (const Json* scenario = find(root, "scenario")) {
        config.inline_spec = parse_scenario(*scenario, "scenario");
    }
    if (config.preset_name.empty() == !config.inline_spec.has_value()) {
        config_fail("(root)", "exactly one of 'preset' and 'scenario' must be given");
    }
    if (const Json* out_dir = find(root, "out_dir")) config.out_dir = as_string(*out_dir, "out_dir");
    if (const Json* stride = find(root, "stride")) {
        if (!stride->is_number_integer()) config_fail("stride", "expected an integer");
        const auto value = stride->get<std::int64_t>();
        if (value < 1) config_fail("stride", "must be >= 1");
        config.stride = static_cast<int>(value);
    }
    if (const Json* emit = find(root, "emit")) {
        if (!emit->is_object()) config_fail("emit", "expected an object");
        check_keys(*emit, {"csv", "svg", "report"}, "emit");
        read_bool(*emit, "csv", config.emit.csv, "emit");
        read_bool(*emit, "svg", config.emit.svg, "emit");
        read_bool(*emit, "report", config.emit.report, "emit");
    }
    if (const Json* channels = find(root, "svg_channels")) {
        if (!channels->is_array()) config_fail("svg_channels", "expected an array of strings");
        config.svg_channels.clear();
        for (std::size_t i = 0; i < channels->size(); ++i) {
            config.svg_channels.push_back(
                as_string((*channels)[i], "svg_channels[" + std::to_string(i) + "]"));
        }
    }
    return config;
}

std::string serialize_run_config(const RunConfig& config) {
    Json root;
    root["label"] = config.label;
    if (!config.preset_name.empty()) root["preset"] = config.preset_name;
    if (config.inline_spec) root["scenario"] = scenario_to_json(*config.inline_spec);
    root["out_dir"] = config.out_dir;
    root["stride"] = config.stride;
    root["emit"] = Json{{"csv", config.emit.csv}, {"svg", config.emit.svg},
                        {"report", config.emit.report}};
    root["svg_channels"] = config.svg_channels;
    return root.dump(2) + "\n";
}

ScenarioSpec resolve_run_config(const RunConfig& config) {
    if (config.preset_name.empty() == !config.inline_spec.has_value()) {
        config_fail("(root)", "exactly one of 'preset' and 'scenario' must be given");
    }
    if (!config.preset_name.empty()) return preset(config.preset_name);
    return *config.inline_spec;
}

SweepSpec parse_sweep_config(const std::string& json_text) {
    const Json root = parse_text(json_text);
    if (!root.is_object()) config_fail("(root)", "expected an object");
    check_keys(root, {"base", "axes", "cell_cap"}, "");

    SweepSpec spec;
    const Json* base = find(root, "base");
    if (base == nullptr) config_fail("base", "required");
    if (!base->is_object()) config_fail("base", "expected an object");
    check_keys(*base, {"preset", "scenario"}, "base");
    const Json* preset_name = find(*base, "preset");
    const Json* scenario = find(*base, "scenario");
    if ((preset_name != nullptr) == (scenario != nullptr)) {
        config_fail("base", "exactly one of 'preset' and 'scenario' must be given");
    }
    spec.base = preset_name != nullptr ? preset(as_string(*preset_name, "base.preset"))
                                       : parse_scenario(*scenario, "base.scenario");

    const Json* axes = find(root, "axes");
    if (axes == nullptr) config_fail("axes", "required");
    if (!axes->is_array()) config_fail("axes", "expected an array");
    for (std::size_t i = 0; i < axes->size(); ++i) {
        const Json& axis = (*axes)[i];
        const std::string path = "axes[" + std::to_string(i) + "]";
        if (!axis.is_object()) config_fail(path, "expected an object");
        SweepAxis out;
        const Json* axis_path = find(axis, "path");
        if (axis_path == nullptr) config_fail(path + ".path", "required");
        out.path = as_string(*axis_path, path + ".path");
        if (const Json* values = find(axis, "values")) {
            check_keys(axis, {"path", "values"}, path);
            if (!values->is_array() || values->empty()) {
                config_fail(path + ".values", "expected a non-empty array of numbers");
            }
            for (std::size_t k = 0; k < values->size(); ++k) {
                out.values.push_back(
                    as_number((*values)[k], path + ".values[" + std::to_string(k) + "]"));
            }
        } else {
            check_keys(axis, {"path", "start", "stop", "count"}, path);
            const Json* start = find(axis, "start");
            const Json* stop = find(axis, "stop");
            const Json* count = find(axis, "count");
            if (start == nullptr || stop == nullptr || count == nullptr) {
                config_fail(path, "expected either 'values' or 'start'/'stop'/'count'");
            }
            const double lo = as_number(*start, path + ".start");
            const double hi = as_number(*stop, path + ".stop");
            if (!count->is_number_integer()) config_fail(path + ".count", "expected an integer");
            const auto n = count->get<std::int64_t>();
            if (n < 1) config_fail(path + ".count", "must be >= 1");
            for (std::int64_t k = 0; k < n; ++k) {
                out.values.push_back(n == 1 ? lo
                                            : lo + static_cast<double>(k) * (hi - lo)
                                                  / static_cast<double>(n - 1));
            }
        }
        spec.axes.push_back(std::move(out));
    }

    if (const Json* cap = find(root, "cell_cap")) {
        if (!cap->is_number_unsigned()) config_fail("cell_cap", "expected a non-negative integer");
        spec.cell_cap = cap->get<std::uint64_t>();
    }
    return spec;
}

std::string trajectory_csv(const Trajectory& trajectory, int stride) {
    if (stride < 1) raise(ErrorKind::InvalidParams, "CSV stride must be >= 1");
    std::string out = kCsvHeader;
    out += '\n';
    const std::size_t n = trajectory.rows.size();
    auto emit_row = [&](const TrajectoryRow& row) {
        out += format_double(row.t);
        out += ',';
        out += format_double(row.x);
        out += ',';
        out += format_double(row.pi_F);
        out += ',';
        out += format_double(row.pi_E);
        out += ',';
        out += format_double(row.N);
        out += ',';
        out += format_double(row.s);
        out += ',';
        out += format_double(row.g_eff);
        out += ',';
        out += format_double(row.Pi);
        out += ',';
        out += row.neg_pi_E ? '1' : '0';
        out += '\n';
    };
    std::size_t last_emitted = n; // sentinel: nothing emitted yet
    for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(stride)) {
        emit_row(trajectory.rows[i]);
        last_emitted = i;
    }
    // The terminal record always makes it into the export.
    if (n > 0 && last_emitted != n - 1) emit_row(trajectory.rows[n - 1]);
    return out;
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& csv_text) {
    std::vector<TrajectoryRow> rows;
    std::istringstream stream(csv_text);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(stream, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_number == 1) {
            if (line != kCsvHeader) {
                raise(ErrorKind::ConfigError,
                      std::string("unexpected CSV header; want '") + kCsvHeader + "'");
            }
            continue;
        }
        if (line.empty()) continue;

        std::array<std::string_view, 9> fields;
        std::size_t count = 0;
        std::string_view rest = line;
        while (true) {
            const std::size_t comma = rest.find(',');
            if (count >= fields.size()) {
                std::ostringstream oss;
                oss << "line " << line_number << ": too many fields";
                raise(ErrorKind::ConfigError, oss.str());
            }
            fields[count++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (count != fields.size()) {
            std::ostringstream oss;
            oss << "line " << line_number << ": expected " << fields.size() << " fields, got "
                << count;
            raise(ErrorKind::ConfigError, oss.str());
        }

        TrajectoryRow row;
        row.t = parse_csv_number(fields[0], line_number);
        row.x = parse_csv_number(fields[1], line_number);
        row.pi_F = parse_csv_number(fields[2], line_number);
        row.pi_E = parse_csv_number(fields[3], line_number);
        row.N = parse_csv_number(fields[4], line_number);
        row.s = parse_csv_number(fields[5], line_number);
        row.g_eff = parse_csv_number(fields[6], line_number);
        row.Pi = parse_csv_number(fields[7], line_number);
        if (fields[8] == "1") row.neg_pi_E = true;
        else if (fields[8] == "0") row.neg_pi_E = false;
        else {
            std::ostringstream oss;
            oss << "line " << line_number << ": neg_pi_E_flag must be 0 or 1";
            raise(ErrorKind::ConfigError, oss.str());
        }
        rows.push_back(row);
    }
    return rows;
}

std::string trajectory_svg(const Trajectory& trajectory,
                           const std::vector<std::string>& channels) {
    if (trajectory.rows.empty()) raise(ErrorKind::EmptyTrajectory, "nothing to plot");
    if (channels.empty()) raise(ErrorKind::ConfigError, "svg_channels must not be empty");
    for (const std::string& channel : channels) {
        if (channel != "x" && channel != "pi_F" && channel != "pi_E" && channel != "N"
            && channel != "Pi") {
            raise(ErrorKind::ConfigError,
                  "unknown channel '" + channel + "'; available: x pi_F pi_E N Pi");
        }
    }

    // Decimate long trajectories to roughly 2000 plotted records, always
    // keeping the terminal one.
    const std::size_t n = trajectory.rows.size();
    const std::size_t stride = (n + 1999) / 2000;
    std::vector<std::size_t> picks;
    for (std::size_t i = 0; i < n; i += stride) picks.push_back(i);
    if (picks.back() != n - 1) picks.push_back(n - 1);

    const double width = 960.0;
    const double margin_l = 72.0;
    const double margin_r = 24.0;
    const double margin_t = 20.0;
    const double margin_b = 44.0;
    const double panel_h = 160.0;
    const double panel_gap = 40.0;
    const double plot_w = width - margin_l - margin_r;
    const auto panel_count = static_cast<double>(channels.size());
    const double height =
        margin_t + panel_count * panel_h + (panel_count - 1.0) * panel_gap + margin_b;

    double t_lo = trajectory.rows[picks.front()].t;
    double t_hi = trajectory.rows[picks.back()].t;
    pad_if_degenerate(t_lo, t_hi);
    const auto px = [&](double t) { return margin_l + (t - t_lo) / (t_hi - t_lo) * plot_w; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(width) + "\" height=\""
           + fixed2(height) + "\" viewBox=\"0 0 " + fixed2(width) + " " + fixed2(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg += "<g font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\" fill=\"#1a1a1a\">\n";

    const std::vector<double> t_ticks = ticks_for(t_lo, t_hi, 8);
    for (std::size_t p = 0; p < channels.size(); ++p) {
        const std::string& channel = channels[p];
        const double top = margin_t + static_cast<double>(p) * (panel_h + panel_gap);
        const double bottom = top + panel_h;

        double v_lo = channel_value(trajectory.rows[picks.front()], channel);
        double v_hi = v_lo;
        for (const std::size_t i : picks) {
            const double v = channel_value(trajectory.rows[i], channel);
            v_lo = std::min(v_lo, v);
            v_hi = std::max(v_hi, v);
        }
        pad_if_degenerate(v_lo, v_hi);
        const auto py = [&](double v) { return bottom - (v - v_lo) / (v_hi - v_lo) * panel_h; };

        svg += "<text x=\"" + fixed2(margin_l) + "\" y=\"" + fixed2(top - 6.0)
               + "\" font-weight=\"bold\">" + channel + "</text>\n";

        for (const double tick : ticks_for(v_lo, v_hi, 4)) {
            const std::string y = fixed2(py(tick));
            svg += "<line x1=\"" + fixed2(margin_l) + "\" y1=\"" + y + "\" x2=\""
                   + fixed2(margin_l + plot_w) + "\" y2=\"" + y
                   + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + fixed2(margin_l - 8.0) + "\" y=\"" + y
                   + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + format_double(tick)
                   + "</text>\n";
        }
        for (const double tick : t_ticks) {
            const std::string x = fixed2(px(tick));
            svg += "<line x1=\"" + x + "\" y1=\"" + fixed2(top) + "\" x2=\"" + x + "\" y2=\""
                   + fixed2(bottom) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
            if (p + 1 == channels.size()) {
                svg += "<text x=\"" + x + "\" y=\"" + fixed2(bottom + 18.0)
                       + "\" text-anchor=\"middle\">" + format_double(tick) + "</text>\n";
            }
        }
        svg += "<rect x=\"" + fixed2(margin_l) + "\" y=\"" + fixed2(top) + "\" width=\""
               + fixed2(plot_w) + "\" height=\"" + fixed2(panel_h)
               + "\" fill=\"none\" stroke=\"#555555\" stroke-width=\"1\"/>\n";

        const char* color = channel_color(channel);
        if (picks.size() == 1) {
            svg += "<circle cx=\"" + fixed2(px(trajectory.rows[picks[0]].t)) + "\" cy=\""
                   + fixed2(py(channel_value(trajectory.rows[picks[0]], channel))) + "\" r=\"3\" fill=\""
                   + color + "\"/>\n";
        } else {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = 0; k < picks.size(); ++k) {
                const TrajectoryRow& row = trajectory.rows[picks[k]];
                if (k > 0) svg += ' ';
                svg += fixed2(px(row.t));
                svg += ',';
                svg += fixed2(py(channel_value(row, channel)));
            }
            svg += "\"/>\n";
        }
    }
    svg += "<text x=\"" + fixed2(margin_l + plot_w / 2.0) + "\" y=\"" + fixed2(height - 10.0)
           + "\" text-anchor=\"middle\">t</text>\n";
    svg += "</g>\n</svg>\n";
    return svg;
}

std::string diagnostics_json(const ScenarioSpec& spec, const RegimeDiagnostics& diagnostics) {
    Json root;
    root["scenario"] = spec.name;
    if (spec.expected_regime) root["expected_regime"] = regime_name(*spec.expected_regime);
    else root["expected_regime"] = nullptr;
    root["regime"] = regime_name(diagnostics.regime);
    Json terminal;
    terminal["t"] = diagnostics.terminal_t;
    terminal["x"] = diagnostics.terminal_x;
    terminal["pi_F"] = diagnostics.terminal_pi_F;
    terminal["pi_E"] = diagnostics.terminal_pi_E;
    terminal["N"] = diagnostics.terminal_N;
    root["terminal"] = std::move(terminal);
    root["peak_Pi"] = diagnostics.peak_Pi;
    root["peak_Pi_t"] = diagnostics.peak_Pi_t;
    root["model"] = model_to_json(spec.params);
    root["initial"] = initial_to_json(spec.initial);
    root["integration"] = integration_to_json(spec.integration);
    return root.dump(2) + "\n";
}

namespace {

Json report_to_json(const StabilityReport& report) {
    Json root;
    root["state"] = initial_to_json(report.state);
    root["dims"] = static_cast<int>(report.dims);
    root["residual_norm"] = report.residual_norm;
    Json jacobian = Json::array();
    for (int i = 0; i < report.jacobian.n; ++i) {
        Json row = Json::array();
        for (int j = 0; j < report.jacobian.n; ++j) row.push_back(report.jacobian.at(i, j));
        jacobian.push_back(std::move(row));
    }
    root["jacobian"] = std::move(jacobian);
    Json eigen = Json::array();
    for (const auto& lambda : report.eigen) {
        eigen.push_back(Json{{"re", lambda.real()}, {"im", lambda.imag()}});
    }
    root["eigenvalues"] = std::move(eigen);
    root["trace"] = report.trace;
    root["det"] = report.det;
    root["max_real_part"] = report.max_real_part;
    root["classification"] = classification_name(report.classification);
    Json rh;
    rh["applicable"] = report.rh_applicable;
    rh["stable"] = report.rh_stable;
    Json conditions = Json::array();
    for (const RhCondition& condition : report.rh_conditions) {
        conditions.push_back(
            Json{{"name", condition.name}, {"value", condition.value}, {"ok", condition.ok}});
    }
    rh["conditions"] = std::move(conditions);
    root["routh_hurwitz"] = std::move(rh);
    return root;
}

} // namespace

std::string stability_report_json(const StabilityReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

std::string fixed_points_json(const std::vector<StabilityReport>& reports) {
    Json root;
    root["count"] = reports.size();
    Json points = Json::array();
    for (const StabilityReport& report : reports) points.push_back(report_to_json(report));
    root["fixed_points"] = std::move(points);
    return root.dump(2) + "\n";
}

std::string sweep_csv(const SweepResult& result) {
    std::string out;
    for (const SweepAxis& axis : result.axes) {
        out += axis.path;
        out += ',';
    }
    out += "terminal_t,terminal_x,terminal_pi_F,terminal_pi_E,terminal_N,peak_Pi,peak_Pi_t,regime,error\n";
    for (const SweepCell& cell : result.cells) {
        for (const double coordinate : cell.coordinates) {
            out += format_double(coordinate);
            out += ',';
        }
        if (cell.diagnostics) {
            const RegimeDiagnostics& d = *cell.diagnostics;
            out += format_double(d.terminal_t);
            out += ',';
            out += format_double(d.terminal_x);
            out += ',';
            out += format_double(d.terminal_pi_F);
            out += ',';
            out += format_double(d.terminal_pi_E);
            out += ',';
            out += format_double(d.terminal_N);
            out += ',';
            out += format_double(d.peak_Pi);
            out += ',';
            out += format_double(d.peak_Pi_t);
            out += ',';
            out += regime_name(d.regime);
            out += ',';
        } else {
            out += ",,,,,,,,";
        }
        std::string error = cell.error;
        std::replace(error.begin(), error.end(), ',', ';');
        out += error;
        out += '\n';
    }
    return out;
}

} // namespace nevdyn
