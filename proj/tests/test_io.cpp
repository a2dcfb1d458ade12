#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nevdyn/errors.hpp"
#include "nevdyn/io.hpp"

using namespace nevdyn;
using Json = nlohmann::json;

namespace {

Trajectory short_run(const char* preset_name, double t_end, bool adaptive = false) {
    ScenarioSpec spec = preset(preset_name);
    spec.integration.t_end = t_end;
    spec.integration.adaptive = adaptive;
    return run_scenario(spec).trajectory;
}

ErrorKind config_error_kind(const std::string& json_text) {
    try {
        (void)parse_run_config(json_text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a parse failure");
    return ErrorKind::ConfigError;
}

} // namespace

TEST_CASE("trajectory CSV carries the exact header and round-trips bitwise") {
    Trajectory traj = short_run("S1_strong", 5.0);
    std::string csv = trajectory_csv(traj, 1);
    CHECK(csv.rfind("t,x,pi_F,pi_E,N,s,g_eff,Pi,neg_pi_E_flag\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);

    std::vector<TrajectoryRow> parsed = parse_trajectory_csv(csv);
    REQUIRE(parsed.size() == traj.size());
    bool saw_negative_flag = false;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].t == traj.rows[i].t);
        CHECK(parsed[i].x == traj.rows[i].x);
        CHECK(parsed[i].pi_F == traj.rows[i].pi_F);
        CHECK(parsed[i].pi_E == traj.rows[i].pi_E);
        CHECK(parsed[i].N == traj.rows[i].N);
        CHECK(parsed[i].s == traj.rows[i].s);
        CHECK(parsed[i].g_eff == traj.rows[i].g_eff);
        CHECK(parsed[i].Pi == traj.rows[i].Pi);
        CHECK(parsed[i].neg_pi_E == traj.rows[i].neg_pi_E);
        saw_negative_flag = saw_negative_flag || parsed[i].neg_pi_E;
    }
    // The opening slide toward the TFV pole drags pi_E negative, so the flag
    // column is genuinely exercised.
    CHECK(saw_negative_flag);
}

TEST_CASE("stride keeps every k-th row and always the terminal one") {
    Trajectory traj = short_run("S1_weak", 0.24);
    REQUIRE(traj.size() == 25);

    std::string csv = trajectory_csv(traj, 10);
    auto parsed = parse_trajectory_csv(csv);
    REQUIRE(parsed.size() == 4); // rows 0, 10, 20 and the terminal 24
    CHECK(parsed[0].t == traj.rows[0].t);
    CHECK(parsed[1].t == traj.rows[10].t);
    CHECK(parsed[2].t == traj.rows[20].t);
    CHECK(parsed[3].t == traj.rows[24].t);

    Trajectory aligned = short_run("S1_weak", 0.20);
    REQUIRE(aligned.size() == 21);
    auto aligned_rows = parse_trajectory_csv(trajectory_csv(aligned, 10));
    REQUIRE(aligned_rows.size() == 3); // the terminal row is not duplicated
    CHECK(aligned_rows[2].t == aligned.rows[20].t);
}

TEST_CASE("CSV parsing rejects foreign layouts") {
    try {
        (void)parse_trajectory_csv("time,value\n0,1\n");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
    }
    try {
        (void)parse_trajectory_csv("t,x,pi_F,pi_E,N,s,g_eff,Pi,neg_pi_E_flag\n1,2,3\n");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
    }
}

TEST_CASE("identical runs emit byte-identical artifacts") {
    Trajectory a = short_run("S1_strong", 10.0, true);
    Trajectory b = short_run("S1_strong", 10.0, true);
    CHECK(trajectory_csv(a, 5) == trajectory_csv(b, 5));
    const std::vector<std::string> channels{"x", "pi_F", "pi_E", "N", "Pi"};
    CHECK(trajectory_svg(a, channels) == trajectory_svg(b, channels));
}

TEST_CASE("SVG output is self-contained and guards its inputs") {
    Trajectory traj = short_run("S1_weak", 2.0);
    std::string svg = trajectory_svg(traj, {"x", "N"});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
    // Self-contained: the only URL allowed anywhere is the SVG namespace.
    const std::string_view ns = "http://www.w3.org/2000/svg";
    bool only_namespace_urls = true;
    for (std::size_t pos = svg.find("http://"); pos != std::string::npos;
         pos = svg.find("http://", pos + 1)) {
        if (svg.compare(pos, ns.size(), ns) != 0) only_namespace_urls = false;
    }
    CHECK(only_namespace_urls);

    ScenarioSpec spec = preset("S1_weak");
    spec.integration.t_end = spec.integration.t0;
    Trajectory single = run_scenario(spec).trajectory;
    REQUIRE(single.size() == 1);
    std::string dot = trajectory_svg(single, {"x"});
    CHECK(dot.find("circle") != std::string::npos);

    try {
        (void)trajectory_svg(Trajectory{}, {"x"});
        FAIL("expected EmptyTrajectory");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyTrajectory);
    }
    try {
        (void)trajectory_svg(traj, {"momentum"});
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
    }
    try {
        (void)trajectory_svg(traj, {});
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
    }
}

TEST_CASE("run configs parse, validate strictly, and round-trip") {
    RunConfig minimal = parse_run_config(R"({"preset": "S1_weak"})");
    CHECK(minimal.preset_name == "S1_weak");
    CHECK(minimal.label == "run");
    CHECK(minimal.stride == 10);
    CHECK(minimal.emit.csv);
    CHECK(minimal.emit.report);
    CHECK_FALSE(minimal.inline_spec.has_value());
    CHECK(resolve_run_config(minimal).params.a1 == 0.5);

    RunConfig full;
    full.label = "bespoke";
    full.inline_spec = preset("S2_one_sided");
    full.preset_name.clear();
    full.out_dir = "artifacts";
    full.stride = 4;
    full.emit = {true, true, false};
    full.svg_channels = {"x", "Pi"};
    const std::string once = serialize_run_config(full);
    const std::string twice = serialize_run_config(parse_run_config(once));
    CHECK(once == twice);

    RunConfig reparsed = parse_run_config(once);
    REQUIRE(reparsed.inline_spec.has_value());
    CHECK(reparsed.inline_spec->params.a0 == 1.0);
    CHECK(reparsed.inline_spec->params.growth.g == 0.1);
    CHECK(reparsed.inline_spec->expected_regime == Regime::NEVDominant);
    CHECK(reparsed.stride == 4);
    CHECK(reparsed.svg_channels == std::vector<std::string>{"x", "Pi"});

    CHECK(config_error_kind(R"({"preset": "S1_weak", "prest": 1})") == ErrorKind::ConfigError);
    CHECK(config_error_kind(R"({})") == ErrorKind::ConfigError);
    CHECK(config_error_kind(R"({"preset": "S1_weak", "stride": 0})") == ErrorKind::ConfigError);
    CHECK(config_error_kind(R"({"preset": "S1_weak", "stride": 2.5})") == ErrorKind::ConfigError);
    CHECK(config_error_kind("not json at all") == ErrorKind::ConfigError);

    // Exactly one of preset / scenario.
    const std::string both = R"({"preset": "S1_weak", "scenario": {"name": "x"}})";
    CHECK(config_error_kind(both) == ErrorKind::ConfigError);

    try {
        (void)parse_run_config(R"({"preset": "S1_weak", "prest": 1})");
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("prest") != std::string::npos);
    }
}

TEST_CASE("inline scenarios reject unknown fields with a precise path") {
    const std::string bad_model = R"({
      "scenario": {
        "name": "custom",
        "model": {"a0": 1.0, "a9": 2.0},
        "initial": {"x": 0.0, "N": 10.0},
        "integration": {"t_end": 10.0}
      }
    })";
    try {
        (void)parse_run_config(bad_model);
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
        CHECK(std::string(e.what()).find("a9") != std::string::npos);
    }

    const std::string bad_growth = R"({
      "scenario": {
        "name": "custom",
        "model": {"growth": {"type": "cubic", "g": 0.1}},
        "initial": {},
        "integration": {}
      }
    })";
    CHECK(config_error_kind(bad_growth) == ErrorKind::ConfigError);

    const std::string bad_regime = R"({
      "scenario": {
        "name": "custom",
        "model": {},
        "initial": {},
        "integration": {},
        "expected_regime": "Majority"
      }
    })";
    CHECK(config_error_kind(bad_regime) == ErrorKind::ConfigError);
}

TEST_CASE("sweep configs expand value lists and linear spans") {
    const std::string text = R"({
      "base": {"preset": "S1_weak"},
      "axes": [
        {"path": "a0", "values": [0.5, 2.5, 4.5]},
        {"path": "a1", "start": 0.0, "stop": 1.0, "count": 5}
      ],
      "cell_cap": 100
    })";
    SweepSpec spec = parse_sweep_config(text);
    CHECK(spec.base.name == "S1_weak");
    CHECK(spec.cell_cap == 100);
    REQUIRE(spec.axes.size() == 2);
    CHECK(spec.axes[0].values == std::vector<double>{0.5, 2.5, 4.5});
    REQUIRE(spec.axes[1].values.size() == 5);
    CHECK(spec.axes[1].values.front() == 0.0);
    CHECK(spec.axes[1].values[2] == 0.5);
    CHECK(spec.axes[1].values.back() == 1.0);

    auto sweep_error = [](const std::string& body) {
        try {
            (void)parse_sweep_config(body);
        } catch (const Error& e) {
            return e.kind();
        }
        FAIL("expected a parse failure");
        return ErrorKind::ConfigError;
    };
    CHECK(sweep_error(R"({"axes": []})") == ErrorKind::ConfigError);
    CHECK(sweep_error(R"({"base": {"preset": "S1_weak", "scenario": {}}, "axes": []})") ==
          ErrorKind::ConfigError);
    CHECK(sweep_error(R"({"base": {"preset": "S1_weak"},
                          "axes": [{"path": "a0", "start": 0.0}]})") == ErrorKind::ConfigError);
    CHECK(sweep_error(R"({"base": {"preset": "S1_weak"},
                          "axes": [{"path": "a0", "values": [1.0], "count": 3}]})") ==
          ErrorKind::ConfigError);
}

TEST_CASE("diagnostics reports serialize the scenario and outcome") {
    ScenarioSpec spec = preset("S1_weak");
    spec.integration.t_end = 5.0;
    ScenarioResult result = run_scenario(spec);
    Json j = Json::parse(diagnostics_json(spec, result.diagnostics));
    CHECK(j.at("scenario") == "S1_weak");
    CHECK(j.at("expected_regime") == "Coexistence");
    CHECK(j.at("regime").is_string());
    CHECK(j.at("terminal").at("t") == 5.0);
    CHECK(j.at("terminal").at("x").is_number());
    CHECK(j.at("peak_Pi").is_number());
    CHECK(j.at("model").at("a1") == 0.5);
    CHECK(j.at("model").at("growth").at("type") == "fixed");
    CHECK(j.at("initial").at("N") == 10.0);
    CHECK(j.at("integration").at("t_end") == 5.0);
}

TEST_CASE("stability reports serialize eigenvalues and test conditions") {
    ModelParams p;
    p.v = 0.6;
    p.gamma_F = 0.9;
    p.theta_E = 0.2;
    p.alpha1 = 0.03;
    p.alpha2 = 0.07;
    p.a1 = 1.5;
    p.a2 = 1.0;
    p.a3 = -1.0;
    p.a0 = balanced_a0(p, 10.0);

    StabilityReport report = stability_report_at(p, balanced_fixed_point(p, 10.0), Dims::ThreeD);
    Json j = Json::parse(stability_report_json(report));
    CHECK(j.at("dims") == 3);
    CHECK(j.at("classification") == "Stable");
    CHECK(j.at("residual_norm").is_number());
    REQUIRE(j.at("jacobian").size() == 3);
    REQUIRE(j.at("jacobian").at(0).size() == 3);
    REQUIRE(j.at("eigenvalues").size() == 3);
    CHECK(j.at("eigenvalues").at(0).contains("re"));
    CHECK(j.at("eigenvalues").at(0).contains("im"));
    CHECK(j.at("routh_hurwitz").at("applicable") == true);
    CHECK(j.at("routh_hurwitz").at("stable") == true);
    CHECK(j.at("routh_hurwitz").at("conditions").size() == 4);

    auto fps = find_fixed_points(p, 10.0, Dims::ThreeD);
    std::vector<StabilityReport> reports;
    for (const FixedPoint& fp : fps) reports.push_back(classify_equilibrium(p, fp));
    Json cloud = Json::parse(fixed_points_json(reports));
    CHECK(cloud.at("count") == reports.size());
    CHECK(cloud.at("fixed_points").size() == reports.size());
}

TEST_CASE("sweep tables list coordinates, diagnostics, and sanitized errors") {
    SweepResult result;
    result.axes.push_back({"a0", {0.5, 2.5}});
    SweepCell good;
    good.coordinates = {0.5};
    RegimeDiagnostics d;
    d.terminal_t = 10.0;
    d.terminal_x = 0.75;
    d.regime = Regime::NEVDominant;
    good.diagnostics = d;
    SweepCell bad;
    bad.coordinates = {2.5};
    bad.error = "InvalidParams: dt, must be positive";
    result.cells = {good, bad};

    std::string csv = sweep_csv(result);
    CHECK(csv.rfind("a0,terminal_t,terminal_x,terminal_pi_F,terminal_pi_E,terminal_N,"
                    "peak_Pi,peak_Pi_t,regime,error\n", 0) == 0);
    CHECK(csv.find("0.5,10,0.75,0,0,0,0,0,NEVDominant,\n") != std::string::npos);
    // Commas inside error text may not break the table apart.
    CHECK(csv.find("2.5,,,,,,,,,InvalidParams: dt; must be positive\n") != std::string::npos);
}

TEST_CASE("doubles print in shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-0.5) == "-0.5");
    CHECK(format_double(0.0) == "0");

    std::mt19937_64 rng(0x666d74ULL);
    for (int i = 0; i < 2000; ++i) {
        double value;
        if (i % 7 == 0) {
            value = static_cast<double>(static_cast<std::int64_t>(rng()));
        } else {
            const double mant = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const int expo = static_cast<int>(rng() % 613) - 306;
            value = (rng() & 1u ? -1.0 : 1.0) * std::ldexp(mant + 0.5, expo);
        }
        const std::string text = format_double(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
}
