#include "nevdyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

/// How far past |x| = 1 a step may land before it counts as a breach instead
/// of roundoff. Overshoots within the tolerance are clamped silently.
constexpr double kOvershootTol = 1e-12;
constexpr double kDtMinDivisor = 1024.0;

SystemState advance(const SystemState& state, const Derivative& d, double h) {
    SystemState out;
    out.x = state.x + h * d.dx_dt;
    out.pi_F = state.pi_F + h * d.dpi_F_dt;
    out.pi_E = state.pi_E + h * d.dpi_E_dt;
    out.N = state.N + h * d.dN_dt;
    return out;
}

enum class StepFault { None, Accuracy, Breach, Overflow, NonFinite };

/// Clamps a roundoff-sized overshoot of |x| <= 1 in place; reports anything
/// worse. N <= 0 cannot arise from the dynamics, so it is treated as a breach.
StepFault inspect(SystemState& state) {
    if (!std::isfinite(state.x) || !std::isfinite(state.pi_F) || !std::isfinite(state.pi_E)
        || !std::isfinite(state.N) || state.N <= 0.0) {
        return StepFault::NonFinite;
    }
    if (std::abs(state.x) > 1.0 + kOvershootTol) return StepFault::Breach;
    state.x = std::clamp(state.x, -1.0, 1.0);
    return StepFault::None;
}

struct StepAttempt {
    StepFault fault = StepFault::None;
    SystemState result{};
    std::string detail;
};

/// Step doubling: one full step against two half steps, accepted only when
/// every component agrees to rel_tol on the mixed absolute/relative scale
/// max(1, |value|). The more accurate half-step result is kept. The opinion
/// index of the candidate is evaluated here so a cap overflow surfaces as a
/// rejection rather than a mid-run error.
StepAttempt attempt_step(const ModelParams& params, const SystemState& state, double h,
                         double rel_tol) {
    StepAttempt out;
    SystemState full;
    SystemState half;
    try {
        full = step_rk4(params, state, h);
        SystemState mid = step_rk4(params, state, 0.5 * h);
        if (StepFault f = inspect(mid); f != StepFault::None) {
            out.fault = f;
            return out;
        }
        half = step_rk4(params, mid, 0.5 * h);
        if (StepFault f = inspect(full); f != StepFault::None) {
            out.fault = f;
            return out;
        }
        if (StepFault f = inspect(half); f != StepFault::None) {
            out.fault = f;
            return out;
        }
        (void)opinion_index(params, half);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::OpinionOverflow) {
            out.fault = StepFault::Overflow;
            out.detail = e.what();
            return out;
        }
        throw;
    }

    const double pairs[4][2] = {{full.x, half.x},
                                {full.pi_F, half.pi_F},
                                {full.pi_E, half.pi_E},
                                {full.N, half.N}};
    for (const auto& pair : pairs) {
        const double scale = std::max(1.0, std::abs(pair[1]));
        if (std::abs(pair[0] - pair[1]) > rel_tol * scale) {
            out.fault = StepFault::Accuracy;
            return out;
        }
    }
    out.result = half;
    return out;
}

TrajectoryRow make_row(const ModelParams& params, double t, const SystemState& state) {
    TrajectoryRow row;
    row.t = t;
    row.x = state.x;
    row.pi_F = state.pi_F;
    row.pi_E = state.pi_E;
    row.N = state.N;
    row.s = opinion_index(params, state);
    row.g_eff = effective_growth(params, state);
    row.Pi = aggregate_externality(params, state);
    row.neg_pi_E = state.pi_E < 0.0;
    return row;
}

[[noreturn]] void raise_at(ErrorKind kind, const char* what, double t, double h) {
    std::ostringstream oss;
    oss << what << " at t = " << t << " (step size " << h << ")";
    raise(kind, oss.str());
}

void validate_config(const IntegrationConfig& config) {
    if (!std::isfinite(config.t0) || !std::isfinite(config.t_end) || !std::isfinite(config.dt)
        || !std::isfinite(config.rel_tol) || !std::isfinite(config.dt_min)) {
        raise(ErrorKind::InvalidParams, "integration config has a non-finite field");
    }
    if (config.t_end < config.t0) raise(ErrorKind::InvalidParams, "t_end must be >= t0");
    if (config.dt <= 0.0) raise(ErrorKind::InvalidParams, "dt must be > 0");
    if (config.rel_tol <= 0.0) raise(ErrorKind::InvalidParams, "rel_tol must be > 0");
    if (config.dt_min < 0.0) raise(ErrorKind::InvalidParams, "dt_min must be >= 0");
    if (config.dt_min > config.dt) raise(ErrorKind::InvalidParams, "dt_min must not exceed dt");
    if (config.max_steps == 0) raise(ErrorKind::InvalidParams, "max_steps must be >= 1");
    if (config.adaptive && config.method == Method::Euler) {
        raise(ErrorKind::InvalidParams, "adaptive stepping is defined for RK4 only");
    }
}

} // namespace

SystemState step_rk4(const ModelParams& params, const SystemState& state, double dt) {
    const Derivative k1 = vector_field(params, state);
    const Derivative k2 = vector_field(params, advance(state, k1, 0.5 * dt));
    const Derivative k3 = vector_field(params, advance(state, k2, 0.5 * dt));
    const Derivative k4 = vector_field(params, advance(state, k3, dt));

    const double w = dt / 6.0;
    SystemState out;
    out.x = state.x + w * (k1.dx_dt + 2.0 * k2.dx_dt + 2.0 * k3.dx_dt + k4.dx_dt);
    out.pi_F = state.pi_F + w * (k1.dpi_F_dt + 2.0 * k2.dpi_F_dt + 2.0 * k3.dpi_F_dt + k4.dpi_F_dt);
    out.pi_E = state.pi_E + w * (k1.dpi_E_dt + 2.0 * k2.dpi_E_dt + 2.0 * k3.dpi_E_dt + k4.dpi_E_dt);
    out.N = state.N + w * (k1.dN_dt + 2.0 * k2.dN_dt + 2.0 * k3.dN_dt + k4.dN_dt);
    return out;
}

SystemState step_euler(const ModelParams& params, const SystemState& state, double dt) {
    return advance(state, vector_field(params, state), dt);
}

Trajectory integrate(const ModelParams& params, const SystemState& initial,
                     const IntegrationConfig& config) {
    validate(params);
    validate(initial);
    validate_config(config);

    Trajectory traj;
    traj.params = params;
    traj.config = config;

    const double span = config.t_end - config.t0;
    const double eps_end = 1e-12 * std::max(1.0, std::abs(config.t_end));
    traj.rows.reserve(std::min<std::size_t>(
        static_cast<std::size_t>(span / config.dt) + 2, std::size_t{1} << 21));
    traj.rows.push_back(make_row(params, config.t0, initial));

    SystemState state = initial;
    double t = config.t0;

    if (!config.adaptive) {
        std::uint64_t k = 0;
        while (config.t_end - t > eps_end) {
            if (k >= config.max_steps) {
                raise_at(ErrorKind::StepLimitExceeded, "step budget exhausted", t, config.dt);
            }
            double t_next = config.t0 + static_cast<double>(k + 1) * config.dt;
            double h = config.dt;
            if (t_next >= config.t_end - eps_end) {
                t_next = config.t_end;
                h = config.t_end - t;
            }
            SystemState next = config.method == Method::RK4 ? step_rk4(params, state, h)
                                                            : step_euler(params, state, h);
            switch (inspect(next)) {
            case StepFault::None: break;
            case StepFault::Breach:
                raise_at(ErrorKind::InvariantBreach, "x left [-1, 1]", t_next, h);
            default:
                raise_at(ErrorKind::InvariantBreach, "state left the admissible region", t_next, h);
            }
            state = next;
            t = t_next;
            ++k;
            traj.rows.push_back(make_row(params, t, state));
        }
        return traj;
    }

    const double floor = config.dt_min > 0.0 ? config.dt_min : config.dt / kDtMinDivisor;
    double h_cur = config.dt;
    std::uint64_t attempts = 0;
    while (config.t_end - t > eps_end) {
        if (++attempts > config.max_steps) {
            raise_at(ErrorKind::StepLimitExceeded, "step budget exhausted", t, h_cur);
        }
        double h = std::min(h_cur, config.t_end - t);
        // If the leftover after this step would be below the time resolution,
        // stretch the step (by at most eps_end) to land exactly on t_end.
        if (config.t_end - (t + h) <= eps_end) h = config.t_end - t;
        if (t + h == t) raise_at(ErrorKind::StepUnderflow, "step size underflowed", t, h);

        StepAttempt attempt = attempt_step(params, state, h, config.rel_tol);
        if (attempt.fault == StepFault::None) {
            t += h;
            state = attempt.result;
            traj.rows.push_back(make_row(params, t, state));
            h_cur = std::min(2.0 * h, config.dt);
            continue;
        }
        if (h <= floor * (1.0 + 1e-12)) {
            switch (attempt.fault) {
            case StepFault::Breach:
                raise_at(ErrorKind::InvariantBreach, "x left [-1, 1] at the step-size floor", t, h);
            case StepFault::NonFinite:
                raise_at(ErrorKind::InvariantBreach,
                         "state left the admissible region at the step-size floor", t, h);
            case StepFault::Overflow:
                raise(ErrorKind::OpinionOverflow, attempt.detail);
            default:
                raise_at(ErrorKind::StepUnderflow,
                         "accuracy target unmet at the step-size floor", t, h);
            }
        }
        h_cur = std::max(0.5 * h, floor);
    }
    return traj;
}

} // namespace nevdyn
