#pragma once

#include <cstdint>
#include <vector>

#include "nevdyn/model.hpp"

namespace nevdyn {

enum class Method { RK4, Euler };

struct IntegrationConfig {
    double t0 = 0.0;
    double t_end = 200.0;
    double dt = 0.01;
    Method method = Method::RK4;

    /// Step-doubling control: a step of size h is accepted only when it agrees
    /// component-wise with two h/2 substeps to rel_tol; otherwise h is halved
    /// (persisting across steps, growing back toward dt on success). Only
    /// defined for RK4; Euler exists as a cross-check oracle.
    bool adaptive = false;
    double rel_tol = 1e-8;
    double dt_min = 0.0; ///< 0 selects the default floor dt/1024

    std::uint64_t max_steps = 20'000'000; ///< hard cap against runaway step shrink
};

/// One accepted step. The derived columns (s, g_eff, Pi, neg_pi_E) are
/// recomputed from the stored state, never interpolated.
struct TrajectoryRow {
    double t = 0.0;
    double x = 0.0;
    double pi_F = 0.0;
    double pi_E = 0.0;
    double N = 0.0;
    double s = 0.0;
    double g_eff = 0.0;
    double Pi = 0.0;
    bool neg_pi_E = false;

    [[nodiscard]] SystemState state() const { return {x, pi_F, pi_E, N}; }
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    ModelParams params{};
    IntegrationConfig config{};

    [[nodiscard]] const TrajectoryRow& front() const { return rows.front(); }
    [[nodiscard]] const TrajectoryRow& back() const { return rows.back(); }
    [[nodiscard]] std::size_t size() const { return rows.size(); }
};

/// One classical RK4 step of the full 4D field.
[[nodiscard]] SystemState step_rk4(const ModelParams& params, const SystemState& state, double dt);

/// One explicit Euler step. Retained as an independent low-order oracle.
[[nodiscard]] SystemState step_euler(const ModelParams& params, const SystemState& state, double dt);

/// Integrates over [t0, t_end], storing every accepted step (the initial state
/// included). Steps may leave x outside [-1, 1] by at most 1e-12, which is
/// clamped; a larger overshoot is rejected in adaptive mode and fatal
/// (InvariantBreach) otherwise. StepUnderflow is raised when the adaptive
/// floor dt_min cannot meet rel_tol.
[[nodiscard]] Trajectory integrate(const ModelParams& params, const SystemState& initial,
                                   const IntegrationConfig& config);

} // namespace nevdyn
