#pragma once

#include <string>

namespace nevdyn {

// ============================================================================
// Model definition: consumer switching between traditional fuel vehicles (TFV,
// opinion value -1) and new energy vehicles (NEV, +1), coupled to two
// environmental externality stocks and total fleet growth.
//
// State (x, pi_F, pi_E, N):
//   x      net opinion share in [-1, 1]; x = (N_E - N_F) / N
//   pi_F   usage externality stock sourced by the TFV share
//   pi_E   production externality stock sourced by NEV output changes
//   N      total fleet size (> 0)
// ============================================================================

/// How the total fleet N evolves. A fixed policy applies the rate g as-is; a
/// regulated policy damps it by the aggregate externality index,
/// g_eff = g * exp(-(k1*pi_F + k2*pi_E)).
///
/// (k1, k2) double as the weights of the recorded externality index Pi, so
/// fixed-growth runs keep the defaults and stay comparable with regulated
/// runs that use the same weights.
struct GrowthPolicy {
    enum class Kind { Fixed, Regulated };

    Kind kind = Kind::Fixed;
    double g = 0.0;
    double k1 = 0.01;
    double k2 = 0.01;

    [[nodiscard]] static GrowthPolicy fixed(double rate);
    [[nodiscard]] static GrowthPolicy regulated(double base_rate, double k1, double k2);
};

struct ModelParams {
    double a0 = 0.0; ///< opinion-index offset (policy lever)
    double a1 = 1.0; ///< herding strength
    double a2 = 0.0; ///< weight of pi_F in the opinion index
    double a3 = 0.0; ///< weight of pi_E in the opinion index
    double v = 1.0;  ///< switching frequency scale (> 0)
    double gamma_F = 0.0; ///< pi_F source rate per TFV
    double theta_E = 0.0; ///< pi_E source per unit NEV production
    double alpha1 = 1.0;  ///< pi_F self-purification rate (> 0)
    double alpha2 = 1.0;  ///< pi_E self-purification rate (> 0)
    GrowthPolicy growth{};
    double s_cap = 500.0; ///< |opinion index| ceiling before erroring out
};

struct SystemState {
    double x = 0.0;
    double pi_F = 0.0;
    double pi_E = 0.0;
    double N = 1.0;
};

struct Derivative {
    double dx_dt = 0.0;
    double dpi_F_dt = 0.0;
    double dpi_E_dt = 0.0;
    double dN_dt = 0.0;
};

/// Per-consumer switching rates: to_nev = v*exp(s) draws TFV holders to NEV,
/// to_tfv = v*exp(-s) the reverse. Their product is always v^2.
struct TransitionRates {
    double to_nev = 0.0;
    double to_tfv = 0.0;
};

/// Throws InvalidParams on non-finite fields, v <= 0, negative rates, or a
/// non-positive s_cap.
void validate(const ModelParams& params);

/// Throws InvalidParams when x is outside [-1, 1], N <= 0, or any field is
/// non-finite.
void validate(const SystemState& state);

/// s = a0 + a1*x + a2*pi_F + a3*pi_E. Throws OpinionOverflow when |s| exceeds
/// params.s_cap (exp(s) would otherwise swamp the dynamics silently).
[[nodiscard]] double opinion_index(const ModelParams& params, const SystemState& state);

[[nodiscard]] TransitionRates transition_rates(const ModelParams& params, double s);

/// dx/dt in flux form: v*[(1 - x)*exp(s) - (1 + x)*exp(-s)].
[[nodiscard]] double x_rate(const ModelParams& params, double x, double s);

/// dx/dt in the equivalent hyperbolic form: 2v*[tanh(s) - x]*cosh(s).
/// Kept as an independent algebraic route; the two must agree to 1e-10
/// relative everywhere admissible.
[[nodiscard]] double x_rate_hyperbolic(const ModelParams& params, double x, double s);

/// Pi = k1*pi_F + k2*pi_E with the growth policy's weights.
[[nodiscard]] double aggregate_externality(const ModelParams& params, const SystemState& state);

/// Fixed: g. Regulated: g * exp(-Pi).
[[nodiscard]] double effective_growth(const ModelParams& params, const SystemState& state);

/// Full 4D right-hand side. Evaluation order matters: dx/dt and dN/dt are
/// computed first because dpi_E/dt consumes both from the same call.
[[nodiscard]] Derivative vector_field(const ModelParams& params, const SystemState& state);

} // namespace nevdyn
