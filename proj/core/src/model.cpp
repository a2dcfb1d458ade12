#include "nevdyn/model.hpp"

#include <cmath>
#include <sstream>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

void require_finite(double value, const char* field) {
    if (!std::isfinite(value)) {
        raise(ErrorKind::InvalidParams, std::string(field) + " must be finite");
    }
}

} // namespace

GrowthPolicy GrowthPolicy::fixed(double rate) {
    GrowthPolicy policy;
    policy.kind = Kind::Fixed;
    policy.g = rate;
    return policy;
}

GrowthPolicy GrowthPolicy::regulated(double base_rate, double k1, double k2) {
    GrowthPolicy policy;
    policy.kind = Kind::Regulated;
    policy.g = base_rate;
    policy.k1 = k1;
    policy.k2 = k2;
    return policy;
}

void validate(const ModelParams& params) {
    require_finite(params.a0, "a0");
    require_finite(params.a1, "a1");
    require_finite(params.a2, "a2");
    require_finite(params.a3, "a3");
    require_finite(params.v, "v");
    require_finite(params.gamma_F, "gamma_F");
    require_finite(params.theta_E, "theta_E");
    require_finite(params.alpha1, "alpha1");
    require_finite(params.alpha2, "alpha2");
    require_finite(params.growth.g, "growth.g");
    require_finite(params.growth.k1, "growth.k1");
    require_finite(params.growth.k2, "growth.k2");
    require_finite(params.s_cap, "s_cap");
    if (params.v <= 0.0) raise(ErrorKind::InvalidParams, "v must be > 0");
    if (params.gamma_F < 0.0) raise(ErrorKind::InvalidParams, "gamma_F must be >= 0");
    if (params.theta_E < 0.0) raise(ErrorKind::InvalidParams, "theta_E must be >= 0");
    if (params.alpha1 <= 0.0) raise(ErrorKind::InvalidParams, "alpha1 must be > 0");
    if (params.alpha2 <= 0.0) raise(ErrorKind::InvalidParams, "alpha2 must be > 0");
    if (params.growth.g < 0.0) raise(ErrorKind::InvalidParams, "growth rate must be >= 0");
    if (params.growth.k1 < 0.0 || params.growth.k2 < 0.0) {
        raise(ErrorKind::InvalidParams, "externality weights k1, k2 must be >= 0");
    }
    if (params.s_cap <= 0.0) raise(ErrorKind::InvalidParams, "s_cap must be > 0");
}

void validate(const SystemState& state) {
    require_finite(state.x, "x");
    require_finite(state.pi_F, "pi_F");
    require_finite(state.pi_E, "pi_E");
    require_finite(state.N, "N");
    if (state.x < -1.0 || state.x > 1.0) {
        raise(ErrorKind::InvalidParams, "x must lie in [-1, 1]");
    }
    if (state.N <= 0.0) raise(ErrorKind::InvalidParams, "N must be > 0");
}

double opinion_index(const ModelParams& params, const SystemState& state) {
    const double s = params.a0 + params.a1 * state.x + params.a2 * state.pi_F + params.a3 * state.pi_E;
    if (!std::isfinite(s) || std::abs(s) > params.s_cap) {
        std::ostringstream oss;
        oss << "|s| = " << std::abs(s) << " exceeds cap " << params.s_cap << " at x = " << state.x
            << ", pi_F = " << state.pi_F << ", pi_E = " << state.pi_E;
        raise(ErrorKind::OpinionOverflow, oss.str());
    }
    return s;
}

TransitionRates transition_rates(const ModelParams& params, double s) {
    return {params.v * std::exp(s), params.v * std::exp(-s)};
}

double x_rate(const ModelParams& params, double x, double s) {
    return params.v * ((1.0 - x) * std::exp(s) - (1.0 + x) * std::exp(-s));
}

double x_rate_hyperbolic(const ModelParams& params, double x, double s) {
    return 2.0 * params.v * (std::tanh(s) - x) * std::cosh(s);
}

double aggregate_externality(const ModelParams& params, const SystemState& state) {
    return params.growth.k1 * state.pi_F + params.growth.k2 * state.pi_E;
}

double effective_growth(const ModelParams& params, const SystemState& state) {
    if (params.growth.kind == GrowthPolicy::Kind::Fixed) {
        return params.growth.g;
    }
    return params.growth.g * std::exp(-aggregate_externality(params, state));
}

Derivative vector_field(const ModelParams& params, const SystemState& state) {
    const double s = opinion_index(params, state);

    // dx/dt and dN/dt feed the pi_E source, so they are evaluated first.
    Derivative d;
    d.dx_dt = x_rate(params, state.x, s);
    d.dN_dt = effective_growth(params, state) * state.N;
    d.dpi_F_dt = params.gamma_F * state.N * (1.0 - state.x) - params.alpha1 * state.pi_F;
    d.dpi_E_dt = params.theta_E * (d.dN_dt * (1.0 + state.x) + d.dx_dt * state.N)
                 - params.alpha2 * state.pi_E;
    return d;
}

} // namespace nevdyn
