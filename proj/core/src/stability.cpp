#include "nevdyn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

constexpr double kFdScale = 1e-6;
constexpr double kBracketGridSpan = 2001;
constexpr int kBisectionIterations = 200;
constexpr double kDedupeTol = 1e-8;

int dims_count(Dims dims) { return static_cast<int>(dims); }

double component(const SystemState& state, int index) {
    switch (index) {
    case 0: return state.x;
    case 1: return state.pi_F;
    case 2: return state.pi_E;
    default: return state.N;
    }
}

void set_component(SystemState& state, int index, double value) {
    switch (index) {
    case 0: state.x = value; break;
    case 1: state.pi_F = value; break;
    case 2: state.pi_E = value; break;
    default: state.N = value; break;
    }
}

double derivative_component(const Derivative& d, int index) {
    switch (index) {
    case 0: return d.dx_dt;
    case 1: return d.dpi_F_dt;
    case 2: return d.dpi_E_dt;
    default: return d.dN_dt;
    }
}

double residual_norm_at(const ModelParams& params, const SystemState& state, Dims dims) {
    const Derivative d = reduced_field(params, state, dims);
    double norm = 0.0;
    for (int i = 0; i < dims_count(dims); ++i) {
        norm = std::max(norm, std::abs(derivative_component(d, i)));
    }
    return norm;
}

/// x-isocline of the reduced system with pi_F slaved to its own equilibrium
/// pi_F = gamma_F*N*(1-x)/alpha1 and pi_E frozen. tanh saturates, so the
/// opinion-index cap is deliberately not applied here.
double isocline(const ModelParams& params, double N, double pi_E_frozen, double x) {
    const double pi_F = params.gamma_F * N * (1.0 - x) / params.alpha1;
    const double s = params.a0 + params.a1 * x + params.a2 * pi_F + params.a3 * pi_E_frozen;
    return std::tanh(s) - x;
}

struct NewtonOutcome {
    SystemState state{};
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome damped_newton(const ModelParams& params, const SystemState& guess, Dims dims,
                            const NewtonOptions& options) {
    const int n = dims_count(dims);
    NewtonOutcome out;
    out.state = guess;
    out.residual = residual_norm_at(params, out.state, dims);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter;
        if (out.residual < options.tol) {
            out.converged = true;
            return out;
        }

        const Derivative d = reduced_field(params, out.state, dims);
        Matrix jac = jacobian_analytic(params, out.state, dims);
        std::array<double, 4> rhs{};
        for (int i = 0; i < n; ++i) rhs[static_cast<std::size_t>(i)] = -derivative_component(d, i);
        if (!solve_linear(jac, rhs)) return out;

        double step_scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= options.max_halvings; ++halving) {
            SystemState candidate = out.state;
            for (int i = 0; i < n; ++i) {
                set_component(candidate, i,
                              component(out.state, i) + step_scale * rhs[static_cast<std::size_t>(i)]);
            }
            double candidate_residual;
            try {
                candidate_residual = residual_norm_at(params, candidate, dims);
            } catch (const Error&) {
                step_scale *= 0.5; // stepped into the opinion-index cap; back off
                continue;
            }
            if (candidate_residual < out.residual) {
                out.state = candidate;
                out.residual = candidate_residual;
                improved = true;
                break;
            }
            step_scale *= 0.5;
        }
        if (!improved) return out;
    }
    out.converged = out.residual < options.tol;
    out.iterations = options.max_iterations;
    return out;
}

SystemState state_from_isocline_root(const ModelParams& params, double N, double pi_E_frozen, double x) {
    SystemState state;
    state.x = std::clamp(x, -1.0, 1.0);
    state.pi_F = params.gamma_F * N * (1.0 - state.x) / params.alpha1;
    state.pi_E = pi_E_frozen;
    state.N = N;
    return state;
}

std::vector<double> isocline_roots(const ModelParams& params, double N, double pi_E_frozen,
                                   int grid_points) {
    if (grid_points < 3) raise(ErrorKind::InvalidParams, "bracketing grid needs at least 3 points");
    std::vector<double> roots;
    double prev_x = -1.0;
    double prev_g = isocline(params, N, pi_E_frozen, prev_x);
    for (int i = 1; i < grid_points; ++i) {
        const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double g = isocline(params, N, pi_E_frozen, x);
        if (prev_g == 0.0) {
            roots.push_back(prev_x);
        } else if (g != 0.0 && std::signbit(g) != std::signbit(prev_g)) {
            double lo = prev_x;
            double hi = x;
            double g_lo = prev_g;
            for (int iter = 0; iter < kBisectionIterations; ++iter) {
                const double mid = 0.5 * (lo + hi);
                const double g_mid = isocline(params, N, pi_E_frozen, mid);
                if (g_mid == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (std::signbit(g_mid) == std::signbit(g_lo)) {
                    lo = mid;
                    g_lo = g_mid;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_g = g;
    }
    if (prev_g == 0.0) roots.push_back(prev_x);
    return roots;
}

void check_rh_agreement(bool minors_stable, bool hurwitz_stable, double hairline_scale,
                        double smallest_margin) {
    // Skip the cross-check inside the rounding hairline around a boundary.
    if (smallest_margin <= 1e-9 * hairline_scale) return;
    if (minors_stable != hurwitz_stable) {
        raise(ErrorKind::VerdictMismatch,
              "minor-form and coefficient-form stability tests disagree");
    }
}

} // namespace

Derivative reduced_field(const ModelParams& params, const SystemState& state, Dims dims) {
    if (dims == Dims::FourD) return vector_field(params, state);
    // Frozen fleet: the reduced systems evolve at fixed N, so the growth term
    // is forced to zero while everything else keeps the single-pass layout.
    ModelParams frozen = params;
    frozen.growth = GrowthPolicy::fixed(0.0);
    frozen.growth.k1 = params.growth.k1;
    frozen.growth.k2 = params.growth.k2;
    return vector_field(frozen, state);
}

Matrix jacobian_analytic(const ModelParams& params, const SystemState& state, Dims dims) {
    if (dims == Dims::FourD) {
        raise(ErrorKind::WrongDims,
              "no closed-form Jacobian for the full 4D system; use jacobian_fd");
    }
    const double s = opinion_index(params, state);
    const double ch = std::cosh(s);
    const double sh = std::sinh(s);
    const double two_v = 2.0 * params.v;
    const double common = ch - state.x * sh;

    const double fx_x = two_v * (params.a1 * ch - ch - params.a1 * state.x * sh);
    const double fx_piF = two_v * params.a2 * common;
    const double fx_piE = two_v * params.a3 * common;

    if (dims == Dims::TwoD) {
        Matrix jac = Matrix::zero(2);
        jac.at(0, 0) = fx_x;
        jac.at(0, 1) = fx_piF;
        jac.at(1, 0) = -params.gamma_F * state.N;
        jac.at(1, 1) = -params.alpha1;
        return jac;
    }

    Matrix jac = Matrix::zero(3);
    jac.at(0, 0) = fx_x;
    jac.at(0, 1) = fx_piF;
    jac.at(0, 2) = fx_piE;
    jac.at(1, 0) = -params.gamma_F * state.N;
    jac.at(1, 1) = -params.alpha1;
    jac.at(1, 2) = 0.0;
    // The pi_E row is literally theta_E*N times the x row plus the decay term;
    // building it that way keeps the structural identity exact.
    const double scale = params.theta_E * state.N;
    jac.at(2, 0) = scale * fx_x;
    jac.at(2, 1) = scale * fx_piF;
    jac.at(2, 2) = scale * fx_piE - params.alpha2;
    return jac;
}

Matrix jacobian_fd(const ModelParams& params, const SystemState& state, Dims dims) {
    const int n = dims_count(dims);
    Matrix jac = Matrix::zero(n);
    for (int j = 0; j < n; ++j) {
        const double base = component(state, j);
        const double h = kFdScale * std::max(1.0, std::abs(base));
        SystemState plus = state;
        SystemState minus = state;
        set_component(plus, j, base + h);
        set_component(minus, j, base - h);
        const Derivative d_plus = reduced_field(params, plus, dims);
        const Derivative d_minus = reduced_field(params, minus, dims);
        for (int i = 0; i < n; ++i) {
            jac.at(i, j) = (derivative_component(d_plus, i) - derivative_component(d_minus, i)) / (2.0 * h);
        }
    }
    return jac;
}

FixedPoint find_fixed_point(const ModelParams& params, const SystemState& guess, Dims dims,
                            const NewtonOptions& options) {
    validate(params);
    if (dims == Dims::FourD) {
        raise(ErrorKind::WrongDims,
              "a growing fleet admits no finite fixed point; freeze N and use ThreeD");
    }

    NewtonOutcome newton = damped_newton(params, guess, dims, options);
    if (!newton.converged) {
        // Bisection fallback on the x-isocline, then a Newton polish.
        const double pi_E_frozen = dims == Dims::ThreeD ? 0.0 : guess.pi_E;
        const auto roots = isocline_roots(params, guess.N, pi_E_frozen,
                                          static_cast<int>(kBracketGridSpan));
        double best_gap = std::numeric_limits<double>::infinity();
        for (const double root : roots) {
            const SystemState seed = state_from_isocline_root(params, guess.N, pi_E_frozen, root);
            NewtonOutcome polished = damped_newton(params, seed, dims, options);
            const double gap = std::abs(polished.state.x - guess.x);
            if (polished.converged && gap < best_gap) {
                best_gap = gap;
                newton = polished;
            }
        }
    }
    if (!newton.converged) {
        std::ostringstream oss;
        oss << "fixed-point search stalled at residual " << newton.residual << " (tol " << options.tol
            << ") from guess x = " << guess.x;
        raise(ErrorKind::NoConvergence, oss.str());
    }

    FixedPoint fp;
    fp.state = newton.state;
    fp.dims = dims;
    fp.residual_norm = newton.residual;
    fp.iterations = newton.iterations;
    return fp;
}

std::vector<FixedPoint> find_fixed_points(const ModelParams& params, double N, Dims dims,
                                          int grid_points) {
    validate(params);
    if (dims == Dims::FourD) {
        raise(ErrorKind::WrongDims,
              "a growing fleet admits no finite fixed point; freeze N and use ThreeD");
    }
    if (N <= 0.0) raise(ErrorKind::InvalidParams, "N must be > 0");

    const double pi_E_frozen = 0.0; // both reductions study the pi_E = 0 slice
    std::vector<FixedPoint> out;
    for (const double root : isocline_roots(params, N, pi_E_frozen, grid_points)) {
        const SystemState seed = state_from_isocline_root(params, N, pi_E_frozen, root);
        NewtonOutcome polished = damped_newton(params, seed, dims, {});
        if (!polished.converged) continue;
        const bool duplicate = std::any_of(out.begin(), out.end(), [&](const FixedPoint& fp) {
            return std::abs(fp.state.x - polished.state.x) <= kDedupeTol;
        });
        if (duplicate) continue;
        FixedPoint fp;
        fp.state = polished.state;
        fp.dims = dims;
        fp.residual_norm = polished.residual;
        fp.iterations = polished.iterations;
        out.push_back(fp);
    }
    std::sort(out.begin(), out.end(),
              [](const FixedPoint& lhs, const FixedPoint& rhs) { return lhs.state.x < rhs.state.x; });
    return out;
}

SystemState balanced_fixed_point(const ModelParams& params, double N) {
    SystemState state;
    state.x = 0.0;
    state.pi_F = params.gamma_F * N / params.alpha1;
    state.pi_E = 0.0;
    state.N = N;
    return state;
}

double balanced_a0(const ModelParams& params, double N) {
    return -params.a2 * params.gamma_F * N / params.alpha1;
}

Rh2d routh_hurwitz_2d(const Matrix& jacobian) {
    if (jacobian.n != 2) raise(ErrorKind::WrongDims, "routh_hurwitz_2d needs a 2x2 matrix");
    Rh2d out;
    out.det = determinant(jacobian);
    out.tr = trace(jacobian);
    out.conditions = {
        {"Det(J) > 0", out.det, out.det > 0.0},
        {"Tr(J) < 0", out.tr, out.tr < 0.0},
    };
    out.stable = out.conditions[0].ok && out.conditions[1].ok;
    return out;
}

Rh3d routh_hurwitz_3d(const Matrix& jacobian) {
    if (jacobian.n != 3) raise(ErrorKind::WrongDims, "routh_hurwitz_3d needs a 3x3 matrix");
    Rh3d out;
    out.det = determinant(jacobian);
    out.tr = trace(jacobian);
    out.j1 = principal_minor_dropping(jacobian, 0);
    out.j2 = principal_minor_dropping(jacobian, 1);
    out.j3 = principal_minor_dropping(jacobian, 2);
    out.minor_sum = out.j1 + out.j2 + out.j3;
    const double combined = -out.tr * out.minor_sum + out.det;
    out.conditions = {
        {"Det(J) < 0", out.det, out.det < 0.0},
        {"Tr(J) < 0", out.tr, out.tr < 0.0},
        {"J1 + J2 + J3 > 0", out.minor_sum, out.minor_sum > 0.0},
        {"-Tr(J)*(J1+J2+J3) + Det(J) > 0", combined, combined > 0.0},
    };
    out.stable = true;
    for (const auto& condition : out.conditions) out.stable = out.stable && condition.ok;

    // Equivalent cubic Hurwitz form on p(z) = z^3 + c2 z^2 + c1 z + c0:
    // c2 > 0, c0 > 0, c2*c1 > c0. Divergence would mean a bug.
    const double c2 = -out.tr;
    const double c1 = out.minor_sum;
    const double c0 = -out.det;
    const bool hurwitz_stable = c2 > 0.0 && c0 > 0.0 && c2 * c1 > c0;
    const double hairline_scale = 1.0 + std::abs(out.det) + std::abs(out.tr) + std::abs(out.minor_sum);
    const double smallest_margin = std::min({std::abs(out.det), std::abs(out.tr),
                                             std::abs(out.minor_sum), std::abs(combined)});
    check_rh_agreement(out.stable, hurwitz_stable, hairline_scale, smallest_margin);
    return out;
}

const char* classification_name(Classification c) noexcept {
    switch (c) {
    case Classification::Stable: return "Stable";
    case Classification::Unstable: return "Unstable";
    case Classification::Marginal: return "Marginal";
    }
    return "Unknown";
}

StabilityReport stability_report_at(const ModelParams& params, const SystemState& state, Dims dims,
                                    double margin) {
    validate(params);
    StabilityReport report;
    report.state = state;
    report.dims = dims;
    report.residual_norm = residual_norm_at(params, state, dims);
    report.jacobian = dims == Dims::FourD ? jacobian_fd(params, state, dims)
                                          : jacobian_analytic(params, state, dims);
    report.eigen = eigenvalues(report.jacobian);
    report.trace = trace(report.jacobian);
    report.det = determinant(report.jacobian);

    report.max_real_part = report.eigen.front().real();
    for (const auto& lambda : report.eigen) {
        report.max_real_part = std::max(report.max_real_part, lambda.real());
    }
    if (report.max_real_part < -margin) {
        report.classification = Classification::Stable;
    } else if (report.max_real_part > margin) {
        report.classification = Classification::Unstable;
    } else {
        report.classification = Classification::Marginal;
    }

    if (dims == Dims::TwoD) {
        const Rh2d rh = routh_hurwitz_2d(report.jacobian);
        report.rh_applicable = true;
        report.rh_stable = rh.stable;
        report.rh_conditions = rh.conditions;
    } else if (dims == Dims::ThreeD) {
        const Rh3d rh = routh_hurwitz_3d(report.jacobian);
        report.rh_applicable = true;
        report.rh_stable = rh.stable;
        report.rh_conditions = rh.conditions;
    }

    if (report.rh_applicable && report.classification != Classification::Marginal) {
        const bool eigen_stable = report.classification == Classification::Stable;
        if (eigen_stable != report.rh_stable) {
            std::ostringstream oss;
            oss << "Routh-Hurwitz says " << (report.rh_stable ? "stable" : "not stable")
                << " but the eigenvalue test says " << classification_name(report.classification)
                << " (max Re = " << report.max_real_part << ")";
            raise(ErrorKind::VerdictMismatch, oss.str());
        }
    }
    return report;
}

StabilityReport classify_equilibrium(const ModelParams& params, const FixedPoint& fp, double margin) {
    return stability_report_at(params, fp.state, fp.dims, margin);
}

DetTr balanced_det_tr_2d(const ModelParams& params, double N) {
    DetTr out;
    out.det = -2.0 * params.v * params.alpha1 * (params.a1 - 1.0)
              + 2.0 * params.v * params.a2 * params.gamma_F * N;
    out.tr = -params.alpha1 + 2.0 * params.v * (params.a1 - 1.0);
    return out;
}

Matrix balanced_jacobian_3d(const ModelParams& params, double N) {
    const double two_v = 2.0 * params.v;
    Matrix jac = Matrix::zero(3);
    jac.at(0, 0) = two_v * (params.a1 - 1.0);
    jac.at(0, 1) = two_v * params.a2;
    jac.at(0, 2) = two_v * params.a3;
    jac.at(1, 0) = -params.gamma_F * N;
    jac.at(1, 1) = -params.alpha1;
    jac.at(1, 2) = 0.0;
    const double scale = params.theta_E * N;
    jac.at(2, 0) = scale * jac.at(0, 0);
    jac.at(2, 1) = scale * jac.at(0, 1);
    jac.at(2, 2) = scale * jac.at(0, 2) - params.alpha2;
    return jac;
}

DetTr balanced_det_tr_3d_reference(const ModelParams& params, double N) {
    const double v = params.v;
    const double a1 = params.a1;
    const double theta = params.theta_E;
    DetTr out;
    out.det = (-params.alpha2 - 2.0 * v * N * theta)
                  * (-2.0 * v * params.alpha1 * (a1 - 1.0) + 2.0 * params.gamma_F * N * v)
              - 2.0 * v
                    * (-2.0 * params.gamma_F * N * N * theta * v * theta
                       + params.alpha1 * theta * (2.0 * v * N * (a1 - 1.0)));
    out.tr = -2.0 * v * params.alpha1 * (a1 - 1.0) + 2.0 * v * params.gamma_F * N - params.alpha2
             - 2.0 * v * N * theta;
    return out;
}

} // namespace nevdyn
