#pragma once

#include <string>
#include <vector>

namespace nevdyn {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Built-in invariant suite: algebraic-form agreement of the switching rate,
/// analytic-vs-finite-difference Jacobians, Routh-Hurwitz vs eigenvalue signs
/// on constructed spectra, RK4 convergence order, structural Jacobian
/// identities, and the balanced-equilibrium round trip. Purely informational
/// entries (reference-formula comparisons) never fail.
[[nodiscard]] std::vector<CheckResult> run_selfchecks();

} // namespace nevdyn
