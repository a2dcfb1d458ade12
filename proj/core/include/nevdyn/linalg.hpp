#pragma once

#include <array>
#include <complex>
#include <vector>

namespace nevdyn {

/// Dense square matrix, dimension 2..4. Row-major, fixed storage; all the
/// systems in this library are tiny so everything is done directly.
struct Matrix {
    int n = 0;
    std::array<double, 16> a{};

    [[nodiscard]] static Matrix zero(int n);
    [[nodiscard]] static Matrix identity(int n);

    [[nodiscard]] double& at(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
    [[nodiscard]] double at(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

[[nodiscard]] Matrix multiply(const Matrix& lhs, const Matrix& rhs);
[[nodiscard]] double trace(const Matrix& m);

/// Direct cofactor expansion (n <= 4).
[[nodiscard]] double determinant(const Matrix& m);

/// Determinant of the submatrix after deleting row `drop` and column `drop`
/// (the principal minor complementary to index `drop`).
[[nodiscard]] double principal_minor_dropping(const Matrix& m, int drop);

/// Monic characteristic polynomial coefficients by the Faddeev-LeVerrier
/// recurrence: p(z) = z^n + c[1]*z^(n-1) + ... + c[n]. c[0] is always 1.
[[nodiscard]] std::array<double, 5> characteristic_coefficients(const Matrix& m);

/// All roots of a monic real polynomial of degree 2..4 by Durand-Kerner
/// iteration, refined until |p(z)| < 1e-10 * (sum of term magnitudes at z).
/// Throws NoRootConvergence if the iteration stalls.
[[nodiscard]] std::vector<std::complex<double>> polynomial_roots(const double* monic_coeffs, int degree);

/// Eigenvalues sorted by descending real part (ties by descending imaginary
/// part). n = 2 uses the closed-form quadratic; n = 3, 4 go through the
/// characteristic polynomial and Durand-Kerner.
[[nodiscard]] std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Solves m * x = b in place by Gaussian elimination with partial pivoting.
/// Returns false when the matrix is numerically singular.
[[nodiscard]] bool solve_linear(Matrix m, std::array<double, 4>& b);

} // namespace nevdyn
