#include "nevdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nevdyn/errors.hpp"

namespace nevdyn {

namespace {

constexpr double kRootResidualTol = 1e-10;
constexpr int kMaxDurandKernerIterations = 500;

void require_dim(int n, const char* what) {
    if (n < 2 || n > 4) {
        raise(ErrorKind::WrongDims, std::string(what) + " requires dimension 2..4, got " + std::to_string(n));
    }
}

std::complex<double> evaluate_monic(const double* c, int degree, std::complex<double> z) {
    // Horner on z^n + c[1] z^(n-1) + ... + c[n].
    std::complex<double> acc(1.0, 0.0);
    for (int k = 1; k <= degree; ++k) {
        acc = acc * z + c[k];
    }
    return acc;
}

double evaluate_magnitude_bound(const double* c, int degree, std::complex<double> z) {
    // Sum of term magnitudes; the natural scale for a backward-stable residual.
    const double r = std::abs(z);
    double acc = 1.0;
    for (int k = 1; k <= degree; ++k) {
        acc = acc * r + std::abs(c[k]);
    }
    return std::max(1.0, acc);
}

bool eigen_order(const std::complex<double>& lhs, const std::complex<double>& rhs) {
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() > rhs.imag();
}

/// Snaps conjugate pairs to exact symmetry and stray imaginary fuzz to zero,
/// so downstream classification sees clean spectra. Pairing is gated on
/// actual mirror proximity: a positive-imag root only adopts a partner that
/// sits within kConjugatePairTol of its conjugate, and anything left
/// unpaired is a real root carrying numerical fuzz.
void tidy_roots(std::vector<std::complex<double>>& roots) {
    constexpr double kConjugatePairTol = 1e-6;
    constexpr double kRealSnapTol = 1e-6;
    const std::size_t n = roots.size();
    std::vector<bool> paired(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (paired[i] || roots[i].imag() <= 0.0) continue;
        std::size_t best = n;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || paired[j] || roots[j].imag() >= 0.0) continue;
            const double gap = std::abs(roots[j] - std::conj(roots[i]));
            if (gap < best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < n && best_gap <= kConjugatePairTol * (1.0 + std::abs(roots[i]))) {
            const double re = 0.5 * (roots[i].real() + roots[best].real());
            const double im = 0.5 * (roots[i].imag() - roots[best].imag());
            roots[i] = {re, im};
            roots[best] = {re, -im};
            paired[i] = paired[best] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!paired[i]
            && std::abs(roots[i].imag()) <= kRealSnapTol * (1.0 + std::abs(roots[i].real()))) {
            roots[i] = {roots[i].real(), 0.0};
        }
    }
}

/// Certificate that a root set really factors the polynomial: expand
/// prod (z - r_i) and compare coefficients. Guards against a converged-looking
/// iteration that double-counted one root and missed another.
bool roots_match_coefficients(const std::vector<std::complex<double>>& roots, const double* c,
                              int degree) {
    std::vector<std::complex<double>> acc{{1.0, 0.0}};
    for (const auto& root : roots) {
        acc.emplace_back(0.0, 0.0);
        for (std::size_t k = acc.size() - 1; k >= 1; --k) acc[k] -= root * acc[k - 1];
    }
    for (int k = 1; k <= degree; ++k) {
        const double tol = 1e-6 * (1.0 + std::abs(c[k]));
        if (std::abs(acc[static_cast<std::size_t>(k)] - c[k]) > tol) return false;
    }
    return true;
}

} // namespace

Matrix Matrix::zero(int n) {
    require_dim(n, "Matrix::zero");
    Matrix m;
    m.n = n;
    return m;
}

Matrix Matrix::identity(int n) {
    Matrix m = zero(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix multiply(const Matrix& lhs, const Matrix& rhs) {
    require_dim(lhs.n, "multiply");
    if (lhs.n != rhs.n) raise(ErrorKind::WrongDims, "multiply: mismatched dimensions");
    Matrix out = Matrix::zero(lhs.n);
    for (int i = 0; i < lhs.n; ++i) {
        for (int j = 0; j < lhs.n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < lhs.n; ++k) acc += lhs.at(i, k) * rhs.at(k, j);
            out.at(i, j) = acc;
        }
    }
    return out;
}

double trace(const Matrix& m) {
    require_dim(m.n, "trace");
    double acc = 0.0;
    for (int i = 0; i < m.n; ++i) acc += m.at(i, i);
    return acc;
}

double determinant(const Matrix& m) {
    require_dim(m.n, "determinant");
    if (m.n == 2) {
        return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    }
    if (m.n == 3) {
        return m.at(0, 0) * (m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1))
             - m.at(0, 1) * (m.at(1, 0) * m.at(2, 2) - m.at(1, 2) * m.at(2, 0))
             + m.at(0, 2) * (m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0));
    }
    double acc = 0.0;
    double sign = 1.0;
    for (int col = 0; col < 4; ++col) {
        Matrix sub = Matrix::zero(3);
        for (int i = 1; i < 4; ++i) {
            int sj = 0;
            for (int j = 0; j < 4; ++j) {
                if (j == col) continue;
                sub.at(i - 1, sj++) = m.at(i, j);
            }
        }
        acc += sign * m.at(0, col) * determinant(sub);
        sign = -sign;
    }
    return acc;
}

double principal_minor_dropping(const Matrix& m, int drop) {
    require_dim(m.n, "principal_minor_dropping");
    if (drop < 0 || drop >= m.n) raise(ErrorKind::WrongDims, "principal minor index out of range");
    Matrix sub = Matrix::zero(m.n - 1);
    int si = 0;
    for (int i = 0; i < m.n; ++i) {
        if (i == drop) continue;
        int sj = 0;
        for (int j = 0; j < m.n; ++j) {
            if (j == drop) continue;
            sub.at(si, sj++) = m.at(i, j);
        }
        ++si;
    }
    return determinant(sub);
}

std::array<double, 5> characteristic_coefficients(const Matrix& m) {
    require_dim(m.n, "characteristic_coefficients");
    // Faddeev-LeVerrier: M_1 = A, c_k = -tr(A M_k)/k done via the shifted
    // recurrence M_{k+1} = A (M_k + c_k I).
    std::array<double, 5> c{};
    c[0] = 1.0;
    Matrix mk = m;
    for (int k = 1; k <= m.n; ++k) {
        c[static_cast<std::size_t>(k)] = -trace(mk) / static_cast<double>(k);
        if (k == m.n) break;
        Matrix shifted = mk;
        for (int i = 0; i < m.n; ++i) shifted.at(i, i) += c[static_cast<std::size_t>(k)];
        mk = multiply(m, shifted);
    }
    return c;
}

std::vector<std::complex<double>> polynomial_roots(const double* monic_coeffs, int degree) {
    require_dim(degree, "polynomial_roots");

    // Cauchy bound keeps every root inside |z| <= radius.
    double radius = 0.0;
    for (int k = 1; k <= degree; ++k) radius = std::max(radius, std::abs(monic_coeffs[k]));
    radius += 1.0;

    std::vector<std::complex<double>> z(static_cast<std::size_t>(degree));
    const std::complex<double> seed(0.4, 0.9);
    std::complex<double> power = seed;
    for (auto& zi : z) {
        zi = radius * power;
        power *= seed;
    }

    for (int iter = 0; iter < kMaxDurandKernerIterations; ++iter) {
        double max_update = 0.0;
        for (int i = 0; i < degree; ++i) {
            std::complex<double> denom(1.0, 0.0);
            for (int j = 0; j < degree; ++j) {
                if (j == i) continue;
                denom *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
            }
            if (denom == std::complex<double>(0.0, 0.0)) {
                // Collided iterates: nudge deterministically and continue.
                z[static_cast<std::size_t>(i)] += std::complex<double>(1e-8 * radius, 1e-8 * radius);
                max_update = std::numeric_limits<double>::infinity();
                continue;
            }
            const std::complex<double> delta =
                evaluate_monic(monic_coeffs, degree, z[static_cast<std::size_t>(i)]) / denom;
            z[static_cast<std::size_t>(i)] -= delta;
            max_update = std::max(max_update, std::abs(delta));
        }

        bool all_converged = true;
        for (int i = 0; i < degree; ++i) {
            const double residual = std::abs(evaluate_monic(monic_coeffs, degree, z[static_cast<std::size_t>(i)]));
            if (residual > kRootResidualTol * evaluate_magnitude_bound(monic_coeffs, degree, z[static_cast<std::size_t>(i)])) {
                all_converged = false;
                break;
            }
        }
        if (all_converged) {
            // Small residuals under-determine clustered roots (|p| shrinks
            // quadratically near a double root), so the reconstruction
            // certificate is the actual convergence arbiter: certify a tidied
            // copy and keep iterating on the raw set until it passes.
            std::vector<std::complex<double>> candidate = z;
            tidy_roots(candidate);
            if (roots_match_coefficients(candidate, monic_coeffs, degree)) {
                std::sort(candidate.begin(), candidate.end(), eigen_order);
                return candidate;
            }
        }
        if (max_update < 1e-16 * radius) break; // stalled; the final raise reports it
    }
    raise(ErrorKind::NoRootConvergence,
          "no certified root set within " + std::to_string(kMaxDurandKernerIterations) +
              " iterations");
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    require_dim(m.n, "eigenvalues");
    if (m.n == 2) {
        const double tr = trace(m);
        const double det = determinant(m);
        const double disc = tr * tr - 4.0 * det;
        std::vector<std::complex<double>> out(2);
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            out[0] = {(tr + root) / 2.0, 0.0};
            out[1] = {(tr - root) / 2.0, 0.0};
        } else {
            const double imag = std::sqrt(-disc) / 2.0;
            out[0] = {tr / 2.0, imag};
            out[1] = {tr / 2.0, -imag};
        }
        std::sort(out.begin(), out.end(), eigen_order);
        return out;
    }
    const auto coeffs = characteristic_coefficients(m);
    return polynomial_roots(coeffs.data(), m.n);
}

bool solve_linear(Matrix m, std::array<double, 4>& b) {
    require_dim(m.n, "solve_linear");
    const int n = m.n;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row) {
            if (std::abs(m.at(row, col)) > std::abs(m.at(pivot, col))) pivot = row;
        }
        if (std::abs(m.at(pivot, col)) < 1e-300) return false;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(m.at(pivot, j), m.at(col, j));
            std::swap(b[static_cast<std::size_t>(pivot)], b[static_cast<std::size_t>(col)]);
        }
        for (int row = col + 1; row < n; ++row) {
            const double factor = m.at(row, col) / m.at(col, col);
            for (int j = col; j < n; ++j) m.at(row, j) -= factor * m.at(col, j);
            b[static_cast<std::size_t>(row)] -= factor * b[static_cast<std::size_t>(col)];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double acc = b[static_cast<std::size_t>(row)];
        for (int j = row + 1; j < n; ++j) acc -= m.at(row, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(row)] = acc / m.at(row, row);
    }
    return true;
}

} // namespace nevdyn
