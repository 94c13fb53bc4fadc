#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bhmf/matrix.hpp"
#include "bhmf/model.hpp"

namespace bhmf {

// Eigenvalues sorted ascending; eigenvector i is the i-th column.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;
};

namespace detail {

// Householder reduction of a symmetric matrix to tridiagonal form, with
// accumulation of the orthogonal transform in z. d receives the diagonal,
// e the subdiagonal (e[0] unused).
inline void tred2(Matrix& z, std::vector<double>& d, std::vector<double>& e) {
    const int n = z.rows();
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = (f >= 0.0 ? -std::sqrt(h) : std::sqrt(h));
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        const int l = i - 1;
        if (d[i] != 0.0) {
            for (int j = 0; j <= l; ++j) {
                double g = 0.0;
                for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
            }
        }
        d[i] = z(i, i);
        z(i, i) = 1.0;
        for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
    }
}

// Implicit-shift QL on a symmetric tridiagonal matrix, rotations applied
// to the columns of z. Sweep budget per eigenvalue as configured below.
inline void tqli(std::vector<double>& d, std::vector<double>& e, Matrix& z, int sweep_budget) {
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) + dd == dd) break;  // e[m] negligible at working precision
            }
            if (m != l) {
                if (iter++ == sweep_budget)
                    throw numerical_error("eig_symmetric: QL sweep budget exhausted at dimension " +
                                          std::to_string(n));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        f = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * f;
                        z(k, i) = c * z(k, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

constexpr int kSweepBudget = 64;
constexpr double kSymmetryTol = 1e-12;

}  // namespace detail

// Full eigendecomposition of a real symmetric matrix: Householder
// tridiagonalization followed by implicit-shift QL, then an ascending sort.
inline SpectralDecomposition eig_symmetric(const Matrix& a) {
    const int n = a.rows();
    if (n == 0 || a.cols() != n) throw domain_error("eig_symmetric: matrix must be square and nonempty");
    const double fnorm = frobenius_norm(a);
    if (max_asymmetry(a) > detail::kSymmetryTol * std::max(1.0, fnorm))
        throw domain_error("eig_symmetric: input is not symmetric within tolerance");

    Matrix z = a;
    std::vector<double> d(n), e(n);
    detail::tred2(z, d, e);
    detail::tqli(d, e, z, detail::kSweepBudget);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = d[order[j]];
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = z(i, order[j]);
    }
    return out;
}

// ln sum_i exp(scale * v_i), max-shifted; exact for a single element.
inline double log_sum_exp(std::span<const double> values, double scale) {
    if (values.empty()) throw domain_error("log_sum_exp: empty input");
    double m = scale * values[0];
    for (double v : values) m = std::max(m, scale * v);
    double s = 0.0;
    for (double v : values) s += std::exp(scale * v - m);
    return m + std::log(s);
}

}  // namespace bhmf
