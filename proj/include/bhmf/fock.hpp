#pragma once

#include <cmath>
#include <string>

#include "bhmf/matrix.hpp"
#include "bhmf/model.hpp"

namespace bhmf {

// Truncated single-site Fock-space operators on occupations 0..cutoff:
// number = diag(n), number_sq = diag(n^2), quad = a + a* with
// quad(n, n+1) = quad(n+1, n) = sqrt(n+1).
struct FockOperators {
    int dim = 0;
    Matrix number;
    Matrix number_sq;
    Matrix quad;
};

inline FockOperators build_fock_operators(int cutoff) {
    if (cutoff < 1) throw domain_error("build_fock_operators: cutoff must be >= 1, got " + std::to_string(cutoff));
    const int dim = cutoff + 1;
    FockOperators ops;
    ops.dim = dim;
    ops.number = Matrix(dim, dim);
    ops.number_sq = Matrix(dim, dim);
    ops.quad = Matrix(dim, dim);
    for (int n = 0; n < dim; ++n) {
        ops.number(n, n) = static_cast<double>(n);
        ops.number_sq(n, n) = static_cast<double>(n) * static_cast<double>(n);
        if (n + 1 < dim) {
            const double amp = std::sqrt(static_cast<double>(n + 1));
            ops.quad(n, n + 1) = amp;
            ops.quad(n + 1, n) = amp;
        }
    }
    return ops;
}

// Effective single-site matrix K(r) = (mu + lambda - 1) n - lambda n^2 + r (a + a*).
// Real symmetric tridiagonal; affine in r.
inline Matrix build_k(const ModelParams& params, const FockOperators& ops, double r) {
    validate_params(params);
    if (!(r >= 0.0)) throw domain_error("build_k: r must be nonnegative, got " + std::to_string(r));
    const int dim = ops.dim;
    const double lin = params.mu + params.lambda - 1.0;
    Matrix k(dim, dim);
    for (int n = 0; n < dim; ++n) {
        k(n, n) = lin * ops.number(n, n) - params.lambda * ops.number_sq(n, n);
        if (n + 1 < dim) {
            const double off = r * ops.quad(n, n + 1);
            k(n, n + 1) = off;
            k(n + 1, n) = off;
        }
    }
    return k;
}

}  // namespace bhmf
