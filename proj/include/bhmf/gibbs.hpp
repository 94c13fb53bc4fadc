#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "bhmf/fock.hpp"
#include "bhmf/matrix.hpp"
#include "bhmf/model.hpp"
#include "bhmf/spectrum.hpp"

namespace bhmf {

// Gibbs state of the single-site matrix K(r) at inverse temperature beta:
// weights w_i = e^{beta eps_i} / Z over the eigenstates of K(r).
struct GibbsState {
    std::vector<double> weights;
    SpectralDecomposition decomposition;
    double log_partition = 0.0;  // ln Tr e^{beta K(r)}
    double beta = 0.0;
    int cutoff = 0;  // occupation cutoff actually used

    // ln w_i = beta eps_i - ln Z, exact even where w_i underflows
    double log_weight(int i) const { return beta * decomposition.eigenvalues[i] - log_partition; }
};

struct DensityMatrix {
    Matrix matrix;  // symmetric PSD, unit trace
};

namespace detail {

constexpr int kCutoffStart = 32;
constexpr int kCutoffMax = 1 << 14;
constexpr double kEdgeWeightTol = 1e-12;    // Gibbs population of the top two occupation levels
constexpr double kLogPartitionTol = 1e-10;  // relative change between cutoff doublings
constexpr double kSupportTol = 1e-12;       // eigenvalue threshold for support detection
constexpr double kNullMassTol = 1e-8;       // mass on a sub-threshold direction that counts as real

inline GibbsState gibbs_at_cutoff(const ModelParams& params, double r, int cutoff) {
    const FockOperators ops = build_fock_operators(cutoff);
    GibbsState state;
    state.cutoff = cutoff;
    state.beta = params.beta;
    state.decomposition = eig_symmetric(build_k(params, ops, r));
    state.log_partition = log_sum_exp(state.decomposition.eigenvalues, params.beta);
    const int dim = cutoff + 1;
    state.weights.resize(dim);
    double wsum = 0.0;
    const double emax = state.decomposition.eigenvalues.back();
    for (int i = 0; i < dim; ++i) {
        state.weights[i] = std::exp(params.beta * (state.decomposition.eigenvalues[i] - emax));
        wsum += state.weights[i];
    }
    for (double& w : state.weights) w /= wsum;
    return state;
}

// Gibbs population of the two highest occupation basis states; this is the
// truncation-boundary mass that the automatic cutoff drives below tolerance.
inline double edge_weight(const GibbsState& s) {
    const int dim = s.cutoff + 1;
    double mass = 0.0;
    for (int i = 0; i < dim; ++i) {
        if (s.weights[i] == 0.0) continue;
        const double top = s.decomposition.eigenvectors(dim - 1, i);
        const double next = s.decomposition.eigenvectors(dim - 2, i);
        mass += s.weights[i] * (top * top + next * next);
    }
    return mass;
}

// Fixed cutoff if the parameters pin one; otherwise start at kCutoffStart and
// double until the truncation edge carries negligible weight and the
// log-partition has stabilised between doublings.
inline GibbsState converged_gibbs(const ModelParams& params, double r) {
    require_finite_trace(params, r);
    if (params.cutoff) return gibbs_at_cutoff(params, r, *params.cutoff);
    GibbsState prev = gibbs_at_cutoff(params, r, kCutoffStart);
    for (int cutoff = 2 * kCutoffStart; cutoff <= kCutoffMax; cutoff *= 2) {
        GibbsState cur = gibbs_at_cutoff(params, r, cutoff);
        // the stability tolerance is relative: one ulp of a large
        // log-partition already exceeds 1e-10
        const double scale = std::max(1.0, std::fabs(cur.log_partition));
        if (edge_weight(cur) < kEdgeWeightTol &&
            std::fabs(cur.log_partition - prev.log_partition) < kLogPartitionTol * scale)
            return cur;
        prev = std::move(cur);
    }
    throw numerical_error("cutoff cap " + std::to_string(kCutoffMax) +
                          " reached without convergence (beta=" + std::to_string(params.beta) +
                          ", mu=" + std::to_string(params.mu) + ", lambda=" + std::to_string(params.lambda) +
                          ", r=" + std::to_string(r) + ")");
}

}  // namespace detail

// Perturbed single-site log-partition p~(r) = (1/beta) ln Tr e^{beta K(r)}.
inline double pressure_tilde(const ModelParams& params, double r) {
    return detail::converged_gibbs(params, r).log_partition / params.beta;
}

inline GibbsState gibbs_state(const ModelParams& params, double r) {
    return detail::converged_gibbs(params, r);
}

// Thermal expectation sum_i w_i <v_i| observable |v_i>.
inline double expectation(const GibbsState& state, const Matrix& observable) {
    const int dim = state.cutoff + 1;
    if (observable.rows() != dim || observable.cols() != dim)
        throw domain_error("expectation: observable dimension " + std::to_string(observable.rows()) +
                           " does not match state dimension " + std::to_string(dim));
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double w = state.weights[i];
        if (w == 0.0) continue;
        double quad_form = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double va = state.decomposition.eigenvectors(a, i);
            if (va == 0.0) continue;
            double row = 0.0;
            for (int b = 0; b < dim; ++b) row += observable(a, b) * state.decomposition.eigenvectors(b, i);
            quad_form += va * row;
        }
        acc += w * quad_form;
    }
    return acc;
}

// <a + a*>, exploiting that quad is tridiagonal with zero diagonal.
inline double quad_expectation(const GibbsState& state, const FockOperators& ops) {
    const int dim = state.cutoff + 1;
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double w = state.weights[i];
        if (w == 0.0) continue;
        double q = 0.0;
        for (int a = 0; a + 1 < dim; ++a)
            q += ops.quad(a, a + 1) * state.decomposition.eigenvectors(a, i) *
                 state.decomposition.eigenvectors(a + 1, i);
        acc += w * 2.0 * q;
    }
    return acc;
}

// Expectation of a diagonal observable given as its diagonal entries.
inline double diag_expectation(const GibbsState& state, const std::vector<double>& diag) {
    const int dim = state.cutoff + 1;
    if (static_cast<int>(diag.size()) != dim)
        throw domain_error("diag_expectation: dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double w = state.weights[i];
        if (w == 0.0) continue;
        double q = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double va = state.decomposition.eigenvectors(a, i);
            q += diag[a] * va * va;
        }
        acc += w * q;
    }
    return acc;
}

inline double occupation_mean(const GibbsState& state) {
    std::vector<double> n(state.cutoff + 1);
    for (int a = 0; a <= state.cutoff; ++a) n[a] = static_cast<double>(a);
    return diag_expectation(state, n);
}

inline double occupation_sq_mean(const GibbsState& state) {
    std::vector<double> n2(state.cutoff + 1);
    for (int a = 0; a <= state.cutoff; ++a) n2[a] = static_cast<double>(a) * static_cast<double>(a);
    return diag_expectation(state, n2);
}

inline DensityMatrix density_matrix(const GibbsState& state) {
    const int dim = state.cutoff + 1;
    DensityMatrix rho;
    rho.matrix = Matrix(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const double w = state.weights[i];
        if (w == 0.0) continue;
        for (int a = 0; a < dim; ++a) {
            const double va = w * state.decomposition.eigenvectors(a, i);
            if (va == 0.0) continue;
            for (int b = 0; b < dim; ++b) rho.matrix(a, b) += va * state.decomposition.eigenvectors(b, i);
        }
    }
    // exact symmetrization; the accumulation above is symmetric up to roundoff
    for (int a = 0; a < dim; ++a)
        for (int b = a + 1; b < dim; ++b) {
            const double v = 0.5 * (rho.matrix(a, b) + rho.matrix(b, a));
            rho.matrix(a, b) = v;
            rho.matrix(b, a) = v;
        }
    return rho;
}

// Quantum relative entropy S(phi || omega) = Tr[rho_phi (ln rho_phi - ln rho_omega)].
// Evaluated via both eigendecompositions, with the cross term taken in the
// eigenbasis of omega. Returns +infinity when phi has support outside omega.
inline double relative_entropy(const DensityMatrix& phi, const DensityMatrix& omega) {
    const int dim = phi.matrix.rows();
    if (omega.matrix.rows() != dim)
        throw domain_error("relative_entropy: dimension mismatch " + std::to_string(dim) + " vs " +
                           std::to_string(omega.matrix.rows()));
    if (phi.matrix == omega.matrix) return 0.0;

    const SpectralDecomposition ep = eig_symmetric(phi.matrix);
    const SpectralDecomposition eo = eig_symmetric(omega.matrix);

    double s_phi = 0.0;  // Tr rho_phi ln rho_phi, with 0 ln 0 = 0
    for (double p : ep.eigenvalues)
        if (p > 0.0) s_phi += p * std::log(p);

    // populations of phi along the eigenvectors of omega
    double cross = 0.0;
    for (int j = 0; j < dim; ++j) {
        double d = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double wa = eo.eigenvectors(a, j);
            if (wa == 0.0) continue;
            double row = 0.0;
            for (int b = 0; b < dim; ++b) row += phi.matrix(a, b) * eo.eigenvectors(b, j);
            d += wa * row;
        }
        const double q = eo.eigenvalues[j];
        if (q <= 0.0) {
            // numerically null direction of omega
            if (d > detail::kSupportTol) return std::numeric_limits<double>::infinity();
            continue;
        }
        if (q <= detail::kSupportTol && d > detail::kNullMassTol)
            return std::numeric_limits<double>::infinity();
        if (d > 0.0) cross += d * std::log(q);
    }
    return std::max(s_phi - cross, 0.0);
}

// Relative entropy between two Gibbs states on a matched cutoff, with the
// log-weights kept in exact form beta*eps - ln Z. Assembled density matrices
// lose tail weights below machine epsilon; this route does not.
inline double relative_entropy(const GibbsState& phi, const GibbsState& omega) {
    const int dim = phi.cutoff + 1;
    if (omega.cutoff != phi.cutoff) throw domain_error("relative_entropy: cutoff mismatch");
    if (phi.weights == omega.weights &&
        phi.decomposition.eigenvectors == omega.decomposition.eigenvectors)
        return 0.0;

    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double p = phi.weights[i];
        if (p <= 0.0) continue;  // p ln p -> 0 for exponentially small tails
        s += p * std::log(p);
    }
    // cross term via spectral overlaps; ln q_j stays finite in log space
    for (int i = 0; i < dim; ++i) {
        const double p = phi.weights[i];
        if (p <= 0.0) continue;
        for (int j = 0; j < dim; ++j) {
            double overlap = 0.0;
            for (int a = 0; a < dim; ++a)
                overlap += phi.decomposition.eigenvectors(a, i) * omega.decomposition.eigenvectors(a, j);
            const double log_q = omega.log_weight(j);
            s -= p * overlap * overlap * log_q;
        }
    }
    return std::max(s, 0.0);
}

// Residual of the finite-dimensional identity
//   S(phi || omega) = beta phi(A) - beta p~(|nu|) + beta p~(0),
// with A = nu a* + conj(nu) a gauge-rotated to r = |nu| and all four terms
// evaluated at one common cutoff.
inline double entropy_identity_residual(const ModelParams& params, std::complex<double> nu) {
    validate_params(params);
    if (!(params.lambda > 0.0)) throw domain_error("entropy_identity_residual: requires lambda > 0");
    const double r = std::abs(nu);

    const GibbsState perturbed = detail::converged_gibbs(params, r);
    ModelParams fixed = params;
    fixed.cutoff = perturbed.cutoff;
    const GibbsState reference = detail::gibbs_at_cutoff(fixed, 0.0, perturbed.cutoff);

    const FockOperators ops = build_fock_operators(perturbed.cutoff);
    const Matrix a_field = r * ops.quad;

    const double phi_a = expectation(perturbed, a_field);
    const double s = relative_entropy(perturbed, reference);
    const double rhs = params.beta * phi_a - perturbed.log_partition + reference.log_partition;
    return std::fabs(s - rhs);
}

}  // namespace bhmf
