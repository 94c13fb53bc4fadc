#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace bhmf {

// Thrown when inputs are outside the model's domain (e.g. free gas with
// mu >= 1, or a phase-boundary bracket that contains no transition).
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a computation fails to converge (eigensolver sweep budget,
// occupation-cutoff cap, quadrature disagreement).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Physical and numerical knobs shared by every computation.
//  beta   : inverse temperature, > 0
//  mu     : chemical potential
//  lambda : on-site repulsion, >= 0
//  cutoff : max occupation per site; nullopt requests automatic doubling
struct ModelParams {
    double beta = 1.0;
    double mu = 0.0;
    double lambda = 0.0;
    std::optional<int> cutoff;
};

inline void validate_params(const ModelParams& p) {
    if (!(p.beta > 0.0)) throw domain_error("beta must be positive, got " + std::to_string(p.beta));
    if (!(p.lambda >= 0.0)) throw domain_error("lambda must be nonnegative, got " + std::to_string(p.lambda));
    if (p.cutoff && *p.cutoff < 1) throw domain_error("cutoff must be >= 1, got " + std::to_string(*p.cutoff));
}

// At lambda = 0 the quartic term is absent and Tr e^{beta K(r)} only exists
// for mu < 1 with the hopping source switched off.
inline void require_finite_trace(const ModelParams& p, double r) {
    validate_params(p);
    if (!(r >= 0.0)) throw domain_error("hopping source r must be nonnegative, got " + std::to_string(r));
    if (p.lambda == 0.0) {
        if (r > 0.0) throw domain_error("lambda = 0 admits r = 0 only (trace diverges for r > 0)");
        if (p.mu >= 1.0) throw domain_error("lambda = 0 requires mu < 1, got mu = " + std::to_string(p.mu));
    }
}

}  // namespace bhmf
