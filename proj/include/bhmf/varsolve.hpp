#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bhmf/gibbs.hpp"
#include "bhmf/model.hpp"
#include "bhmf/optimize.hpp"

namespace bhmf {

// Solution of p = sup_{r >= 0} { -r^2 + p~(r) } together with the Gibbs
// observables evaluated at the maximizer. condensate_density = r_star^2;
// gap_residual = |2 r_star - <a + a*>| measures the stationarity condition.
struct VariationalSolution {
    double r_star = 0.0;
    double pressure = 0.0;
    double density = 0.0;
    double number_sq_mean = 0.0;
    double condensate_density = 0.0;
    double condensate_fraction = 0.0;
    double gap_residual = 0.0;
    bool degenerate_branch = false;
    double competing_r = 0.0;  // meaningful only when degenerate_branch is set
};

// F(r) = -r^2 + p~(r), the scalar variational objective.
inline double objective(const ModelParams& params, double r) {
    return -r * r + pressure_tilde(params, r);
}

namespace detail {

constexpr double kBranchTol = 1e-8;       // two local maxima closer than this coexist
constexpr double kGoldenWidth = 1e-8;     // golden-section bracket width
constexpr double kDistinctBranch = 1e-6;  // minimum r separation of competing branches

struct ObjectivePoint {
    double r = 0.0;
    double f = 0.0;
    double slope = 0.0;  // F'(r) = <a + a*>_r - 2r
};

inline ObjectivePoint eval_objective_point(const ModelParams& params, double r) {
    const GibbsState g = converged_gibbs(params, r);
    const FockOperators ops = build_fock_operators(g.cutoff);
    ObjectivePoint p;
    p.r = r;
    p.f = -r * r + g.log_partition / params.beta;
    p.slope = quad_expectation(g, ops) - 2.0 * r;
    return p;
}

// Newton refinement of the stationarity condition G(r) = <a+a*>_r - 2r = 0
// with a finite-difference derivative; keeps the input point when Newton is
// not applicable (wrong curvature, boundary, divergence).
inline double newton_polish(const ModelParams& params, double r0) {
    double r = r0;
    for (int iter = 0; iter < 8; ++iter) {
        const double g = eval_objective_point(params, r).slope;
        if (std::fabs(g) < 1e-11) break;
        const double h = 1e-5 * std::max(1.0, r);
        const double lo = std::max(r - h, 0.0);
        const double hi = r + h;
        const double gp =
            (eval_objective_point(params, hi).slope - eval_objective_point(params, lo).slope) / (hi - lo);
        if (!(gp < -1e-12)) break;  // need negative curvature of F at a maximum
        const double next = r - g / gp;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        if (std::fabs(next - r) < 1e-13) {
            r = next;
            break;
        }
        r = next;
    }
    return r;
}

inline VariationalSolution observables_at(const ModelParams& params, double r_star, double pressure,
                                          bool degenerate, double competing_r) {
    const GibbsState g = converged_gibbs(params, r_star);
    const FockOperators ops = build_fock_operators(g.cutoff);
    VariationalSolution sol;
    sol.r_star = r_star;
    sol.pressure = pressure;
    sol.density = occupation_mean(g);
    sol.number_sq_mean = occupation_sq_mean(g);
    sol.condensate_density = r_star * r_star;
    sol.condensate_fraction = (sol.condensate_density == 0.0 || sol.density <= 0.0)
                                  ? 0.0
                                  : sol.condensate_density / sol.density;
    sol.gap_residual = std::fabs(2.0 * r_star - quad_expectation(g, ops));
    sol.degenerate_branch = degenerate;
    sol.competing_r = competing_r;
    return sol;
}

}  // namespace detail

inline VariationalSolution solve(const ModelParams& params) {
    validate_params(params);

    if (params.lambda == 0.0) {
        if (params.mu >= 0.0)
            throw domain_error("variational objective is unbounded for lambda = 0, mu >= 0");
        // free gas: F is strictly decreasing in r, the maximizer sits at r = 0
        const double p0 = pressure_tilde(params, 0.0);
        return detail::observables_at(params, 0.0, p0, false, 0.0);
    }

    // coarse geometric + linear grid, expanded while F still rises at the boundary
    const GibbsState g0 = detail::converged_gibbs(params, 0.0);
    const double density0 = occupation_mean(g0);
    double r_max = std::max(4.0, 4.0 * (density0 + 1.0));

    std::vector<double> grid;
    grid.push_back(0.0);
    for (double r = 0.01; r < 0.9; r *= 2.0) grid.push_back(r);
    const int linear_points = 18;
    for (int i = 1; i <= linear_points; ++i) grid.push_back(r_max * i / linear_points);
    std::sort(grid.begin(), grid.end());

    std::vector<detail::ObjectivePoint> scan;
    scan.reserve(grid.size() + 64);
    for (double r : grid) scan.push_back(detail::eval_objective_point(params, r));

    int expansions = 0;
    while (scan.back().slope > 0.0 || scan.back().f > scan[scan.size() - 2].f) {
        if (++expansions > 16)
            throw numerical_error("variational objective still increasing at r = " +
                                  std::to_string(scan.back().r));
        const double lo = scan.back().r;
        const double hi = 1.6 * lo;
        for (int i = 1; i <= 4; ++i)
            scan.push_back(detail::eval_objective_point(params, lo + (hi - lo) * i / 4.0));
        r_max = hi;
    }

    // candidate maximizers: r = 0 plus every refined interior bracket
    struct Candidate {
        double r, f;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({0.0, scan[0].f});

    auto f_only = [&](double r) { return -r * r + pressure_tilde(params, r); };

    auto refine_bracket = [&](double lo, double hi) {
        const ScalarMax g = golden_section_max(f_only, lo, hi, detail::kGoldenWidth);
        Candidate best{g.x, g.value};
        if (best.r > 1e-7) {
            const double polished = detail::newton_polish(params, best.r);
            if (polished != best.r) {
                const double fp = f_only(polished);
                if (fp >= best.f) best = {polished, fp};
            }
        }
        candidates.push_back(best);
    };

    std::vector<double> fvals(scan.size());
    for (size_t i = 0; i < scan.size(); ++i) fvals[i] = scan[i].f;
    for (int idx : scan_local_maxima(fvals)) {
        if (idx == 0) continue;  // boundary candidate already recorded
        const double lo = scan[idx - 1].r;
        const double hi = (idx + 1 < static_cast<int>(scan.size())) ? scan[idx + 1].r : scan[idx].r;
        refine_bracket(lo, hi);
    }
    // derivative sign changes catch maxima that fall between grid values
    for (size_t i = 0; i + 1 < scan.size(); ++i) {
        if (scan[i].slope > 0.0 && scan[i + 1].slope <= 0.0 &&
            !(scan[i].f >= scan[i + 1].f && (i == 0 || scan[i].f >= scan[i - 1].f)))
            refine_bracket(scan[i].r, scan[i + 1].r);
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.f != b.f) return a.f > b.f;
        return a.r > b.r;
    });

    // scanning guarantees maximality over every grid point by construction
    Candidate best = candidates[0];
    for (const auto& p : scan)
        if (p.f > best.f) best = {p.r, p.f};

    bool degenerate = false;
    double competing = 0.0;
    for (size_t i = 1; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        if (std::fabs(c.f - best.f) < detail::kBranchTol &&
            std::fabs(c.r - best.r) > detail::kDistinctBranch) {
            degenerate = true;
            // deterministic tie-break: report the larger-r branch
            if (c.r > best.r) {
                competing = best.r;
                best = c;
            } else {
                competing = c.r;
            }
            break;
        }
    }

    return detail::observables_at(params, best.r, best.f, degenerate, competing);
}

// <n> at the maximizer; equals dp/dmu by the envelope theorem.
inline double density_of_mu(const ModelParams& params) {
    return solve(params).density;
}

}  // namespace bhmf
