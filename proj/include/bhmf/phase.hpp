#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bhmf/model.hpp"
#include "bhmf/varsolve.hpp"

namespace bhmf {

struct PhasePoint {
    double beta = 0.0;
    double mu = 0.0;
    double lambda = 0.0;
    double rho = 0.0;              // density at the solved point
    double specific_volume = 0.0;  // 1 / rho
    VariationalSolution solution;
    bool condensed = false;
};

struct MuSolution {
    double mu = 0.0;
    bool discontinuity = false;  // set when the target density falls inside a first-order jump
};

namespace detail {

constexpr double kCondensedThreshold = 1e-6;  // r_star above this counts as condensed
constexpr double kDensityTol = 1e-8;
constexpr double kMuIntervalTol = 1e-12;
constexpr double kFractionThreshold = 1e-3;   // condensate-fraction level defining lambda_c
constexpr double kBetaTol = 1e-4;

}  // namespace detail

// Grand-canonical inversion: find mu with <n>(mu) = rho_target by bisection
// on the monotone density. The mu entry of `base` is ignored.
inline MuSolution mu_of_density(const ModelParams& base, double rho_target) {
    validate_params(base);
    if (!(rho_target > 0.0)) throw domain_error("mu_of_density: target density must be positive");

    auto density_at = [&](double mu) {
        ModelParams p = base;
        p.mu = mu;
        return density_of_mu(p);
    };

    double lo = -100.0;
    // the free gas only exists for mu < 0; lambda > 0 admits any mu
    double hi = (base.lambda == 0.0) ? -1e-9 : 100.0;

    const double rho_hi = density_at(hi);
    if (rho_hi + detail::kDensityTol < rho_target)
        throw domain_error("mu_of_density: density " + std::to_string(rho_target) +
                           " not reachable below mu = " + std::to_string(hi) + " (max " +
                           std::to_string(rho_hi) + ")");
    const double rho_lo = density_at(lo);
    if (rho_lo > rho_target + detail::kDensityTol)
        throw domain_error("mu_of_density: density " + std::to_string(rho_target) +
                           " already exceeded at mu = " + std::to_string(lo));

    double mid = 0.5 * (lo + hi);
    while (hi - lo > detail::kMuIntervalTol) {
        mid = 0.5 * (lo + hi);
        const double rho = density_at(mid);
        if (std::fabs(rho - rho_target) < detail::kDensityTol) return {mid, false};
        if (rho < rho_target)
            lo = mid;
        else
            hi = mid;
    }
    // interval collapsed with the density still off target: first-order jump
    return {0.5 * (lo + hi), true};
}

// Critical inverse temperature at fixed density, located by bisection on the
// condensed indicator r_star(beta, mu(rho)) > threshold.
inline double critical_beta(double lambda, double rho, double beta_lo, double beta_hi) {
    if (!(lambda >= 0.0)) throw domain_error("critical_beta: lambda must be nonnegative");
    if (!(0.0 < beta_lo && beta_lo < beta_hi)) throw domain_error("critical_beta: invalid beta bracket");

    std::vector<std::pair<double, bool>> visited;
    auto condensed_at = [&](double beta) {
        ModelParams p;
        p.beta = beta;
        p.lambda = lambda;
        p.mu = mu_of_density(p, rho).mu;
        const bool c = solve(p).r_star > detail::kCondensedThreshold;
        visited.emplace_back(beta, c);
        return c;
    };

    const bool c_lo = condensed_at(beta_lo);
    const bool c_hi = condensed_at(beta_hi);
    if (c_lo == c_hi)
        throw domain_error("critical_beta: condensed indicator identical at bracket [" +
                           std::to_string(beta_lo) + ", " + std::to_string(beta_hi) +
                           "]; no transition inside");

    double lo = beta_lo, hi = beta_hi;
    while (hi - lo > detail::kBetaTol) {
        const double mid = 0.5 * (lo + hi);
        if (condensed_at(mid) == c_lo)
            lo = mid;
        else
            hi = mid;
    }

    // the indicator must flip exactly once over the betas seen; re-entrant
    // condensation is reported, never averaged away
    std::sort(visited.begin(), visited.end());
    int flips = 0;
    for (size_t i = 1; i < visited.size(); ++i)
        if (visited[i].second != visited[i - 1].second) ++flips;
    if (flips > 1)
        throw numerical_error("critical_beta: re-entrant condensation detected across the bracket");

    return 0.5 * (lo + hi);
}

// Critical coupling of the density-k Mott region at low temperature: scan
// lambda over [2k - 0.5, 2k + 2.5] at fixed density rho = k and refine the
// condensate-fraction threshold crossing by bisection.
inline double lambda_critical(int k, double beta_large) {
    if (k < 1) throw domain_error("lambda_critical: k must be >= 1");
    if (!(beta_large >= 100.0)) throw domain_error("lambda_critical: beta must be >= 100");

    const double rho = static_cast<double>(k);
    auto fraction_at = [&](double lambda) {
        ModelParams p;
        p.beta = beta_large;
        p.lambda = lambda;
        p.mu = mu_of_density(p, rho).mu;
        return solve(p).condensate_fraction;
    };

    const double lam_lo = 2.0 * k - 0.5;
    const double lam_hi = 2.0 * k + 2.5;
    const double step = 0.05;

    double prev_lambda = lam_lo;
    double prev_frac = fraction_at(prev_lambda);
    double cross_lo = 0.0, cross_hi = 0.0;
    bool found = false;
    for (double lam = lam_lo + step; lam <= lam_hi + 1e-12; lam += step) {
        const double frac = fraction_at(lam);
        if (prev_frac >= detail::kFractionThreshold && frac < detail::kFractionThreshold) {
            cross_lo = prev_lambda;
            cross_hi = lam;
            found = true;
            break;
        }
        prev_lambda = lam;
        prev_frac = frac;
    }
    if (!found)
        throw domain_error("lambda_critical: no condensate-fraction crossing in [" +
                           std::to_string(lam_lo) + ", " + std::to_string(lam_hi) + "]");

    double lo = cross_lo, hi = cross_hi;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (fraction_at(mid) >= detail::kFractionThreshold)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Fixed-temperature scan over densities: invert mu per grid point, solve,
// and attach the specific volume v = 1/rho.
inline std::vector<PhasePoint> isotherm(double lambda, double beta, const std::vector<double>& rho_grid) {
    if (rho_grid.empty()) throw domain_error("isotherm: empty density grid");
    for (size_t i = 0; i < rho_grid.size(); ++i) {
        if (!(rho_grid[i] > 0.0)) throw domain_error("isotherm: densities must be positive");
        if (i > 0 && rho_grid[i] <= rho_grid[i - 1]) throw domain_error("isotherm: grid must be ascending");
    }
    std::vector<PhasePoint> out;
    out.reserve(rho_grid.size());
    for (double rho : rho_grid) {
        ModelParams p;
        p.beta = beta;
        p.lambda = lambda;
        p.mu = mu_of_density(p, rho).mu;
        PhasePoint pt;
        pt.beta = beta;
        pt.mu = p.mu;
        pt.lambda = lambda;
        pt.solution = solve(p);
        pt.rho = pt.solution.density;
        pt.specific_volume = 1.0 / rho;
        pt.condensed = pt.solution.r_star > detail::kCondensedThreshold;
        out.push_back(pt);
    }
    return out;
}

inline std::vector<PhasePoint> condensate_curve(double lambda, double beta,
                                                const std::vector<double>& rho_grid) {
    return isotherm(lambda, beta, rho_grid);
}

}  // namespace bhmf
