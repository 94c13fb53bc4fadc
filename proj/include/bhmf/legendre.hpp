#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bhmf/gibbs.hpp"
#include "bhmf/model.hpp"
#include "bhmf/optimize.hpp"
#include "bhmf/varsolve.hpp"

namespace bhmf {

// Sampled rate function I(x) = sup_{r>=0} { 2rx - p~(r) } + p~(0), convex,
// with the maximizing r recorded per grid point.
struct RateFunctionTable {
    std::vector<double> x_grid;
    std::vector<double> i_values;
    std::vector<double> r_argmax;
    double p_tilde_zero = 0.0;
};

namespace detail {

struct RatePoint {
    double i_value = 0.0;
    double r_argmax = 0.0;
};

// sup_{r>=0} { 2rx - p~(r) }: concave in r since p~ is convex. The slope of
// the objective is 2x - <a+a*>_r, positive at r = 0 for x > 0 and eventually
// negative, so a doubling probe brackets the maximum.
inline RatePoint rate_point(const ModelParams& params, double x, double p_tilde_zero) {
    RatePoint out;
    if (x <= 0.0) {
        out.i_value = 0.0;  // supremum at r = 0 exactly
        out.r_argmax = 0.0;
        return out;
    }
    auto quad_mean = [&](double r) {
        const GibbsState g = converged_gibbs(params, r);
        return quad_expectation(g, build_fock_operators(g.cutoff));
    };
    double lo = 0.0;
    double hi = 0.5;
    while (quad_mean(hi) < 2.0 * x) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) throw numerical_error("rate_point: failed to bracket the transform maximum");
    }
    auto f = [&](double r) { return 2.0 * r * x - pressure_tilde(params, r); };
    ScalarMax best = golden_section_max(f, lo, hi, 1e-8);

    // polish the stationarity condition <a+a*>_r = 2x
    double r = best.x;
    for (int iter = 0; iter < 8; ++iter) {
        const double g = quad_mean(r) - 2.0 * x;
        if (std::fabs(g) < 1e-11) break;
        const double h = 1e-5 * std::max(1.0, r);
        const double rlo = std::max(r - h, 0.0);
        const double gp = (quad_mean(r + h) - quad_mean(rlo)) / (r + h - rlo);
        if (!(gp > 1e-12)) break;
        const double next = r - g / gp;
        if (!(next > 0.0) || !std::isfinite(next)) break;
        if (std::fabs(next - r) < 1e-13) {
            r = next;
            break;
        }
        r = next;
    }
    if (r != best.x) {
        const double fr = f(r);
        if (fr >= best.value) best = {r, fr};
    }
    // boundary candidate r = 0
    if (-p_tilde_zero > best.value) best = {0.0, -p_tilde_zero};

    out.i_value = best.value + p_tilde_zero;
    out.r_argmax = best.x;
    return out;
}

}  // namespace detail

inline RateFunctionTable rate_function(const ModelParams& params, const std::vector<double>& x_grid) {
    validate_params(params);
    if (!(params.lambda > 0.0)) throw domain_error("rate_function: requires lambda > 0");
    if (x_grid.empty()) throw domain_error("rate_function: empty grid");
    for (size_t i = 0; i < x_grid.size(); ++i) {
        if (x_grid[i] < 0.0) throw domain_error("rate_function: grid must be nonnegative");
        if (i > 0 && x_grid[i] <= x_grid[i - 1]) throw domain_error("rate_function: grid must be ascending");
    }
    RateFunctionTable table;
    table.x_grid = x_grid;
    table.p_tilde_zero = pressure_tilde(params, 0.0);
    table.i_values.reserve(x_grid.size());
    table.r_argmax.reserve(x_grid.size());
    for (double x : x_grid) {
        const detail::RatePoint p = detail::rate_point(params, x, table.p_tilde_zero);
        table.i_values.push_back(p.i_value);
        table.r_argmax.push_back(p.r_argmax);
    }
    return table;
}

// | sup_x { x^2 - I(x) } + p~(0) - sup_r { -r^2 + p~(r) } |, which vanishes
// up to discretization error.
inline double duality_gap(const ModelParams& params) {
    validate_params(params);
    if (!(params.lambda > 0.0)) throw domain_error("duality_gap: requires lambda > 0");

    const VariationalSolution primal = solve(params);
    const double pz = pressure_tilde(params, 0.0);

    auto dual = [&](double x) { return x * x - detail::rate_point(params, x, pz).i_value; };

    const double x_hi = std::max(2.0, 2.0 * primal.r_star + 1.0);
    const int n = 32;
    std::vector<double> xs(n + 1), vals(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = x_hi * i / n;
        vals[i] = dual(xs[i]);
    }
    double best = vals[0];
    for (int idx : scan_local_maxima(vals)) {
        best = std::max(best, vals[idx]);
        if (idx > 0 && idx < n) {
            const ScalarMax refined = golden_section_max(dual, xs[idx - 1], xs[idx + 1], 1e-7);
            best = std::max(best, refined.value);
        }
    }
    return std::fabs(best + pz - primal.pressure);
}

// --------------------------------------------------------------------------
// coherent-state lower bound and growth of p~
// --------------------------------------------------------------------------

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

// (1/beta) ln of the phase-space integral with the given node counts.
inline double coherent_integral(const ModelParams& params, double r, double s_max, int n_s, int n_theta) {
    std::vector<double> sn, sw, tn, tw;
    gauss_legendre(n_s, sn, sw);
    gauss_legendre(n_theta, tn, tw);

    const double beta = params.beta;
    std::vector<double> exponents;
    std::vector<double> prefactors;
    exponents.reserve(static_cast<size_t>(n_s) * n_theta);
    prefactors.reserve(exponents.capacity());
    for (int i = 0; i < n_s; ++i) {
        const double s = 0.5 * s_max * (sn[i] + 1.0);
        const double ws = 0.5 * s_max * sw[i];
        const double radial = beta * ((params.mu - 1.0) * s * s - params.lambda * s * s * s * s);
        for (int j = 0; j < n_theta; ++j) {
            const double theta = M_PI * (tn[j] + 1.0);
            const double wt = M_PI * tw[j];
            exponents.push_back(radial + beta * 2.0 * r * s * std::cos(theta));
            prefactors.push_back(ws * wt * s / M_PI);
        }
    }
    double m = exponents[0];
    for (double e : exponents) m = std::max(m, e);
    double sum = 0.0;
    for (size_t k = 0; k < exponents.size(); ++k) sum += prefactors[k] * std::exp(exponents[k] - m);
    return (m + std::log(sum)) / beta;
}

}  // namespace detail

// Berezin-Lieb coherent-state lower bound on p~(r):
//   (1/beta) ln Int (dz dz~/pi) exp[beta((mu-1)|z|^2 - lambda|z|^4 + 2 r Re z)].
inline double berezin_lieb_lower_bound(const ModelParams& params, double r) {
    require_finite_trace(params, 0.0);
    if (!(params.lambda > 0.0)) throw domain_error("berezin_lieb_lower_bound: requires lambda > 0");
    if (!(r >= 0.0)) throw domain_error("berezin_lieb_lower_bound: r must be nonnegative");

    // radial extent: integrand tail below e^{-40} of the exponent scale
    const double target = 40.0 / params.beta;
    auto damping = [&](double s) {
        return (1.0 - params.mu) * s * s + params.lambda * s * s * s * s - 2.0 * r * s - target;
    };
    double s_hi = 1.0;
    while (damping(s_hi) < 0.0) {
        s_hi *= 2.0;
        if (s_hi > 1e8) throw numerical_error("berezin_lieb_lower_bound: radial cutoff search failed");
    }
    const double s_max = bisect_root(damping, 0.0, s_hi, 1e-9 * s_hi);

    const double coarse = detail::coherent_integral(params, r, s_max, 128, 64);
    const double fine = detail::coherent_integral(params, r, s_max, 256, 128);
    if (std::fabs(fine - coarse) > 1e-8 * std::max(1.0, std::fabs(fine)))
        throw numerical_error("berezin_lieb_lower_bound: quadrature did not converge");
    return fine;
}

// Least-squares slope of ln p~ against ln nu on a geometric grid; the
// asymptotic exponent of the quartic well is 4/3.
inline double growth_exponent(const ModelParams& params, double nu_min, double nu_max, int n_points) {
    validate_params(params);
    if (!(params.lambda > 0.0)) throw domain_error("growth_exponent: requires lambda > 0");
    if (!(0.0 < nu_min && nu_min < nu_max)) throw domain_error("growth_exponent: need 0 < nu_min < nu_max");
    if (n_points < 4) throw domain_error("growth_exponent: need at least 4 points");

    const double ratio = nu_max / nu_min;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double nu = nu_min * std::pow(ratio, static_cast<double>(i) / (n_points - 1));
        const double p = pressure_tilde(params, nu);
        if (!(p > 0.0))
            throw domain_error("growth_exponent: p~ must be positive on the fit window, got " +
                               std::to_string(p) + " at nu = " + std::to_string(nu));
        const double x = std::log(nu);
        const double y = std::log(p);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(n_points);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bhmf
