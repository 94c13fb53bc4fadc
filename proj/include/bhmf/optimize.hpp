#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "bhmf/model.hpp"

namespace bhmf {

struct ScalarMax {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section maximization on [a, b], refined until the bracket width
// drops below xtol. Returns the best point actually evaluated.
template <typename F>
ScalarMax golden_section_max(F&& f, double a, double b, double xtol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    ScalarMax best = (f1 >= f2) ? ScalarMax{x1, f1} : ScalarMax{x2, f2};
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if (f2 > best.value) best = {x2, f2};
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if (f1 > best.value) best = {x1, f1};
        }
    }
    return best;
}

// Indices i whose value is >= both neighbours (grid local maxima, boundaries
// included). Ties keep every plateau member; callers deduplicate after
// refinement.
inline std::vector<int> scan_local_maxima(const std::vector<double>& values) {
    std::vector<int> out;
    const int n = static_cast<int>(values.size());
    for (int i = 0; i < n; ++i) {
        const bool left_ok = (i == 0) || (values[i] >= values[i - 1]);
        const bool right_ok = (i == n - 1) || (values[i] >= values[i + 1]);
        if (left_ok && right_ok) out.push_back(i);
    }
    return out;
}

// Bisection for a root of g on [lo, hi]; requires a sign change. Stops when
// the interval is below xtol and returns the midpoint.
template <typename G>
double bisect_root(G&& g, double lo, double hi, double xtol, int max_iter = 200) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0))
        throw domain_error("bisect_root: no sign change on bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace bhmf
