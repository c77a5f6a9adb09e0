#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace seqdetect::detail {

/// Safeguarded Newton iteration for an increasing function g with a sign
/// change inside [lo, hi]. Steps that leave the current bracket fall back to
/// bisection, so the bracket always shrinks.
template <class G, class DG>
double newton_bracketed(G&& g, DG&& dg, double lo, double hi, double x0, int max_iter = 2000)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double gx = g(x);
        if (gx == 0.0)
            return x;
        if (gx < 0.0)
            lo = x;
        else
            hi = x;

        const double slope = dg(x);
        double next = x - gx / slope;
        if (!(slope > 0.0) || !std::isfinite(next) || next <= lo || next >= hi)
            next = 0.5 * (lo + hi);

        if (std::abs(next - x) <= 2.0 * eps * std::abs(next)
            || hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)))
            return next;
        x = next;
    }
    return x;
}

/// Plain bisection on an increasing function; used where no derivative is
/// available. Stops at relative width `xtol`.
template <class G>
double bisect_increasing(G&& g, double lo, double hi, double xtol = 1e-15, int max_iter = 400)
{
    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= xtol * std::max({std::abs(lo), std::abs(hi), 1e-300}))
            return mid;
        const double gm = g(mid);
        if (gm == 0.0)
            return mid;
        if (gm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace seqdetect::detail
