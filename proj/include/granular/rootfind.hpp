// rootfind.hpp — bracketed scalar root finding.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace granular {

// Bisection refined by secant steps on a bracketing interval.  The bracket is
// never abandoned: a secant proposal falling outside (or making poor progress)
// is replaced by the midpoint, so convergence is guaranteed.
inline double find_root(const std::function<double(double)>& f, double lo, double hi,
                        double tol = 1e-12, int max_iter = 240) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if (flo * fhi > 0) throw std::invalid_argument("find_root: endpoints do not bracket a root");
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (lo + hi);
        // secant on odd iterations; plain bisection on even ones guarantees
        // the bracket halves at least every other step
        if (it % 2 == 1 && std::abs(fhi - flo) > 0) {
            const double sec = hi - fhi * (hi - lo) / (fhi - flo);
            if (sec > lo && sec < hi) mid = sec;
        }
        const double fmid = f(mid);
        if (fmid == 0) return mid;
        if (flo * fmid < 0) { hi = mid; fhi = fmid; }
        else                { lo = mid; flo = fmid; }
        if (hi - lo < tol) return 0.5 * (lo + hi);
    }
    return 0.5 * (lo + hi);
}

// Expand [lo, hi] to the right until f changes sign, then solve.
inline double find_root_expanding(const std::function<double(double)>& f, double lo, double hi,
                                  double tol = 1e-12, int max_expand = 60) {
    double flo = f(lo);
    double fhi = f(hi);
    for (int k = 0; k < max_expand && flo * fhi > 0; ++k) {
        lo = hi;
        flo = fhi;
        hi *= 2;
        fhi = f(hi);
    }
    if (flo * fhi > 0) throw std::runtime_error("find_root_expanding: no sign change found");
    return find_root(f, lo, hi, tol);
}

}  // namespace granular
