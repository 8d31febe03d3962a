// quadrature.hpp — Gauss–Legendre rules and an adaptive scheme built on
// nested low/high order pairs.  Nodes are generated at run time by Newton
// iteration on the Legendre recurrence, so no tabulated constants are needed.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace granular {

struct QuadRule {
    std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

inline const QuadRule& gauss_legendre_rule(int n) {
    static std::map<int, QuadRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess, Newton on P_n
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

inline double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 32) {
    const QuadRule& r = gauss_legendre_rule(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

// Adaptive integration, error estimated from a nested 10/21 point pair.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double abs_tol = 1e-12, int max_depth = 40) {
    struct Impl {
        const std::function<double(double)>& f;
        int max_depth;
        double run(double a, double b, double tol, int depth) const {
            const double coarse = integrate_gl(f, a, b, 10);
            const double fine = integrate_gl(f, a, b, 21);
            // never demand more than rounding allows on a panel
            const double floor = 4e-16 * (std::abs(fine) + std::abs(coarse));
            if (std::abs(fine - coarse) <= std::max(tol, floor) || depth >= max_depth)
                return fine;
            const double m = 0.5 * (a + b);
            return run(a, m, 0.5 * tol, depth + 1) + run(m, b, 0.5 * tol, depth + 1);
        }
    };
    if (a == b) return 0;
    return Impl{f, max_depth}.run(a, b, abs_tol, 0);
}

}  // namespace granular
