// residual.hpp — independent certification of candidate solutions by direct
// substitution into the governing equations with centered finite differences.
//
// This module never reuses the constructors it checks: fields come in as
// opaque evaluators, derivatives are formed numerically, and the equations are
// assembled here from scratch.  A genuine solution with smooth evaluators
// shows residuals falling at second order in the stencil width until the
// rounding floor; anything else does not.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "granular/core.hpp"
#include "granular/linalg.hpp"

namespace granular {

enum class EquationSystem { EulerGranular, ChaplyginConstrained, ChaplyginConservative, Lagrangian };

inline const char* to_string(EquationSystem s) {
    switch (s) {
        case EquationSystem::EulerGranular: return "euler_granular";
        case EquationSystem::ChaplyginConstrained: return "chaplygin_constrained";
        case EquationSystem::ChaplyginConservative: return "chaplygin_conservative";
        case EquationSystem::Lagrangian: return "lagrangian";
    }
    return "?";
}

struct FieldSet {
    int dim = 1;
    std::function<double(double, const Vec&)> rho;
    std::function<Vec(double, const Vec&)> velocity;
    std::function<double(double, const Vec&)> temperature;
};

struct EquationResidual {
    std::string name;
    double max_norm = 0;
    double l2_norm = 0;
};

struct ResidualReport {
    EquationSystem system;
    double h = 0;
    std::vector<EquationResidual> equations;

    double max_over_equations() const {
        double m = 0;
        for (const auto& e : equations) m = std::max(m, e.max_norm);
        return m;
    }
};

struct GridSpec {
    double t_lo, t_hi;
    Vec x_lo, x_hi;  // dim components
    int nt = 5;
    int nx = 9;
};

namespace residual_detail {

// centered first derivative in t of a scalar field
template <class F>
double dt(const F& f, double t, const Vec& x, double h) {
    return (f(t + h, x) - f(t - h, x)) / (2 * h);
}

template <class F>
double dxi(const F& f, double t, Vec x, int i, double h) {
    x[i] += h;
    const double hi = f(t, x);
    x[i] -= 2 * h;
    const double lo = f(t, x);
    return (hi - lo) / (2 * h);
}

inline void accumulate(EquationResidual& e, double r, std::size_t& count) {
    e.max_norm = std::max(e.max_norm, std::abs(r));
    e.l2_norm += r * r;
    ++count;
}

}  // namespace residual_detail

// Residuals of the ideal granular gas system
//   mass:     d_t rho + div(rho v)
//   momentum: d_t(rho v_i) + d_j(rho v_i v_j) + d_i(rho T)      (flux form)
//   energy:   d_t T + (v, grad T) + (gamma-1) T div v + lambda rho T^{3/2}
inline ResidualReport residual_euler(const FieldSet& f, const ModelParams& p, const GridSpec& g,
                                     double h) {
    using namespace residual_detail;
    const int n = f.dim;
    ResidualReport rep{EquationSystem::EulerGranular, h, {}};
    rep.equations.resize(3);
    rep.equations[0].name = "mass";
    rep.equations[1].name = "momentum";
    rep.equations[2].name = "energy";
    std::size_t count = 0;

    auto mom_flux = [&](int i, int j) {
        return [&, i, j](double t, const Vec& x) {
            const Vec v = f.velocity(t, x);
            return f.rho(t, x) * v[i] * v[j];
        };
    };
    auto pressure = [&](double t, const Vec& x) { return f.rho(t, x) * f.temperature(t, x); };
    auto rho_v = [&](int i) {
        return [&, i](double t, const Vec& x) { return f.rho(t, x) * f.velocity(t, x)[i]; };
    };

    int total = 1;
    for (int d = 0; d < n; ++d) total *= g.nx;
    for (int it = 0; it < g.nt; ++it) {
        const double t = g.t_lo + (g.nt == 1 ? 0 : (g.t_hi - g.t_lo) * it / double(g.nt - 1));
        for (int flat = 0; flat < total; ++flat) {
            Vec x(n);
            int rem = flat;
            for (int d = 0; d < n; ++d) {
                const int idx = rem % g.nx;
                rem /= g.nx;
                x[d] = g.x_lo[d] + (g.nx == 1 ? 0 : (g.x_hi[d] - g.x_lo[d]) * idx / double(g.nx - 1));
            }
            // mass
            double r = dt(f.rho, t, x, h);
            for (int i = 0; i < n; ++i) r += dxi(rho_v(i), t, x, i, h);
            accumulate(rep.equations[0], r, count);
            // momentum (worst component)
            double rm = 0;
            for (int i = 0; i < n; ++i) {
                double ri = dt(rho_v(i), t, x, h);
                for (int j = 0; j < n; ++j) ri += dxi(mom_flux(i, j), t, x, j, h);
                ri += dxi(pressure, t, x, i, h);
                rm = std::max(rm, std::abs(ri));
            }
            accumulate(rep.equations[1], rm, count);
            // energy
            const Vec v = f.velocity(t, x);
            double re = dt(f.temperature, t, x, h);
            double divv = 0;
            for (int i = 0; i < n; ++i) {
                re += v[i] * dxi(f.temperature, t, x, i, h);
                divv += dxi([&](double tt, const Vec& xx) { return f.velocity(tt, xx)[i]; }, t, x, i, h);
            }
            const double T = f.temperature(t, x);
            re += (p.gamma - 1.0) * T * divv + p.lambda * f.rho(t, x) * std::pow(T, 1.5);
            accumulate(rep.equations[2], re, count);
        }
    }
    for (auto& e : rep.equations) e.l2_norm = std::sqrt(e.l2_norm / double(count / 3 ? count / 3 : 1));
    return rep;
}

// 1D fields for the constrained pair (primitive form) and its conservative
// counterpart.  `phi` is the known time multiplier; `fronts` lists jump
// locations per time so that no stencil straddles a discontinuity.
struct Chaplygin1DFields {
    std::function<double(double, double)> v;
    std::function<double(double, double)> w;  // w = sqrt(T)
    std::function<double(double)> phi;
    std::function<std::vector<double>(double)> fronts;  // may be empty
};

struct Grid1D {
    double t_lo, t_hi, x_lo, x_hi;
    int nt = 5, nx = 21;
};

inline ResidualReport residual_chaplygin(const Chaplygin1DFields& f, const ModelParams& p,
                                         const Grid1D& g, double h, bool conservative = false) {
    ResidualReport rep{conservative ? EquationSystem::ChaplyginConservative
                                    : EquationSystem::ChaplyginConstrained,
                       h,
                       {}};
    rep.equations.resize(2);
    rep.equations[0].name = conservative ? "mass" : "velocity";
    rep.equations[1].name = conservative ? "momentum" : "temperature";
    std::size_t count = 0;

    auto rho = [&](double t, double x) { return f.phi(t) / f.w(t, x); };
    auto rhov = [&](double t, double x) { return rho(t, x) * f.v(t, x); };
    auto momflux = [&](double t, double x) {
        const double r = rho(t, x);
        return r * f.v(t, x) * f.v(t, x) - f.phi(t) * f.phi(t) / r;
    };
    auto d_t = [&](auto&& fn, double t, double x) { return (fn(t + h, x) - fn(t - h, x)) / (2 * h); };
    auto d_x = [&](auto&& fn, double t, double x) { return (fn(t, x + h) - fn(t, x - h)) / (2 * h); };

    for (int it = 0; it < g.nt; ++it) {
        const double t = g.t_lo + (g.nt == 1 ? 0 : (g.t_hi - g.t_lo) * it / double(g.nt - 1));
        std::vector<double> fronts = f.fronts ? f.fronts(t) : std::vector<double>{};
        for (int ix = 0; ix < g.nx; ++ix) {
            const double x = g.x_lo + (g.nx == 1 ? 0 : (g.x_hi - g.x_lo) * ix / double(g.nx - 1));
            bool masked = false;
            for (double xf : fronts)
                if (std::abs(x - xf) < 3 * h) masked = true;
            if (masked) continue;
            if (conservative) {
                residual_detail::accumulate(rep.equations[0], d_t(rho, t, x) + d_x(rhov, t, x), count);
                residual_detail::accumulate(rep.equations[1], d_t(rhov, t, x) + d_x(momflux, t, x),
                                            count);
            } else {
                const double r1 = d_t(f.v, t, x) + f.v(t, x) * d_x(f.v, t, x) -
                                  f.w(t, x) * d_x(f.w, t, x);
                const double r2 = d_t(f.w, t, x) + f.v(t, x) * d_x(f.w, t, x) -
                                  f.w(t, x) * d_x(f.v, t, x) + 0.5 * p.lambda * f.phi(t) * f.w(t, x);
                residual_detail::accumulate(rep.equations[0], r1, count);
                residual_detail::accumulate(rep.equations[1], r2, count);
            }
        }
    }
    if (count == 0) throw std::domain_error("residual_chaplygin: every grid point was masked");
    for (auto& e : rep.equations) e.l2_norm = std::sqrt(e.l2_norm / double(count / 2));
    return rep;
}

// ---------------------------------------------------------------------------
// convergence order
// ---------------------------------------------------------------------------

struct OrderEstimate {
    std::string equation;
    double order;              // log2 ratio of successive max norms
    bool at_rounding_floor;    // residuals too small for the estimate to mean anything
};

inline std::vector<OrderEstimate> convergence_order(const std::vector<ResidualReport>& reports) {
    if (reports.size() < 2)
        throw std::invalid_argument("convergence_order: need reports at >= 2 step sizes");
    std::vector<OrderEstimate> out;
    for (std::size_t e = 0; e < reports.front().equations.size(); ++e) {
        double est = 0;
        bool have = false, floor = false;
        for (std::size_t k = 0; k + 1 < reports.size(); ++k) {
            const double r0 = reports[k].equations[e].max_norm;
            const double r1 = reports[k + 1].equations[e].max_norm;
            if (r0 < 1e-13 || r1 < 1e-13) {
                floor = true;  // below ~1e-13 the ratio measures rounding, not truncation
                continue;
            }
            const double h0 = reports[k].h, h1 = reports[k + 1].h;
            est = std::log(r0 / r1) / std::log(h0 / h1);  // finest valid pair wins
            have = true;
        }
        if (!have) est = 0;
        out.push_back({reports.front().equations[e].name, est, floor});
    }
    return out;
}

}  // namespace granular
