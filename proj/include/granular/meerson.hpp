// meerson.hpp — exact 1D family in Lagrangian mass coordinates with a
// time-independent cosine pressure profile:
//   p(m)      = 2 A cos(mu m),            mu = lambda / (gamma sqrt(2)),
//   rho(m,t)  = rho0(m) / (1 - mu t sqrt(A rho0(m) cos(mu m)))^2,
//   v_t = -p_m,   (1/rho)_t = v_m,   p_t = -gamma p rho v_m - lambda p^{3/2} rho^{1/2}.
// The family solves the system for any smooth positive rho0 on the mass
// interval where cos(mu m) > 0; the density blows up first where
// rho0(m) cos(mu m) is maximal, at rate (t* - t)^{-2}.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "granular/chebyshev.hpp"
#include "granular/quadrature.hpp"
#include "granular/rootfind.hpp"

namespace granular {

struct MeersonParams {
    double amplitude;                            // pressure amplitude A > 0
    double mu;                                   // lambda / (gamma sqrt(2)) > 0
    double gamma;                                // adiabatic index (for residual checks)
    std::function<double(double)> rho0;          // initial density profile, > 0

    static MeersonParams from_mu(double A, double mu, double gamma = 2.0,
                                 std::function<double(double)> profile = nullptr) {
        if (!(A > 0) || !(mu > 0)) throw std::invalid_argument("MeersonParams: need A, mu > 0");
        MeersonParams p;
        p.amplitude = A;
        p.mu = mu;
        p.gamma = gamma;
        p.rho0 = profile ? std::move(profile) : [](double) { return 1.0; };
        return p;
    }

    static MeersonParams from_model(double lambda, double gamma, double A,
                                    std::function<double(double)> profile = nullptr) {
        if (!(lambda > 0) || !(gamma > 0))
            throw std::invalid_argument("MeersonParams: need lambda, gamma > 0");
        return from_mu(A, lambda / (gamma * std::sqrt(2.0)), gamma, std::move(profile));
    }

    double lambda() const { return mu * gamma * std::sqrt(2.0); }
    double mass_lo() const { return -0.5 * M_PI / mu; }
    double mass_hi() const { return 0.5 * M_PI / mu; }

    void require_in_domain(double m) const {
        if (!(m > mass_lo() && m < mass_hi()))
            throw std::domain_error("MeersonParams: m outside the open mass domain");
    }

  private:
    MeersonParams() = default;
};

// Initial density profile from a sampled table, interpolated by a
// monotonicity-preserving cubic (Fritsch–Carlson slopes) and clamped to the
// end values outside the sampled range.
inline std::function<double(double)> profile_from_table(std::vector<double> ms,
                                                        std::vector<double> ys) {
    const std::size_t n = ms.size();
    if (n < 2 || ys.size() != n)
        throw std::invalid_argument("profile_from_table: need >= 2 matched samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(ms[i + 1] > ms[i]))
            throw std::invalid_argument("profile_from_table: abscissae must increase");
    for (double y : ys)
        if (!(y > 0)) throw std::invalid_argument("profile_from_table: values must be positive");
    std::vector<double> d(n, 0.0), sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) sec[i] = (ys[i + 1] - ys[i]) / (ms[i + 1] - ms[i]);
    d[0] = sec[0];
    d[n - 1] = sec[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (sec[i - 1] * sec[i] > 0) ? 2 * sec[i - 1] * sec[i] / (sec[i - 1] + sec[i]) : 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {  // limiter keeps the segments monotone
        if (sec[i] == 0) {
            d[i] = d[i + 1] = 0;
            continue;
        }
        const double a = d[i] / sec[i], b = d[i + 1] / sec[i];
        const double q = a * a + b * b;
        if (q > 9) {
            const double s = 3.0 / std::sqrt(q);
            d[i] = s * a * sec[i];
            d[i + 1] = s * b * sec[i];
        }
    }
    return [ms = std::move(ms), ys = std::move(ys), d = std::move(d)](double m) {
        if (m <= ms.front()) return ys.front();
        if (m >= ms.back()) return ys.back();
        const auto it = std::upper_bound(ms.begin(), ms.end(), m);
        const std::size_t k = std::size_t(it - ms.begin()) - 1;
        const double h = ms[k + 1] - ms[k], s = (m - ms[k]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        return h00 * ys[k] + h10 * h * d[k] + h01 * ys[k + 1] + h11 * h * d[k + 1];
    };
}

inline double meerson_pressure(const MeersonParams& p, double m) {
    p.require_in_domain(m);
    return 2.0 * p.amplitude * std::cos(p.mu * m);
}

// zero of the density denominator: t*(m) = 1 / (mu sqrt(A rho0 cos(mu m)))
inline double blowup_time(const MeersonParams& p, double m) {
    p.require_in_domain(m);
    return 1.0 / (p.mu * std::sqrt(p.amplitude * p.rho0(m) * std::cos(p.mu * m)));
}

// infimum of t*(m): dense sampling refined by golden-section on rho0 cos
struct GlobalBlowup {
    double t_star;
    double m_star;
};

inline GlobalBlowup global_blowup(const MeersonParams& p, int samples = 2001) {
    const double lo = p.mass_lo(), hi = p.mass_hi();
    auto score = [&](double m) { return p.rho0(m) * std::cos(p.mu * m); };  // maximize
    double best_m = 0, best = -1;
    for (int i = 1; i < samples - 1; ++i) {
        const double m = lo + (hi - lo) * i / double(samples - 1);
        const double s = score(m);
        if (s > best) {
            best = s;
            best_m = m;
        }
    }
    double a = std::max(lo * (1 - 1e-12), best_m - (hi - lo) / samples);
    double b = std::min(hi * (1 - 1e-12), best_m + (hi - lo) / samples);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        if (score(x1) < score(x2)) {
            a = x1;
            x1 = x2;
            x2 = a + gr * (b - a);
        } else {
            b = x2;
            x2 = x1;
            x1 = b - gr * (b - a);
        }
    }
    const double m_star = 0.5 * (a + b);
    return {blowup_time(p, m_star), m_star};
}

inline double density_lagrangian(const MeersonParams& p, double m, double t) {
    p.require_in_domain(m);
    const double S = std::sqrt(p.amplitude * p.rho0(m) * std::cos(p.mu * m));
    const double den = 1.0 - p.mu * t * S;
    if (!(den > 0)) throw std::domain_error("density_lagrangian: blow-up reached");
    return p.rho0(m) / (den * den);
}

inline double specific_volume(const MeersonParams& p, double m, double t) {
    return 1.0 / density_lagrangian(p, m, t);
}

inline double temperature_lagrangian(const MeersonParams& p, double m, double t) {
    return meerson_pressure(p, m) * specific_volume(p, m, t);  // T = p / rho
}

inline double dtau_dt(const MeersonParams& p, double m, double t) {
    const double S = std::sqrt(p.amplitude * p.rho0(m) * std::cos(p.mu * m));
    return -2.0 * p.mu * S * (1.0 - p.mu * t * S) / p.rho0(m);
}

// v(m, t) = v0(m) + 2 A mu sin(mu m) t with the gauge v(0, t) = 0, so
// v0(m) integrates the t = 0 stretching rate from the center.
inline double velocity_field(const MeersonParams& p, double m, double t) {
    p.require_in_domain(m);
    const double v0 = integrate_adaptive([&](double q) { return dtau_dt(p, q, 0.0); }, 0.0, m, 1e-12);
    return v0 + 2.0 * p.amplitude * p.mu * std::sin(p.mu * m) * t;
}

// independent construction of v by integrating the mass equation at time t
inline double velocity_from_mass_equation(const MeersonParams& p, double m, double t) {
    p.require_in_domain(m);
    return integrate_adaptive([&](double q) { return dtau_dt(p, q, t); }, 0.0, m, 1e-12);
}

// ---------------------------------------------------------------------------
// Euler <-> Lagrange maps
// ---------------------------------------------------------------------------

struct EulerLagrangeMaps {
    // x(m) with x(0) = 0, and its inverse m(x), at a fixed time
    std::function<double(double)> x_of_m;
    std::function<double(double)> m_of_x;
    double x_lo, x_hi;  // images of the mass-domain edges
};

inline EulerLagrangeMaps euler_lagrange_maps(const MeersonParams& p, double t,
                                             double edge_margin = 1e-9) {
    const GlobalBlowup gb = global_blowup(p);
    if (!(t < gb.t_star)) throw std::domain_error("euler_lagrange_maps: t beyond global blow-up");
    const double lo = p.mass_lo() + edge_margin, hi = p.mass_hi() - edge_margin;
    // the specific volume has square-root behavior at the domain edges, so
    // the map is built by adaptive quadrature rather than a global expansion
    auto x_of_m = [p, t, lo, hi](double m) {
        if (!(m >= lo && m <= hi)) throw std::domain_error("x_of_m: m outside the working domain");
        return integrate_adaptive([&](double q) { return specific_volume(p, q, t); }, 0.0, m,
                                  1e-13);
    };
    const double x_lo = x_of_m(lo), x_hi = x_of_m(hi);
    auto m_of_x = [p, t, x_of_m, lo, hi, x_lo, x_hi](double x) {
        if (!(x >= x_lo && x <= x_hi)) throw std::domain_error("m_of_x: x outside the image");
        // Newton with the exact derivative dx/dm = tau, bisection fallback
        double a = lo, b = hi;
        double m = lo + (hi - lo) * (x - x_lo) / (x_hi - x_lo);
        for (int it = 0; it < 80; ++it) {
            const double fx = x_of_m(m) - x;
            if (fx > 0) b = m; else a = m;
            const double tau = specific_volume(p, m, t);
            double next = m - fx / tau;
            if (!(next > a && next < b)) next = 0.5 * (a + b);
            if (std::abs(next - m) < 1e-13 * (1 + std::abs(m))) return next;
            m = next;
        }
        return m;
    };
    return {x_of_m, m_of_x, x_lo, x_hi};
}

// ---------------------------------------------------------------------------
// residuals
// ---------------------------------------------------------------------------

struct LagrangianResidualReport {
    double h;
    double mass_max = 0;      // d_t tau - d_m v
    double momentum_max = 0;  // d_t v + d_m p
    double energy_max = 0;    // d_t p + gamma p rho d_m v + lambda p^{3/2} rho^{1/2}
};

// Central-difference residuals of the three Lagrangian equations on a grid
// strictly inside the domain and before blow-up.  `lambda_override` lets a
// test evaluate the equations with a dissipation constant that differs from
// the one the fields were built for (negative control for a mistuned mu);
// by default the parameter set's own lambda = mu gamma sqrt(2) is used.
inline LagrangianResidualReport lagrangian_residual(const MeersonParams& p, double m_lo,
                                                    double m_hi, double t_lo, double t_hi, int nm,
                                                    int nt, double h, double lambda_override = -1) {
    LagrangianResidualReport rep{h, 0, 0, 0};
    const double lambda = lambda_override > 0 ? lambda_override : p.lambda();
    auto tau = [&](double t, double m) { return specific_volume(p, m, t); };
    auto vel = [&](double t, double m) { return velocity_field(p, m, t); };
    auto pres = [&](double, double m) { return meerson_pressure(p, m); };
    for (int i = 0; i < nt; ++i) {
        const double t = t_lo + (nt == 1 ? 0 : (t_hi - t_lo) * i / double(nt - 1));
        for (int j = 0; j < nm; ++j) {
            const double m = m_lo + (nm == 1 ? 0 : (m_hi - m_lo) * j / double(nm - 1));
            const double dt_tau = (tau(t + h, m) - tau(t - h, m)) / (2 * h);
            const double dm_v = (vel(t, m + h) - vel(t, m - h)) / (2 * h);
            const double dt_v = (vel(t + h, m) - vel(t - h, m)) / (2 * h);
            const double dm_p = (pres(t, m + h) - pres(t, m - h)) / (2 * h);
            const double dt_p = (pres(t + h, m) - pres(t - h, m)) / (2 * h);
            const double rho = density_lagrangian(p, m, t);
            const double pr = pres(t, m);
            rep.mass_max = std::max(rep.mass_max, std::abs(dt_tau - dm_v));
            rep.momentum_max = std::max(rep.momentum_max, std::abs(dt_v + dm_p));
            rep.energy_max = std::max(
                rep.energy_max,
                std::abs(dt_p + p.gamma * pr * rho * dm_v + lambda * std::pow(pr, 1.5) * std::sqrt(rho)));
        }
    }
    return rep;
}

// Exact-derivative substitution check (no differencing): returns the worst
// residual of the three equations over a sample grid using closed-form
// t-derivatives and the mass-equation identity d_m v = d_t tau.
inline double lagrangian_residual_analytic(const MeersonParams& p, double m_lo, double m_hi,
                                           double t_lo, double t_hi, int nm, int nt,
                                           double lambda_override = -1) {
    double worst = 0;
    const double lambda = lambda_override > 0 ? lambda_override : p.lambda();
    for (int i = 0; i < nt; ++i) {
        const double t = t_lo + (nt == 1 ? 0 : (t_hi - t_lo) * i / double(nt - 1));
        for (int j = 0; j < nm; ++j) {
            const double m = m_lo + (nm == 1 ? 0 : (m_hi - m_lo) * j / double(nm - 1));
            const double rho = density_lagrangian(p, m, t);
            const double pr = meerson_pressure(p, m);
            const double dm_v = dtau_dt(p, m, t);  // mass equation closes this way
            const double dt_v = 2.0 * p.amplitude * p.mu * std::sin(p.mu * m);
            const double dm_p = -2.0 * p.amplitude * p.mu * std::sin(p.mu * m);
            // momentum: dt_v + dm_p = 0 identically
            worst = std::max(worst, std::abs(dt_v + dm_p));
            // energy: p_t = 0, so the two source terms must cancel
            worst = std::max(worst, std::abs(p.gamma * pr * rho * dm_v +
                                             lambda * std::pow(pr, 1.5) * std::sqrt(rho)));
        }
    }
    return worst;
}

// Eulerian total mass over the support; equals the mass-domain length for
// every t below blow-up (change of variables), checked here by quadrature in x.
inline double eulerian_total_mass(const MeersonParams& p, double t, double edge_margin = 1e-6) {
    const EulerLagrangeMaps maps = euler_lagrange_maps(p, t, edge_margin);
    return integrate_adaptive(
        [&](double x) { return density_lagrangian(p, maps.m_of_x(x), t); }, maps.x_lo, maps.x_hi,
        1e-10);
}

}  // namespace granular
