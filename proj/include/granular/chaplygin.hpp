// chaplygin.hpp — Riemann problem for the constrained 1D pair
//   v_t + v v_x = w w_x,            w := sqrt(T),
//   w_t + v w_x - w v_x = -(lambda/2) phi(t) w,
// with phi(t) = 1/(c + lambda t/2).  In Riemann invariants s = v - w,
// r = v + w the system reads  s_t + r s_x = (lambda phi/4)(r - s) and
// r_t + s r_x = -(lambda phi/4)(r - s): linearly degenerate, so jumps are
// contact discontinuities and ride on characteristics.
//
// Construction implemented here:
//  * regime classification with the closed-form middle-temperature root t**
//    and the numerically bracketed front-collision time t*;
//  * the two-contact construction (cooled outer states, closed-form front
//    paths, and the plateau functions v_M(t), T_M(t));
//  * the measure-valued continuation: a point mass theta(t) delta(x - x*(t))
//    in the density with the closed-form theta and front path, closed by
//    psi = theta * dx*/dt;
//  * an exact evaluator for the wedge between the contacts.  In the mass
//    coordinate m (dm = rho dx - rho v dt) and the stretched time
//    xi = integral of phi, the pair becomes the constant-coefficient linear
//    system v_xi = W_m, W_xi = v_m - (lambda/2) W, whose Riemann problem is
//    solved in closed form by modified-Bessel kernels over the light cone
//    |m| < xi.  The plateau formulas agree with this field at t = 0 and at
//    the contact traces; in the wedge interior they drift apart at a rate
//    set by the relaxation term, which the tests quantify.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "granular/chebyshev.hpp"
#include "granular/core.hpp"
#include "granular/ode.hpp"
#include "granular/quadrature.hpp"
#include "granular/rootfind.hpp"

namespace granular {

struct RiemannData {
    double vL, vR;      // side velocities
    double TL, TR;      // side temperatures, > 0
    double lambda;      // dissipation constant, > 0
    double c;           // 1/phi(0), > 0

    RiemannData(double vL_, double vR_, double TL_, double TR_, double lambda_, double c_)
        : vL(vL_), vR(vR_), TL(TL_), TR(TR_), lambda(lambda_), c(c_) {
        if (!(TL > 0) || !(TR > 0)) throw std::invalid_argument("RiemannData: need TL, TR > 0");
        if (!(lambda > 0) || !(c > 0)) throw std::invalid_argument("RiemannData: need lambda, c > 0");
    }

    double P(double t) const { return c + 0.5 * lambda * t; }
    double phi(double t) const { return 1.0 / P(t); }
    double xi(double t) const { return (2.0 / lambda) * std::log(P(t) / c); }
    double wL_t(double t) const { return c * std::sqrt(TL) / P(t); }
    double wR_t(double t) const { return c * std::sqrt(TR) / P(t); }
    double TL_t(double t) const { const double w = wL_t(t); return w * w; }
    double TR_t(double t) const { const double w = wR_t(t); return w * w; }
    double x_minus(double t) const { return vL * t - c * std::sqrt(TL) * xi(t); }
    double x_plus(double t) const { return vR * t + c * std::sqrt(TR) * xi(t); }
    // outer densities; the cooling cancels and both sides stay constant
    double rho_left() const { return 1.0 / (c * std::sqrt(TL)); }
    double rho_right() const { return 1.0 / (c * std::sqrt(TR)); }
};

struct Invariants {
    double s, r;
};

inline Invariants riemann_invariants(double v, double T) {
    if (T < 0) throw std::domain_error("riemann_invariants: T must be >= 0");
    const double w = std::sqrt(T);
    return {v - w, v + w};
}

inline std::pair<double, double> invariants_to_state(const Invariants& i) {
    const double v = 0.5 * (i.r + i.s);
    const double w = 0.5 * (i.r - i.s);
    return {v, w * w};
}

// ---------------------------------------------------------------------------
// regime classification
// ---------------------------------------------------------------------------

enum class RegimeKind { TwoContactsForever, DelayedConcentration, ImmediateConcentration };

inline const char* to_string(RegimeKind k) {
    switch (k) {
        case RegimeKind::TwoContactsForever: return "two_contacts_forever";
        case RegimeKind::DelayedConcentration: return "delayed_concentration";
        case RegimeKind::ImmediateConcentration: return "immediate_concentration";
    }
    return "?";
}

struct Regime {
    RegimeKind kind;
    double t_doublestar = std::numeric_limits<double>::quiet_NaN();  // middle temperature root
    double t_star = std::numeric_limits<double>::quiet_NaN();        // front collision root
};

// Plateau functions of the two-contact construction.
struct TwoContactSolution {
    RiemannData data;

    double T_left(double t) const { return data.TL_t(t); }
    double T_right(double t) const { return data.TR_t(t); }
    double x_minus(double t) const { return data.x_minus(t); }
    double x_plus(double t) const { return data.x_plus(t); }
    double v_mid(double t) const {
        return 0.5 * (data.vL + data.vR +
                      data.c * (std::sqrt(data.TR) - std::sqrt(data.TL)) / data.P(t));
    }
    double w_mid(double t) const {
        return 0.5 * (data.vR - data.vL +
                      data.c * (std::sqrt(data.TR) + std::sqrt(data.TL)) / data.P(t));
    }
    double T_mid(double t) const { const double w = w_mid(t); return w * w; }
};

inline TwoContactSolution two_contact_solution(const RiemannData& d) { return {d}; }

inline Regime classify(const RiemannData& d) {
    const double sL = std::sqrt(d.TL), sR = std::sqrt(d.TR);
    if (d.vL <= d.vR) return {RegimeKind::TwoContactsForever};
    if (d.vL >= d.vR + sL + sR) return {RegimeKind::ImmediateConcentration};
    Regime reg{RegimeKind::DelayedConcentration};
    // middle temperature root: P(t) = c (sL+sR) / (vL-vR)
    reg.t_doublestar = (2.0 / d.lambda) * (d.c * (sL + sR) / (d.vL - d.vR) - d.c);
    // front collision: x_+ - x_- grows until t** and then decays through zero
    auto gap = [&d](double t) { return d.x_plus(t) - d.x_minus(t); };
    reg.t_star = find_root_expanding(gap, reg.t_doublestar, 2 * reg.t_doublestar + 1.0, 1e-12);
    return reg;
}

// ---------------------------------------------------------------------------
// delta front
// ---------------------------------------------------------------------------

// Point mass theta(t) delta(x - x*(t)) continuation born at (t0, x0).  The
// outer states keep cooling; their densities (and hence every jump bracket)
// are time independent, and the weak form of the conservative system with the
// closure psi = theta * dx*/dt integrates to the closed-form theta below.
class DeltaFront {
  public:
    DeltaFront(const RiemannData& d, double t0, double x0) : d_(d), t0_(t0), x0_(x0) {
        rho_m_ = d.rho_left();
        rho_p_ = d.rho_right();
        D_ = rho_p_ - rho_m_;
        N_ = rho_p_ * d.vR - rho_m_ * d.vL;
        K_ = rho_p_ * d.vR * d.vR - rho_m_ * d.vL * d.vL;
        J_ = 1.0 / rho_p_ - 1.0 / rho_m_;
        phi0_ = d.phi(t0);
        const double jv = d.vR - d.vL;
        const double jw = d.wR_t(t0) - d.wL_t(t0);
        coef2_ = rho_p_ * rho_m_ * (jv * jv - jw * jw);
        if (coef2_ < -1e-12 * rho_p_ * rho_m_ * (jv * jv + jw * jw + 1))
            throw std::domain_error("DeltaFront: concentration condition fails at t0");
    }

    double t0() const { return t0_; }
    double x0() const { return x0_; }
    // leading coefficient of theta^2 ~ coef * (t-t0)^2 near birth
    double birth_coefficient() const { return coef2_; }

    double theta_squared(double t) const {
        const double t1 = time_from_birth(t);
        const double G = phi0_ * t1 -
                         (2.0 / d_.lambda) * std::log1p(0.5 * d_.lambda * phi0_ * t1);
        const double v = (N_ * N_ - D_ * K_) * t1 * t1 + (4.0 / d_.lambda) * D_ * J_ * G;
        return std::max(v, 0.0);
    }

    double theta(double t) const { return std::sqrt(theta_squared(t)); }

    double theta_rate(double t) const {
        const double t1 = time_from_birth(t);
        if (t1 == 0) return std::sqrt(std::max(coef2_, 0.0));
        const double Gp = phi0_ - d_.phi(t0_ + t1);  // d/dt1 of the log bracket
        const double num = 2.0 * (N_ * N_ - D_ * K_) * t1 + (4.0 / d_.lambda) * D_ * J_ * Gp;
        return 0.5 * num / theta(t);
    }

    bool degenerate_density_jump() const { return std::abs(D_) <= 1e-12 * (rho_p_ + rho_m_); }

    double position(double t) const {
        const double t1 = time_from_birth(t);
        if (degenerate_density_jump())  // exact limit of the generic formula
            return x0_ + 0.5 * (d_.vL + d_.vR) * t1;
        return x0_ + (N_ * t1 + theta(t)) / D_;
    }

    double speed(double t) const {
        if (degenerate_density_jump()) return 0.5 * (d_.vL + d_.vR);
        return (N_ + theta_rate(t)) / D_;
    }

    double speed_longtime() const {
        const double sp = std::sqrt(rho_p_), sm = std::sqrt(rho_m_);
        return (sp * d_.vR + sm * d_.vL) / (sp + sm);
    }

    double psi(double t) const { return theta(t) * speed(t); }

  private:
    double time_from_birth(double t) const {
        if (t < t0_ - 1e-14) throw std::domain_error("DeltaFront: queried before birth");
        return std::max(t - t0_, 0.0);
    }

    RiemannData d_;
    double t0_, x0_;
    double rho_m_, rho_p_, D_, N_, K_, J_, phi0_, coef2_;
};

inline double delta_theta(const RiemannData& d, double t0, double t) {
    return DeltaFront(d, t0, 0.0).theta(t);
}

inline double delta_position(const RiemannData& d, double t0, double x0, double t) {
    return DeltaFront(d, t0, x0).position(t);
}

// Smallest t0 >= 0 at which the birth condition [v]^2 >= [w(t0)]^2 holds.
// The side temperatures cool at the same relative rate, so once satisfied it
// stays satisfied; the closed form below is the crossing of the two decays.
inline double concentration_onset_time(const RiemannData& d) {
    const double jv = std::abs(d.vR - d.vL);
    const double jw0 = std::abs(std::sqrt(d.TR) - std::sqrt(d.TL));
    if (jv == 0) throw std::domain_error("concentration_onset_time: equal velocities never focus");
    if (jv >= jw0) return 0.0;
    return (2.0 / d.lambda) * (d.c * jw0 / jv - d.c);
}

// ---------------------------------------------------------------------------
// exact wedge field (mass-coordinate Bessel representation)
// ---------------------------------------------------------------------------

namespace chap_detail {

inline double bessel_i0(double z) { return std::cyl_bessel_i(0.0, z); }
// I1(z)/z, smooth through z = 0
inline double bessel_i1_over(double z) {
    if (z < 1e-6) return 0.5 + z * z / 16.0;
    return std::cyl_bessel_i(1.0, z) / z;
}

}  // namespace chap_detail

class WedgeField {
  public:
    explicit WedgeField(const RiemannData& d) : d_(d) {}

    struct Slice {
        double t = 0, xi = 0, phi = 0, xm = 0, xp = 0;
        Chebyshev v, w;     // fields over m in [-xi, xi]
        Chebyshev x_of_m;   // Euler position map
        double map_defect = 0;  // |x(-xi) - x_minus(t)|, a build diagnostic
    };

    const Slice& slice(double t) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(t);
        if (it != cache_.end()) return *it->second;
        auto s = std::make_shared<Slice>(build_slice(t));
        return *cache_.emplace(t, std::move(s)).first->second;
    }

    // (v, w) at a point strictly between the contacts
    std::pair<double, double> eval(double t, double x) const {
        const Slice& s = slice(t);
        const double m = invert_map(s, x);
        return {s.v(m), s.w(m)};
    }

    std::pair<double, double> eval_mass(double t, double m) const {
        const Slice& s = slice(t);
        return {s.v(m), s.w(m)};
    }

    double mass_coordinate(double t, double x) const { return invert_map(slice(t), x); }

  private:
    Slice build_slice(double t) const {
        Slice s;
        s.t = t;
        s.xi = d_.xi(t);
        s.phi = d_.phi(t);
        s.xm = d_.x_minus(t);
        s.xp = d_.x_plus(t);
        const double xi = s.xi;
        if (xi <= 0) throw std::domain_error("WedgeField: wedge has zero width at t = 0");
        const double a = 0.25 * d_.lambda;
        const double E = std::exp(-a * xi);
        const double wl0 = std::sqrt(d_.TL), wr0 = std::sqrt(d_.TR);
        const double jw = wr0 - wl0, jv = d_.vR - d_.vL;

        auto field_at = [&](double m, bool want_v) {
            // half sums of the transported initial data; endpoint nodes take
            // the interior-limit branch so the interpolant matches the trace
            const double fm = want_v ? (m - xi <= 0 ? d_.vL : d_.vR) : (m - xi <= 0 ? wl0 : wr0);
            const double fp = want_v ? (m + xi < 0 ? d_.vL : d_.vR) : (m + xi < 0 ? wl0 : wr0);
            double val = 0.5 * (fm + fp);
            // initial-jump kernel on the cone (sigma = 0 on its mantle)
            const double s0sq = std::max(xi * xi - m * m, 0.0);
            val += 0.5 * (want_v ? jw : jv) * chap_detail::bessel_i0(a * std::sqrt(s0sq));
            // smooth part of the cone integral, split at the data jump y = 0
            const double ksign = want_v ? 1.0 : -1.0;
            auto kern = [&](double y) {
                const double q = xi * xi - (m - y) * (m - y);
                const double sig = std::sqrt(std::max(q, 0.0));
                const double base = want_v ? (y < 0 ? d_.vL : d_.vR) : (y < 0 ? wl0 : wr0);
                return base * (ksign * a * chap_detail::bessel_i0(a * sig) +
                               a * a * xi * chap_detail::bessel_i1_over(a * sig));
            };
            const double lo = m - xi, hi = m + xi;
            double I = 0;
            if (lo < 0) I += integrate_gl(kern, lo, std::min(0.0, hi), 32);
            if (hi > 0) I += integrate_gl(kern, std::max(0.0, lo), hi, 32);
            val += 0.5 * I;
            return E * val;
        };

        const int deg = 64;
        s.v = Chebyshev([&](double m) { return field_at(m, true); }, -xi, xi, deg);
        s.w = Chebyshev([&](double m) { return field_at(m, false); }, -xi, xi, deg);

        // x(m) = x_+ - (1/phi) * int_m^xi w dm'
        Chebyshev W_int = s.w.antiderivative();  // zero at -xi
        const double total = W_int(xi);
        const double phi = s.phi;
        const double xp = s.xp;
        Chebyshev shifted = W_int;
        s.x_of_m = Chebyshev([&](double m) { return xp - (total - shifted(m)) / phi; }, -xi, xi, deg);
        s.map_defect = std::abs(s.x_of_m(-xi) - s.xm);
        return s;
    }

    double invert_map(const Slice& s, double x) const {
        if (!(x > s.xm && x < s.xp)) throw std::domain_error("WedgeField: x outside the wedge");
        double lo = -s.xi, hi = s.xi;
        double m = (x - s.xm) / (s.xp - s.xm) * 2 * s.xi - s.xi;
        for (int it = 0; it < 100; ++it) {
            const double fx = s.x_of_m(m) - x;
            if (fx > 0) hi = m; else lo = m;
            const double tau = s.w(m) / s.phi;  // dx/dm
            double step = tau > 0 ? fx / tau : 0;
            double next = m - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - m) < 1e-14 * (1 + std::abs(m))) return next;
            m = next;
        }
        return m;
    }

    RiemannData d_;
    mutable std::mutex mu_;
    mutable std::map<double, std::shared_ptr<Slice>> cache_;
};

// ---------------------------------------------------------------------------
// assembled solution
// ---------------------------------------------------------------------------

struct PointMass {
    double x;
    double mass;
};

struct SolutionSample {
    double v;
    double T;
    double rho_regular;
};

class PiecewiseSolution {
  public:
    explicit PiecewiseSolution(const RiemannData& d)
        : data_(d), regime_(classify(d)), two_contact_(two_contact_solution(d)) {
        switch (regime_.kind) {
            case RegimeKind::TwoContactsForever:
                wedge_.emplace(d);
                break;
            case RegimeKind::ImmediateConcentration:
                delta_.emplace(d, 0.0, 0.0);
                break;
            case RegimeKind::DelayedConcentration: {
                wedge_.emplace(d);
                const double ts = regime_.t_doublestar;
                const double x0 = 0.5 * (d.x_minus(ts) + d.x_plus(ts));
                delta_.emplace(d, ts, x0);
                break;
            }
        }
    }

    const RiemannData& data() const { return data_; }
    const Regime& regime() const { return regime_; }
    const TwoContactSolution& two_contact() const { return two_contact_; }
    const DeltaFront& delta() const {
        if (!delta_) throw std::domain_error("PiecewiseSolution: no delta front in this regime");
        return *delta_;
    }
    const WedgeField& wedge() const {
        if (!wedge_) throw std::domain_error("PiecewiseSolution: no smooth wedge in this regime");
        return *wedge_;
    }

    bool has_delta_at(double t) const {
        return delta_ && t >= delta_->t0();
    }

    // The continuation window of the delayed regime: the construction assumes
    // the middle segment has already shrunk to a point at t**, while the
    // two-contact fronts only collide at t*.  Samples there carry this flag.
    bool transitional(double t) const {
        return regime_.kind == RegimeKind::DelayedConcentration && t >= regime_.t_doublestar &&
               t <= regime_.t_star;
    }

    std::vector<double> fronts(double t) const {
        if (has_delta_at(t)) return {delta_->position(t)};
        if (t == 0) return {0.0};
        return {data_.x_minus(t), data_.x_plus(t)};
    }

    SolutionSample eval(double t, double x) const {
        if (has_delta_at(t)) {
            const double xs = delta_->position(t);
            if (x <= xs)
                return {data_.vL, data_.TL_t(t), data_.rho_left()};
            return {data_.vR, data_.TR_t(t), data_.rho_right()};
        }
        const SolutionSample left{data_.vL, data_.TL_t(t), data_.rho_left()};
        const SolutionSample right{data_.vR, data_.TR_t(t), data_.rho_right()};
        if (t <= 0) return x <= 0 ? left : right;
        if (x <= data_.x_minus(t)) return left;
        if (x >= data_.x_plus(t)) return right;
        const auto [v, w] = wedge_->eval(t, x);
        if (!(w > 0)) throw std::domain_error("PiecewiseSolution: temperature vanished in wedge");
        return {v, w * w, data_.phi(t) / w};
    }

    std::vector<PointMass> point_masses(double t) const {
        if (!has_delta_at(t)) return {};
        return {{delta_->position(t), delta_->theta(t)}};
    }

  private:
    RiemannData data_;
    Regime regime_;
    TwoContactSolution two_contact_;
    std::optional<WedgeField> wedge_;
    std::optional<DeltaFront> delta_;
};

inline PiecewiseSolution solve(const RiemannData& d) { return PiecewiseSolution(d); }

// ---------------------------------------------------------------------------
// oracles
// ---------------------------------------------------------------------------

// Mass in [-X, X] (regular part plus point masses) minus its initial value
// and the net boundary influx; zero for a conserving solution.
inline double control_volume_mass_drift(const PiecewiseSolution& sol, double X, double t) {
    const RiemannData& d = sol.data();
    const double rhoL = d.rho_left(), rhoR = d.rho_right();
    double mass;
    if (sol.has_delta_at(t)) {
        const double xs = sol.delta().position(t);
        if (std::abs(xs) >= X) throw std::invalid_argument("control volume lost the front");
        mass = rhoL * (xs + X) + rhoR * (X - xs) + sol.delta().theta(t);
    } else if (t == 0) {
        mass = (rhoL + rhoR) * X;
    } else {
        const double xm = d.x_minus(t), xp = d.x_plus(t);
        if (xm <= -X || xp >= X) throw std::invalid_argument("control volume lost the fronts");
        mass = rhoL * (xm + X) + rhoR * (X - xp);
        mass += integrate_gl([&](double x) { return sol.eval(t, x).rho_regular; }, xm, xp, 64);
    }
    const double mass0 = (rhoL + rhoR) * X;
    const double influx = (rhoL * d.vL - rhoR * d.vR) * t;
    return mass - mass0 - influx;
}

// Front paths by characteristic integration (independent of the closed form).
inline double integrate_front_path(const RiemannData& d, bool left, double t) {
    auto rhs = [&](double tt, const std::vector<double>&, std::vector<double>& dy) {
        dy[0] = left ? d.vL - d.wL_t(tt) : d.vR + d.wR_t(tt);
    };
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    if (t == 0) return 0;
    return integrate_ode(rhs, 0.0, {0.0}, t, opt).last_state()[0];
}

// Verifies an interior point of the wedge by the method of characteristics:
// trace the carrier characteristic back to its contact of origin, pick up the
// boundary invariant there, integrate the source forward along the path, and
// compare with the field value.  `family_s` selects the s-carrier (speed r).
inline double characteristic_invariant_at(const PiecewiseSolution& sol, double t_query,
                                          double x_query, bool family_s) {
    const RiemannData& d = sol.data();
    const WedgeField& field = sol.wedge();

    // evaluate the wedge field with the query point clamped strictly inside;
    // intermediate integrator stages may poke past a contact
    auto eval_in = [&](double t, double x) {
        const double xm = d.x_minus(t), xp = d.x_plus(t);
        const double eps = 1e-12 * (xp - xm);
        return field.eval(t, std::min(std::max(x, xm + eps), xp - eps));
    };
    auto speed = [&](double t, double x) {
        const auto [v, w] = eval_in(t, x);
        return family_s ? v + w : v - w;  // s rides on r-speed, r on s-speed
    };
    // backward: find the crossing time with the feeding contact
    auto boundary_gap = [&](double t, double x) {
        return family_s ? x - d.x_minus(t) : d.x_plus(t) - x;
    };
    double t = t_query, x = x_query;
    double h = std::max(t_query / 200.0, 1e-7);
    const double t_floor = 1e-10;
    // backward RK4 with step shrinking at the boundary; stops once within
    // O(1e-9) of the feeding contact
    while (t > t_floor && h > 1e-9 * std::max(t_query, 1.0)) {
        const double hs = std::min(h, t - t_floor > 0 ? t - t_floor : h);
        const double k1 = speed(t, x);
        const double k2 = speed(t - 0.5 * hs, x - 0.5 * hs * k1);
        const double k3 = speed(t - 0.5 * hs, x - 0.5 * hs * k2);
        const double k4 = speed(t - hs, x - hs * k3);
        const double xn = x - hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        const double tn = t - hs;
        if (tn <= t_floor || boundary_gap(tn, xn) <= 1e-13) {
            h *= 0.1;  // resolve the crossing by shrinking the step
            continue;
        }
        t = tn;
        x = xn;
    }
    const double t_cross = std::max(t, t_floor);
    const double x_cross = family_s ? d.x_minus(t_cross) : d.x_plus(t_cross);
    const double inv0 = family_s ? d.vL - d.wL_t(t_cross) : d.vR + d.wR_t(t_cross);

    // forward: advect the invariant with its relaxation source through the field
    auto rhs = [&](double tt, const std::vector<double>& y, std::vector<double>& dy) {
        const auto [v, w] = eval_in(tt, y[0]);
        const double r = v + w, s = v - w;
        if (family_s) {
            dy[0] = r;
            dy[1] = 0.25 * d.lambda * d.phi(tt) * (r - y[1]);
        } else {
            dy[0] = s;
            dy[1] = -0.25 * d.lambda * d.phi(tt) * (y[1] - s);
        }
    };
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const OdeTrajectory tr = integrate_ode(rhs, t_cross, {x_cross, inv0}, t_query, opt);
    return tr.last_state()[1];
}

// Method-of-characteristics evolution of smooth invariant fields; the
// verification tool for smooth regions.  Two clouds of markers carry s and r;
// each cloud advects at the piecewise-linear interpolation of the other's
// invariant.  Throws if characteristics of either family cross.
struct InvariantFan {
    std::vector<double> x_s, s;  // s-carrying markers
    std::vector<double> x_r, r;  // r-carrying markers
};

inline InvariantFan evolve_invariant_fan(const RiemannData& d,
                                         const std::function<double(double)>& s0,
                                         const std::function<double(double)>& r0, double x_lo,
                                         double x_hi, int n_markers, double t_final,
                                         int n_steps = 2000) {
    InvariantFan f;
    for (int i = 0; i < n_markers; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / double(n_markers - 1);
        f.x_s.push_back(x);
        f.s.push_back(s0(x));
        f.x_r.push_back(x);
        f.r.push_back(r0(x));
    }
    auto interp = [](const std::vector<double>& xs, const std::vector<double>& ys, double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t k = std::size_t(it - xs.begin()) - 1;
        const double u = (x - xs[k]) / (xs[k + 1] - xs[k]);
        return ys[k] * (1 - u) + ys[k + 1] * u;
    };
    const double dt = t_final / n_steps;
    double t = 0;
    auto rates = [&](const InvariantFan& g, double tt, std::vector<double>& dxs,
                     std::vector<double>& dss, std::vector<double>& dxr, std::vector<double>& drr) {
        const double phi = d.phi(tt);
        for (std::size_t i = 0; i < g.x_s.size(); ++i) {
            const double rr = interp(g.x_r, g.r, g.x_s[i]);
            dxs[i] = rr;  // s rides at speed r
            dss[i] = 0.25 * d.lambda * phi * (rr - g.s[i]);
        }
        for (std::size_t i = 0; i < g.x_r.size(); ++i) {
            const double ss = interp(g.x_s, g.s, g.x_r[i]);
            dxr[i] = ss;  // r rides at speed s
            drr[i] = 0.25 * d.lambda * phi * (ss - g.r[i]);
        }
    };
    const std::size_t n = f.x_s.size();
    std::vector<double> k1xs(n), k1s(n), k1xr(n), k1r(n), k2xs(n), k2s(n), k2xr(n), k2r(n);
    for (int step = 0; step < n_steps; ++step) {
        rates(f, t, k1xs, k1s, k1xr, k1r);
        InvariantFan mid = f;
        for (std::size_t i = 0; i < n; ++i) {
            mid.x_s[i] += dt * k1xs[i];
            mid.s[i] += dt * k1s[i];
            mid.x_r[i] += dt * k1xr[i];
            mid.r[i] += dt * k1r[i];
        }
        rates(mid, t + dt, k2xs, k2s, k2xr, k2r);
        for (std::size_t i = 0; i < n; ++i) {  // Heun average
            f.x_s[i] += 0.5 * dt * (k1xs[i] + k2xs[i]);
            f.s[i] += 0.5 * dt * (k1s[i] + k2s[i]);
            f.x_r[i] += 0.5 * dt * (k1xr[i] + k2xr[i]);
            f.r[i] += 0.5 * dt * (k1r[i] + k2r[i]);
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (f.x_s[i] >= f.x_s[i + 1] || f.x_r[i] >= f.x_r[i + 1])
                throw std::runtime_error("evolve_invariant_fan: characteristics crossed");
        t += dt;
    }
    return f;
}

}  // namespace granular
