// uniform_deformation.hpp — flows with affine velocity v = alpha(t) x + beta(t)
// and quadratic temperature T = x^T A x + (B,x) + C.  Substituting this ansatz
// into the gas equations closes them into an ODE system for
// (alpha, beta, A, B, C, phi); density follows as rho = phi / sqrt(T).
//
// The coefficient ODEs used here are the ones forced by direct substitution:
//   alpha' = -alpha^2 - A
//   beta'  = -alpha beta - B/2
//   A'     = -(A alpha + alpha^T A) - (gamma-1) tr(alpha) A - lambda phi A
//   B'     = -2 A beta - alpha^T B - (gamma-1) tr(alpha) B - lambda phi B
//   C'     = -(B,beta) - (gamma-1) tr(alpha) C - lambda phi C
//   phi'   = -((gamma+1)/2) phi tr(alpha) - (lambda/2) phi^2
// An alternative beta equation with a doubled advection term (beta' =
// -2 alpha beta - B/2) circulates in print; it fails the field-equation
// residual check whenever beta, B != 0 and is kept only behind BetaForm so a
// test can demonstrate the difference.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "granular/core.hpp"
#include "granular/linalg.hpp"
#include "granular/ode.hpp"

namespace granular {

struct UDState {
    double t = 0;
    Mat alpha;  // velocity gradient
    Vec beta;   // velocity offset
    Mat A;      // quadratic temperature coefficient (symmetric)
    Vec B;      // linear temperature coefficient
    double C = 0;
    double phi = 0;

    int dim() const { return alpha.n; }
};

struct IsotropicState {
    double t = 0;
    double phi = 0;
    double alpha1 = 0;
    double a = 0;
    double C = 0;
};

enum class BetaForm { Derived, DoubledAdvection };

// ---------------------------------------------------------------------------
// right-hand sides
// ---------------------------------------------------------------------------

struct UDDerivative {
    Mat alpha;
    Vec beta;
    Mat A;
    Vec B;
    double C;
    double phi;
};

inline UDDerivative rhs_full(const ModelParams& p, const UDState& s,
                             BetaForm bf = BetaForm::Derived) {
    if (!(s.phi > 0)) throw std::domain_error("rhs_full: phi must be positive");
    const int n = s.dim();
    const double tra = trace(s.alpha);
    const double g1 = p.gamma - 1.0;
    UDDerivative d;
    d.alpha = -1.0 * (matmul(s.alpha, s.alpha) + s.A);
    const double beta_adv = (bf == BetaForm::Derived) ? 1.0 : 2.0;
    d.beta = -1.0 * (beta_adv * matvec(s.alpha, s.beta) + 0.5 * s.B);
    d.A = -1.0 * (matmul(s.A, s.alpha) + matmul(transpose(s.alpha), s.A) + (g1 * tra) * s.A +
                  (p.lambda * s.phi) * s.A);
    d.B = -1.0 * (2.0 * matvec(s.A, s.beta) + matvec(transpose(s.alpha), s.B) + (g1 * tra) * s.B +
                  (p.lambda * s.phi) * s.B);
    d.C = -(dot(s.B, s.beta) + g1 * tra * s.C + p.lambda * s.phi * s.C);
    d.phi = -0.5 * (p.gamma + 1.0) * s.phi * tra - 0.5 * p.lambda * s.phi * s.phi;
    (void)n;
    return d;
}

struct IsotropicDerivative {
    double phi, alpha1, a, C;
};

inline IsotropicDerivative rhs_isotropic(const ModelParams& p, const IsotropicState& s) {
    if (!(s.phi > 0)) throw std::domain_error("rhs_isotropic: phi must be positive");
    const double n = p.dim;
    IsotropicDerivative d;
    d.phi = -0.5 * n * (p.gamma + 1.0) * s.phi * s.alpha1 - 0.5 * p.lambda * s.phi * s.phi;
    d.alpha1 = -s.alpha1 * s.alpha1 - s.a;
    d.a = -((2.0 + n * (p.gamma - 1.0)) * s.alpha1 + p.lambda * s.phi) * s.a;
    d.C = -(n * (p.gamma - 1.0) * s.alpha1 + p.lambda * s.phi) * s.C;
    return d;
}

inline UDState embed_isotropic(const ModelParams& p, const IsotropicState& s) {
    UDState u;
    u.t = s.t;
    u.alpha = Mat::identity(p.dim, s.alpha1);
    u.beta = Vec(p.dim);
    u.A = Mat::identity(p.dim, s.a);
    u.B = Vec(p.dim);
    u.C = s.C;
    u.phi = s.phi;
    return u;
}

// ---------------------------------------------------------------------------
// state packing and trajectories
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> pack(const UDState& s) {
    const int n = s.dim();
    std::vector<double> y;
    y.reserve(std::size_t(2 * n * n + 2 * n + 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y.push_back(s.alpha(i, j));
    for (int i = 0; i < n; ++i) y.push_back(s.beta[i]);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y.push_back(s.A(i, j));
    for (int i = 0; i < n; ++i) y.push_back(s.B[i]);
    y.push_back(s.C);
    y.push_back(s.phi);
    return y;
}

inline UDState unpack(int n, double t, const std::vector<double>& y) {
    UDState s;
    s.t = t;
    s.alpha = Mat(n);
    s.beta = Vec(n);
    s.A = Mat(n);
    s.B = Vec(n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s.alpha(i, j) = y[k++];
    for (int i = 0; i < n; ++i) s.beta[i] = y[k++];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s.A(i, j) = y[k++];
    for (int i = 0; i < n; ++i) s.B[i] = y[k++];
    s.C = y[k++];
    s.phi = y[k++];
    return s;
}

}  // namespace detail

struct UDIntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double blowup_threshold = 1e12;
    double min_step = 1e-14;
    std::vector<double> sample_times;  // forced exact landings
};

template <class State>
struct TrajectoryT {
    std::vector<State> samples;
    Termination termination = Termination::ReachedFinalTime;
    double t_estimate = std::numeric_limits<double>::quiet_NaN();
    OdeTrajectory raw;  // dense output and diagnostics

    const State& back() const { return samples.back(); }
};

using Trajectory = TrajectoryT<UDState>;
using IsotropicTrajectory = TrajectoryT<IsotropicState>;

inline Trajectory integrate(const ModelParams& p, const UDState& s0, double t_final,
                            const UDIntegrateOptions& opt = {}) {
    if (!(s0.phi > 0)) throw std::domain_error("integrate: phi must start positive");
    const int n = s0.dim();
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.blowup_threshold = opt.blowup_threshold;
    o.min_step = opt.min_step;
    o.force_times = opt.sample_times;
    o.positive_index = 2 * n * n + 2 * n + 1;  // phi slot
    o.postprocess = [n](double, std::vector<double>& y) {
        // keep A exactly symmetric against rounding drift
        const std::size_t base = std::size_t(n) * n + n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const std::size_t ij = base + std::size_t(i) * n + j;
                const std::size_t ji = base + std::size_t(j) * n + i;
                const double m = 0.5 * (y[ij] + y[ji]);
                y[ij] = y[ji] = m;
            }
    };
    auto rhs = [&p, n](double t, const std::vector<double>& y, std::vector<double>& dy) {
        const UDState s = detail::unpack(n, t, y);
        const UDDerivative d = rhs_full(p, s);
        UDState ds;
        ds.alpha = d.alpha;
        ds.beta = d.beta;
        ds.A = d.A;
        ds.B = d.B;
        ds.C = d.C;
        ds.phi = d.phi;
        dy = detail::pack(ds);
    };
    OdeTrajectory raw = integrate_ode(rhs, s0.t, detail::pack(s0), t_final, o);
    Trajectory tr;
    tr.termination = raw.termination;
    tr.t_estimate = raw.t_estimate;
    tr.samples.reserve(raw.t.size());
    for (std::size_t i = 0; i < raw.t.size(); ++i)
        tr.samples.push_back(detail::unpack(n, raw.t[i], raw.y[i]));
    tr.raw = std::move(raw);
    return tr;
}

inline IsotropicTrajectory integrate(const ModelParams& p, const IsotropicState& s0, double t_final,
                                     const UDIntegrateOptions& opt = {}) {
    if (!(s0.phi > 0)) throw std::domain_error("integrate: phi must start positive");
    OdeOptions o;
    o.rtol = opt.rtol;
    o.atol = opt.atol;
    o.blowup_threshold = opt.blowup_threshold;
    o.min_step = opt.min_step;
    o.force_times = opt.sample_times;
    o.positive_index = 0;
    auto rhs = [&p](double t, const std::vector<double>& y, std::vector<double>& dy) {
        const IsotropicState s{t, y[0], y[1], y[2], y[3]};
        const IsotropicDerivative d = rhs_isotropic(p, s);
        dy = {d.phi, d.alpha1, d.a, d.C};
    };
    OdeTrajectory raw = integrate_ode(rhs, s0.t, {s0.phi, s0.alpha1, s0.a, s0.C}, t_final, o);
    IsotropicTrajectory tr;
    tr.termination = raw.termination;
    tr.t_estimate = raw.t_estimate;
    for (std::size_t i = 0; i < raw.t.size(); ++i)
        tr.samples.push_back(IsotropicState{raw.t[i], raw.y[i][0], raw.y[i][1], raw.y[i][2],
                                            raw.y[i][3]});
    tr.raw = std::move(raw);
    return tr;
}

// ---------------------------------------------------------------------------
// field reconstruction
// ---------------------------------------------------------------------------

inline double temperature_at(const UDState& s, const Vec& x) {
    return dot(x, matvec(s.A, x)) + dot(s.B, x) + s.C;
}

// (rho, v, T) at a spatial point; only defined on the support T(x) > 0,
// where the constraint rho sqrt(T) = phi holds identically.
inline GasSample reconstruct_fields(const UDState& s, const Vec& x) {
    const double T = temperature_at(s, x);
    if (!(T > 0)) throw std::domain_error("reconstruct_fields: T(x) <= 0 outside the support");
    const double rho = s.phi / std::sqrt(T);
    return GasSample(rho, matvec(s.alpha, x) + s.beta, T);
}

// peak density location: minimizer of the quadratic T (falls back to the
// origin when A is not positive definite)
inline Vec density_peak_location(const UDState& s) {
    const int n = s.dim();
    Vec x(n);
    const auto ev = sym_eigenvalues(s.A);
    if (ev.front() <= 0) return x;
    // solve 2 A x = -B by Cramer (n <= 3)
    if (n == 1) {
        x[0] = -0.5 * s.B[0] / s.A(0, 0);
        return x;
    }
    if (n == 2) {
        const double det = s.A(0, 0) * s.A(1, 1) - s.A(0, 1) * s.A(1, 0);
        x[0] = -0.5 * (s.B[0] * s.A(1, 1) - s.B[1] * s.A(0, 1)) / det;
        x[1] = -0.5 * (s.A(0, 0) * s.B[1] - s.A(1, 0) * s.B[0]) / det;
        return x;
    }
    // n == 3: Gaussian elimination on a copy
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = 2 * s.A(i, j);
        m[i][3] = -s.B[i];
    }
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        for (int r = 0; r < 3; ++r)
            if (r != c) {
                const double f = m[r][c] / m[c][c];
                for (int j = c; j < 4; ++j) m[r][j] -= f * m[c][j];
            }
    }
    for (int i = 0; i < 3; ++i) x[i] = m[i][3] / m[i][i];
    return x;
}

inline double peak_density(const UDState& s) {
    const Vec x = density_peak_location(s);
    const double T = temperature_at(s, x);
    if (!(T > 0)) throw std::domain_error("peak_density: temperature vanished");
    return s.phi / std::sqrt(T);
}

// ---------------------------------------------------------------------------
// 1D exact blow-up family
// ---------------------------------------------------------------------------

// Closed-form solution of the full isotropic system for n = 1:
//   phi    = lam1 (t*-t)^{-1},          lam1 = -(2+(gamma+1) alpha0)/lambda
//   alpha1 = alpha0 (t*-t)^{-1}
//   a      = -alpha0 (alpha0+1) (t*-t)^{-2}
//   C      = C0 (t*-t)^{-2(alpha0+1)}
// valid for gamma > 1, alpha0 in (-1, -2/(gamma+1)), C0 > 0.
class ExactFamily1D {
  public:
    ExactFamily1D(const ModelParams& p, double alpha0, double C0, double t_star)
        : p_(p), alpha0_(alpha0), C0_(C0), t_star_(t_star) {
        if (p.dim != 1) throw std::invalid_argument("ExactFamily1D: requires n = 1");
        if (!(p.gamma > 1)) throw std::invalid_argument("ExactFamily1D: requires gamma > 1");
        if (!(alpha0 > -1 && alpha0 < -2.0 / (p.gamma + 1)))
            throw std::invalid_argument("ExactFamily1D: alpha0 outside (-1, -2/(gamma+1))");
        if (!(C0 > 0)) throw std::invalid_argument("ExactFamily1D: C0 must be positive");
        lam1_ = -(2.0 + (p.gamma + 1.0) * alpha0) / p.lambda;
        acoef_ = -alpha0 * (alpha0 + 1.0);
    }

    double phi_coefficient() const { return lam1_; }
    double a_coefficient() const { return acoef_; }
    double t_star() const { return t_star_; }

    IsotropicState state(double t) const {
        const double tau = t_star_ - t;
        if (!(tau > 0)) throw std::domain_error("ExactFamily1D: t must precede t_star");
        IsotropicState s;
        s.t = t;
        s.phi = lam1_ / tau;
        s.alpha1 = alpha0_ / tau;
        s.a = acoef_ / (tau * tau);
        s.C = C0_ * std::pow(tau, -2.0 * (alpha0_ + 1.0));
        return s;
    }

    // analytic time derivative, for substitution checks
    IsotropicDerivative derivative(double t) const {
        const double tau = t_star_ - t;
        IsotropicDerivative d;
        d.phi = lam1_ / (tau * tau);
        d.alpha1 = alpha0_ / (tau * tau);
        d.a = 2.0 * acoef_ / (tau * tau * tau);
        d.C = 2.0 * (alpha0_ + 1.0) * C0_ * std::pow(tau, -2.0 * (alpha0_ + 1.0) - 1.0);
        return d;
    }

    UDState full_state(double t) const { return embed_isotropic(p_, state(t)); }

  private:
    ModelParams p_;
    double alpha0_, C0_, t_star_, lam1_, acoef_;
};

// ---------------------------------------------------------------------------
// blow-up diagnostics
// ---------------------------------------------------------------------------

// Least-squares slope of log(peak density) against log(t_est - t) over the
// trailing fraction of samples of a blown-up trajectory.
template <class State>
inline double density_exponent_fit(const TrajectoryT<State>& tr, double window_fraction = 0.25) {
    if (tr.termination != Termination::BlowUpDetected)
        throw std::domain_error("density_exponent_fit: trajectory did not blow up");
    const double t_est = tr.t_estimate;
    // samples closer to t_est than a multiple of the final step width carry
    // the uncertainty of the fitted blow-up time; drop them
    const double tau_cut = 24.0 * std::max(t_est - tr.samples.back().t, 0.0);
    std::vector<double> lx, ly;
    const std::size_t n = tr.samples.size();
    const std::size_t start = std::size_t(double(n) * (1.0 - window_fraction));
    for (std::size_t i = start; i < n; ++i) {
        double t, rho;
        if constexpr (std::is_same_v<State, IsotropicState>) {
            t = tr.samples[i].t;
            if (!(tr.samples[i].C > 0)) continue;
            rho = tr.samples[i].phi / std::sqrt(tr.samples[i].C);
        } else {
            t = tr.samples[i].t;
            try {
                rho = peak_density(tr.samples[i]);
            } catch (const std::domain_error&) {
                continue;
            }
        }
        const double tau = t_est - t;
        if (tau <= tau_cut || !(rho > 0)) continue;
        lx.push_back(std::log(tau));
        ly.push_back(std::log(rho));
    }
    if (lx.size() < 10) throw std::domain_error("density_exponent_fit: fewer than 10 usable samples");
    return fit_line(lx, ly).slope;
}

// Ratio of extreme eigenvalues of A(t) along a trajectory.  Near 1 the
// temperature contours stay round (point concentration); a diverging ratio
// signals flattening onto a line.
struct AnisotropySample {
    double t;
    double ratio;
};

inline std::vector<AnisotropySample> anisotropy_diagnostic(const Trajectory& tr) {
    std::vector<AnisotropySample> out;
    out.reserve(tr.samples.size());
    for (const UDState& s : tr.samples) {
        const auto ev = sym_eigenvalues(s.A);
        const double lo = ev.front(), hi = ev.back();
        if (lo < -1e-12 * std::max(1.0, std::abs(hi)))
            throw std::domain_error("anisotropy_diagnostic: A lost positive semidefiniteness");
        out.push_back({s.t, lo > 0 ? hi / lo : std::numeric_limits<double>::infinity()});
    }
    return out;
}

}  // namespace granular
