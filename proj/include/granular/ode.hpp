// ode.hpp — embedded Dormand–Prince 5(4) integrator with dense output and
// the termination diagnostics needed for finite-time blow-up detection.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "granular/fit.hpp"

namespace granular {

enum class Termination { ReachedFinalTime, BlowUpDetected, PhiNonPositive, StepUnderflow };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::ReachedFinalTime: return "ReachedFinalTime";
        case Termination::BlowUpDetected: return "BlowUpDetected";
        case Termination::PhiNonPositive: return "PhiNonPositive";
        case Termination::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;              // 0 selects automatically
    double min_step = 1e-14;
    double blowup_threshold = 1e12;
    std::size_t max_steps = 4000000;
    int positive_index = -1;          // component required to stay > 0
    std::vector<double> force_times;  // times the stepper lands on exactly
    // applied to the state after every accepted step (e.g. re-symmetrization)
    std::function<void(double, std::vector<double>&)> postprocess;
};

struct OdeTrajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> dy;
    Termination termination = Termination::ReachedFinalTime;
    double t_estimate = std::numeric_limits<double>::quiet_NaN();  // blow-up time fit
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;

    double last_time() const { return t.back(); }
    const std::vector<double>& last_state() const { return y.back(); }

    // cubic Hermite dense output between accepted steps
    std::vector<double> sample(double tq) const {
        if (tq <= t.front()) return y.front();
        if (tq >= t.back()) return y.back();
        const auto it = std::upper_bound(t.begin(), t.end(), tq);
        const std::size_t k = std::size_t(it - t.begin()) - 1;
        const double h = t[k + 1] - t[k];
        const double s = (tq - t[k]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        std::vector<double> out(y[k].size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = h00 * y[k][i] + h10 * h * dy[k][i] + h01 * y[k + 1][i] + h11 * h * dy[k + 1][i];
        return out;
    }
};

using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

namespace detail {

inline double inf_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

// least-squares zero of 1/|state| as a linear function of t over the last
// accepted steps; refines the blow-up time past the final resolvable step
inline double refine_blowup_time(const OdeTrajectory& tr) {
    const std::size_t n = tr.t.size();
    const std::size_t k = std::min<std::size_t>(10, n);
    const double t_ref = tr.t.back();  // shift to keep the fit well conditioned
    std::vector<double> ts, inv;
    for (std::size_t i = n - k; i < n; ++i) {
        const double nm = inf_norm(tr.y[i]);
        if (nm > 0 && std::isfinite(nm)) {
            ts.push_back(tr.t[i] - t_ref);
            inv.push_back(1.0 / nm);
        }
    }
    if (ts.size() < 2) return t_ref;
    LineFit f;
    try {
        f = fit_line(ts, inv);
    } catch (const std::invalid_argument&) {
        return t_ref;
    }
    if (f.slope >= 0) return t_ref;
    return std::max(t_ref, t_ref - f.intercept / f.slope);
}

}  // namespace detail

inline OdeTrajectory integrate_ode(const OdeRhs& rhs, double t0, std::vector<double> y0,
                                   double t_final, const OdeOptions& opt = {}) {
    using detail::inf_norm;
    if (t_final <= t0) throw std::invalid_argument("integrate_ode: t_final must exceed t0");
    const std::size_t n = y0.size();

    // Dormand–Prince 5(4) tableau
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    OdeTrajectory tr;
    rhs(t0, y0, k1);
    tr.t.push_back(t0);
    tr.y.push_back(y0);
    tr.dy.push_back(k1);

    std::vector<double> force = opt.force_times;
    std::sort(force.begin(), force.end());
    std::size_t force_idx = 0;
    while (force_idx < force.size() && force[force_idx] <= t0) ++force_idx;

    double t = t0;
    double h = opt.h_init > 0 ? opt.h_init : std::min(1e-3 * (t_final - t0), 1e-2 / (1 + inf_norm(k1)));

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t >= t_final) break;
        h = std::min(h, t_final - t);
        while (force_idx < force.size() && force[force_idx] <= t) ++force_idx;
        if (force_idx < force.size() && t + h > force[force_idx]) h = force[force_idx] - t;

        // stage evaluations
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y0[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y0[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y0[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y0[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y0[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y0[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                   e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y0[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
            if (!std::isfinite(ynew[i])) finite = false;
        }
        err = std::sqrt(err / n);

        if (!finite || err > 1.0) {
            ++tr.steps_rejected;
            const double fac = finite ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= fac;
            if (h < opt.min_step) {
                if (inf_norm(y0) > opt.blowup_threshold) {
                    tr.termination = Termination::BlowUpDetected;
                    tr.t_estimate = detail::refine_blowup_time(tr);
                } else {
                    tr.termination = Termination::StepUnderflow;
                    tr.t_estimate = t;
                }
                return tr;
            }
            continue;
        }

        // accepted
        t += h;
        if (force_idx < force.size() &&
            std::abs(t - force[force_idx]) <= 1e-15 * std::max(1.0, std::abs(t)))
            t = force[force_idx];  // snap away rounding from the step clamp
        y0 = ynew;
        if (opt.postprocess) {
            opt.postprocess(t, y0);
            rhs(t, y0, k7);
        }
        k1 = k7;  // FSAL
        tr.t.push_back(t);
        tr.y.push_back(y0);
        tr.dy.push_back(k1);
        ++tr.steps_accepted;

        if (opt.positive_index >= 0 && y0[std::size_t(opt.positive_index)] <= 0) {
            // locate the crossing with dense output and clip the final sample
            const std::size_t i = std::size_t(opt.positive_index);
            double lo = tr.t[tr.t.size() - 2], hi = t;
            for (int b = 0; b < 80; ++b) {
                const double mid = 0.5 * (lo + hi);
                (tr.sample(mid)[i] > 0 ? lo : hi) = mid;
            }
            tr.t.back() = lo;
            tr.y.back() = tr.sample(lo);
            tr.termination = Termination::PhiNonPositive;
            tr.t_estimate = lo;
            return tr;
        }

        const double nm = inf_norm(y0);
        if (nm > opt.blowup_threshold && h < opt.min_step * 10) {
            tr.termination = Termination::BlowUpDetected;
            tr.t_estimate = detail::refine_blowup_time(tr);
            return tr;
        }

        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }

    tr.termination = Termination::ReachedFinalTime;
    return tr;
}

}  // namespace granular
