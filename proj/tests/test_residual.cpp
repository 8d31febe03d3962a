#include "doctest.h"

#include <cmath>
#include <map>

#include "granular/chaplygin.hpp"
#include "granular/residual.hpp"
#include "granular/uniform_deformation.hpp"

using namespace granular;

namespace {

// fields of the homogeneous cooling state (constant rho, v; T decays)
FieldSet haff_fields(const ModelParams& p, double rho0, double T0) {
    FieldSet f;
    f.dim = p.dim;
    f.rho = [rho0](double, const Vec&) { return rho0; };
    f.velocity = [n = p.dim](double, const Vec&) { return Vec(n); };
    f.temperature = [p, rho0, T0](double t, const Vec&) {
        return haff_temperature(p, HaffParams(rho0, T0), t);
    };
    return f;
}

// fields reconstructed from the closed-form 1d family
FieldSet family_fields(const ExactFamily1D& fam, double rho_scale = 1.0, double T_scale = 1.0) {
    FieldSet f;
    f.dim = 1;
    f.rho = [=](double t, const Vec& x) {
        const IsotropicState s = fam.state(t);
        const double T = s.a * x[0] * x[0] + s.C;
        return rho_scale * s.phi / std::sqrt(T);
    };
    f.velocity = [=](double t, const Vec& x) { return Vec{fam.state(t).alpha1 * x[0]}; };
    f.temperature = [=](double t, const Vec& x) {
        const IsotropicState s = fam.state(t);
        return T_scale * (s.a * x[0] * x[0] + s.C);
    };
    return f;
}

}  // namespace

TEST_SUITE("residual_oracle") {

TEST_CASE("haff state: spatial terms vanish identically, cooling balance to stencil accuracy") {
    const ModelParams p(1.4, 2.0, 2);
    const FieldSet f = haff_fields(p, 1.0, 1.0);
    GridSpec g{0.5, 2.0, Vec{-1.0, -1.0}, Vec{1.0, 1.0}, 3, 5};
    std::vector<ResidualReport> reps;
    for (double h : {1e-2, 5e-3, 2.5e-3}) reps.push_back(residual_euler(f, p, g, h));
    for (const auto& rep : reps) {
        // constant-in-space fields: mass and momentum residuals are exact zeros
        CHECK(rep.equations[0].max_norm < 1e-14);
        CHECK(rep.equations[1].max_norm < 1e-14);
        // energy residual is pure differentiation error of the exact balance
        CHECK(rep.equations[2].max_norm < 2 * rep.h * rep.h);
    }
    const auto orders = convergence_order(reps);
    CHECK(orders[0].at_rounding_floor);
    CHECK(orders[1].at_rounding_floor);
    CHECK(orders[2].order == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("exact 1d family certifies at second order") {
    const ModelParams p(2.0, 1.0, 1);
    const ExactFamily1D fam(p, -0.8, 1.0, 1.0);
    const FieldSet f = family_fields(fam);
    GridSpec g{0.1, 0.5, Vec{-0.5}, Vec{0.5}, 5, 9};
    std::vector<ResidualReport> reps;
    for (double h : {1e-2, 5e-3, 2.5e-3}) reps.push_back(residual_euler(f, p, g, h));
    for (const auto& o : convergence_order(reps)) {
        CHECK(o.order > 1.7);
        CHECK(o.order < 2.3);
        CHECK_FALSE(o.at_rounding_floor);
    }
}

TEST_CASE("negative controls break the certification") {
    const ModelParams p(2.0, 1.0, 1);
    const ExactFamily1D fam(p, -0.8, 1.0, 1.0);
    GridSpec g{0.1, 0.5, Vec{-0.5}, Vec{0.5}, 5, 9};

    // T scaled by 1%: energy residual O(1), order collapses
    const FieldSet fT = family_fields(fam, 1.0, 1.01);
    std::vector<ResidualReport> reps;
    for (double h : {1e-2, 5e-3}) reps.push_back(residual_euler(fT, p, g, h));
    CHECK(reps.front().equations[2].max_norm > 1e-3);
    CHECK(convergence_order(reps)[2].order < 0.5);

    // rho scaled by 1%: the energy sink no longer cancels
    const FieldSet fR = family_fields(fam, 1.01, 1.0);
    std::vector<ResidualReport> reps2;
    for (double h : {1e-2, 5e-3}) reps2.push_back(residual_euler(fR, p, g, h));
    CHECK(reps2.front().equations[2].max_norm > 1e-3);
    CHECK(convergence_order(reps2)[2].order < 0.5);
}

TEST_CASE("integrated trajectory fields certify against the euler system") {
    const ModelParams p(5.0 / 3.0, 1.0, 2);
    IsotropicState s0;
    s0.phi = 1.0;
    s0.alpha1 = -1.0;
    s0.a = 0.1;
    s0.C = 1.0;
    const double t0 = 0.35, dt_max = 2.2e-2;
    // exact landings at every stencil time so interpolation cannot pollute
    std::vector<double> stencil;
    for (double h : {1e-2, 5e-3, 2.5e-3})
        for (int k = -2; k <= 2; ++k)
            for (int j = 0; j < 3; ++j)
                stencil.push_back(t0 + j * 1e-2 + k * h);
    UDIntegrateOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.sample_times = stencil;
    const IsotropicTrajectory tr = integrate(p, s0, t0 + 0.1, opt);
    REQUIRE(tr.termination == Termination::ReachedFinalTime);

    std::map<double, IsotropicState> table;
    for (const auto& q : tr.samples) table[q.t] = q;
    auto state_at = [table](double t) {
        const auto it = table.find(t);
        if (it == table.end()) throw std::runtime_error("state table miss");
        return it->second;
    };
    FieldSet f;
    f.dim = 2;
    f.rho = [state_at](double t, const Vec& x) {
        const IsotropicState s = state_at(t);
        return s.phi / std::sqrt(s.a * (x[0] * x[0] + x[1] * x[1]) + s.C);
    };
    f.velocity = [state_at](double t, const Vec& x) {
        const IsotropicState s = state_at(t);
        return Vec{s.alpha1 * x[0], s.alpha1 * x[1]};
    };
    f.temperature = [state_at](double t, const Vec& x) {
        const IsotropicState s = state_at(t);
        return s.a * (x[0] * x[0] + x[1] * x[1]) + s.C;
    };
    GridSpec g{t0, t0 + 2e-2, Vec{-0.4, -0.4}, Vec{0.4, 0.4}, 3, 7};
    std::vector<ResidualReport> reps;
    for (double h : {1e-2, 5e-3, 2.5e-3}) reps.push_back(residual_euler(f, p, g, h));
    for (const auto& o : convergence_order(reps)) {
        CHECK(o.order > 1.7);
        CHECK(o.order < 2.3);
    }
    (void)dt_max;
}

TEST_CASE("stencil points outside the field support surface as domain errors") {
    // fields whose support excludes the origin: a stencil straddling it throws
    FieldSet f;
    f.dim = 1;
    f.rho = [](double, const Vec& x) {
        if (!(x[0] * x[0] > 0)) throw std::domain_error("outside support");
        return 1.0 / std::abs(x[0]);
    };
    f.velocity = [](double, const Vec& x) { return Vec{-x[0]}; };
    f.temperature = [](double, const Vec& x) { return x[0] * x[0]; };
    const ModelParams p(2.0, 1.0, 1);
    GridSpec g{0.1, 0.2, Vec{-0.05}, Vec{0.05}, 2, 5};  // grid crosses the hole
    CHECK_THROWS_AS(residual_euler(f, p, g, 1e-2), std::domain_error);
}

TEST_CASE("uniform-cooling state satisfies the constrained pair") {
    const RiemannData d(0.4, 0.4, 1.0, 1.0, 2.0, 1.0);
    const ModelParams p(-1.0, 2.0, 1);
    Chaplygin1DFields f;
    f.v = [](double, double) { return 0.4; };
    f.w = [d](double t, double) { return d.wL_t(t); };
    f.phi = [d](double t) { return d.phi(t); };
    const Grid1D g{0.2, 1.8, -1.0, 1.0, 4, 11};
    // near the optimal stencil width only rounding noise remains
    const ResidualReport rep = residual_chaplygin(f, p, g, 1e-5);
    CHECK(rep.equations[0].max_norm < 1e-10);
    CHECK(rep.equations[1].max_norm < 1e-10);
    const ResidualReport repc = residual_chaplygin(f, p, g, 1e-5, true);
    CHECK(repc.equations[0].max_norm < 1e-10);
    CHECK(repc.equations[1].max_norm < 1e-10);
}

TEST_CASE("two-contact solution: smooth pieces certify at second order") {
    const RiemannData d(0, 1, 1, 1, 2, 1);
    const PiecewiseSolution sol = solve(d);
    const ModelParams p(-1.0, 2.0, 1);
    Chaplygin1DFields f;
    f.v = [&sol](double t, double x) { return sol.eval(t, x).v; };
    f.w = [&sol](double t, double x) { return std::sqrt(sol.eval(t, x).T); };
    f.phi = [&d](double t) { return d.phi(t); };
    f.fronts = [&sol](double t) { return sol.fronts(t); };
    const Grid1D g{1.0, 2.0, -2.5, 3.5, 3, 25};
    std::vector<ResidualReport> reps, repsc;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        reps.push_back(residual_chaplygin(f, p, g, h));
        repsc.push_back(residual_chaplygin(f, p, g, h, true));
    }
    for (const auto& o : convergence_order(reps)) {
        CHECK(o.order > 1.7);
        CHECK(o.order < 2.3);
    }
    for (const auto& o : convergence_order(repsc)) {
        CHECK(o.order > 1.7);
        CHECK(o.order < 2.3);
    }
}

TEST_CASE("plateau functions as constant-in-x fields carry the relaxation defect") {
    // Documented construction defect: treating the plateau functions as the
    // wedge interior leaves a residual of exactly (lambda phi/4)(vR - vL) in
    // the temperature equation, independent of the stencil width.
    const RiemannData d(0, 1, 1, 1, 2, 1);
    const TwoContactSolution tc = two_contact_solution(d);
    const ModelParams p(-1.0, 2.0, 1);
    Chaplygin1DFields f;
    f.v = [&tc](double t, double) { return tc.v_mid(t); };
    f.w = [&tc](double t, double) { return tc.w_mid(t); };
    f.phi = [&d](double t) { return d.phi(t); };
    const Grid1D g{0.5, 1.5, -0.2, 0.2, 3, 5};
    std::vector<ResidualReport> reps;
    for (double h : {1e-3, 5e-4}) reps.push_back(residual_chaplygin(f, p, g, h));
    const double expected = 0.25 * d.lambda * d.phi(0.5) * (d.vR - d.vL);
    CHECK(reps[0].equations[1].max_norm == doctest::Approx(expected).epsilon(1e-5));
    CHECK(convergence_order(reps)[1].order < 0.1);  // defect does not shrink with h
    CHECK(reps[0].equations[0].max_norm < 1e-9);    // velocity equation is clean here
}

TEST_CASE("beta equation variants: only the derived form certifies") {
    // State with beta, B nonzero; evolve both right-hand-side variants and
    // substitute the reconstructed fields into the full gas system.
    const ModelParams p(1.4, 1.0, 2);
    UDState s0;
    s0.alpha = Mat(2);
    s0.alpha(0, 0) = -0.2;
    s0.alpha(0, 1) = 0.1;
    s0.alpha(1, 1) = 0.15;
    s0.beta = Vec{0.3, -0.2};
    s0.A = Mat::identity(2, 0.4);
    s0.A(0, 1) = s0.A(1, 0) = 0.05;
    s0.B = Vec{0.25, -0.15};
    s0.C = 1.0;
    s0.phi = 1.0;

    GridSpec g{0.02, 0.1, Vec{-0.3, -0.3}, Vec{0.3, 0.3}, 3, 5};
    const double h = 1e-3;
    std::vector<double> stencil;
    for (int j = 0; j < g.nt; ++j)
        for (int k = -2; k <= 2; ++k)
            stencil.push_back(g.t_lo + (g.t_hi - g.t_lo) * j / double(g.nt - 1) + k * h);

    auto run_with = [&](BetaForm bf) {
        auto rhs = [&p, bf](double t, const std::vector<double>& y, std::vector<double>& dy) {
            const UDState s = granular::detail::unpack(2, t, y);
            const UDDerivative ds = rhs_full(p, s, bf);
            UDState tmp;
            tmp.alpha = ds.alpha;
            tmp.beta = ds.beta;
            tmp.A = ds.A;
            tmp.B = ds.B;
            tmp.C = ds.C;
            tmp.phi = ds.phi;
            dy = granular::detail::pack(tmp);
        };
        OdeOptions opt;
        opt.rtol = 1e-12;
        opt.atol = 1e-14;
        opt.force_times = stencil;
        const OdeTrajectory tr = integrate_ode(rhs, 0.0, granular::detail::pack(s0), 0.15, opt);
        auto table = std::make_shared<std::map<double, UDState>>();
        for (std::size_t i = 0; i < tr.t.size(); ++i)
            (*table)[tr.t[i]] = granular::detail::unpack(2, tr.t[i], tr.y[i]);
        return table;
    };

    auto make_fields = [&](std::shared_ptr<std::map<double, UDState>> table) {
        auto at = [table](double t) {
            const auto it = table->find(t);
            if (it == table->end()) throw std::runtime_error("state table miss");
            return it->second;
        };
        FieldSet f;
        f.dim = 2;
        f.rho = [at](double t, const Vec& x) {
            const UDState s = at(t);
            return s.phi / std::sqrt(temperature_at(s, x));
        };
        f.velocity = [at](double t, const Vec& x) {
            const UDState s = at(t);
            return matvec(s.alpha, x) + s.beta;
        };
        f.temperature = [at](double t, const Vec& x) { return temperature_at(at(t), x); };
        return f;
    };

    const auto good = residual_euler(make_fields(run_with(BetaForm::Derived)), p, g, h);
    const auto bad = residual_euler(make_fields(run_with(BetaForm::DoubledAdvection)), p, g, h);
    CHECK(good.max_over_equations() < 5e-6);
    CHECK(bad.equations[1].max_norm > 1e-2);  // momentum equation fails
}

}  // TEST_SUITE
