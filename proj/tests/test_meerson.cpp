#include "doctest.h"

#include <cmath>

#include "granular/fit.hpp"
#include "granular/meerson.hpp"

using namespace granular;

TEST_SUITE("meerson") {

TEST_CASE("lagrangian density fixed values") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    CHECK(density_lagrangian(p, 0.0, 0.5) == doctest::Approx(4.0).epsilon(1e-15));
    for (double m : {-1.2, -0.3, 0.0, 0.9})
        CHECK(density_lagrangian(p, m, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(density_lagrangian(p, 0.0, 1.0), std::domain_error);   // at blow-up
    CHECK_THROWS_AS(density_lagrangian(p, 2.0, 0.0), std::domain_error);   // outside domain
}

TEST_CASE("blow-up times") {
    const MeersonParams p1 = MeersonParams::from_mu(1.0, 1.0);
    CHECK(blowup_time(p1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // mu from the model constants: lambda = 2, gamma = 2 gives mu = 1/sqrt(2)
    const MeersonParams p2 = MeersonParams::from_model(2.0, 2.0, 1.0);
    CHECK(p2.mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(blowup_time(p2, 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // non-uniform profile: global blow-up sits at the maximizer of rho0 cos(mu m)
    const MeersonParams p3 = MeersonParams::from_mu(
        1.0, 1.0, 2.0, [](double m) { return 1.0 + 0.4 * std::cos(2 * m - 0.6); });
    const GlobalBlowup gb = global_blowup(p3);
    // independent oracle: dense scan of t*(m)
    double best = 1e300, bm = 0;
    for (int i = 1; i < 40000; ++i) {
        const double m = p3.mass_lo() + (p3.mass_hi() - p3.mass_lo()) * i / 40000.0;
        const double ts = blowup_time(p3, m);
        if (ts < best) {
            best = ts;
            bm = m;
        }
    }
    CHECK(gb.t_star == doctest::Approx(best).epsilon(1e-9));
    CHECK(gb.m_star == doctest::Approx(bm).epsilon(1e-3));
}

TEST_CASE("density growth exponent at the blow-up point is -2") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    std::vector<double> lx, ly;
    for (double tau : {0.3, 0.2, 0.1, 0.05, 0.02, 0.01}) {
        lx.push_back(std::log(tau));
        ly.push_back(std::log(density_lagrangian(p, 0.0, 1.0 - tau)));
    }
    CHECK(fit_line(lx, ly).slope == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("velocity field: gauge, exact time derivative, mass-equation consistency") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    for (double t : {0.0, 0.4, 0.8}) CHECK(velocity_field(p, 0.0, t) == doctest::Approx(0.0));

    // d/dt v = 2 A mu sin(mu m) exactly (p is time independent)
    const double m = 0.7, h = 1e-5;
    const double dv = (velocity_field(p, m, 0.5 + h) - velocity_field(p, m, 0.5 - h)) / (2 * h);
    CHECK(dv == doctest::Approx(2.0 * std::sin(0.7)).epsilon(1e-9));

    // d/dm v equals d/dt tau to second order in the stencil
    for (double t : {0.2, 0.6}) {
        for (double mm : {-0.9, 0.1, 1.0}) {
            const double dm = 1e-4;
            const double dvm =
                (velocity_field(p, mm + dm, t) - velocity_field(p, mm - dm, t)) / (2 * dm);
            CHECK(dvm == doctest::Approx(dtau_dt(p, mm, t)).epsilon(1e-6));
        }
    }

    // the two constructions agree
    for (double t : {0.1, 0.5, 0.85})
        for (double mm : {-1.1, -0.2, 0.6, 1.3})
            CHECK(std::abs(velocity_field(p, mm, t) - velocity_from_mass_equation(p, mm, t)) <
                  1e-10);
}

TEST_CASE("euler-lagrange maps: identity at unit density and round trips") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    const EulerLagrangeMaps maps0 = euler_lagrange_maps(p, 0.0);
    for (double m : {-1.0, -0.25, 0.5, 1.2})
        CHECK(maps0.x_of_m(m) == doctest::Approx(m).epsilon(1e-12));

    const EulerLagrangeMaps maps = euler_lagrange_maps(p, 0.6);
    for (double m : {-1.3, -0.4, 0.0, 0.7, 1.4}) {
        const double x = maps.x_of_m(m);
        CHECK(std::abs(maps.m_of_x(x) - m) < 1e-10);
    }
}

TEST_CASE("eulerian peak sharpens and support narrows toward blow-up") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    auto peak_and_width = [&](double t) {
        const EulerLagrangeMaps maps = euler_lagrange_maps(p, t);
        const double peak = density_lagrangian(p, maps.m_of_x(0.0), t);
        return std::make_pair(peak, maps.x_hi - maps.x_lo);
    };
    const auto [p0, w0] = peak_and_width(0.0);
    const auto [p5, w5] = peak_and_width(0.5);
    const auto [p9, w9] = peak_and_width(0.9);
    CHECK(p0 < p5);
    CHECK(p5 < p9);
    CHECK(w9 < w5);
    CHECK(w5 < w0);
}

TEST_CASE("temperature stays nonnegative and vanishes at the blow-up point") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    double prev = 1e300;
    for (double t : {0.0, 0.5, 0.9, 0.99, 0.9999}) {
        const double T = temperature_lagrangian(p, 0.0, t);
        CHECK(T >= 0);
        CHECK(T < prev);
        prev = T;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("analytic substitution residual vanishes; wrong mu does not") {
    const MeersonParams good = MeersonParams::from_mu(1.0, 1.0, 2.0);
    CHECK(lagrangian_residual_analytic(good, -1.2, 1.2, 0.0, 0.8, 9, 5) < 1e-13);

    // arbitrary smooth positive profile: the family still solves the system
    const MeersonParams prof = MeersonParams::from_mu(
        1.3, 0.8, 1.7, [](double m) { return 1.5 + 0.5 * std::sin(m); });
    CHECK(lagrangian_residual_analytic(prof, -1.5, 1.5, 0.0, 0.4, 9, 5) < 1e-12);

    // fields built for a detuned mu, equations evaluated with the reference
    // lambda: the energy equation no longer closes
    const MeersonParams ref = MeersonParams::from_mu(1.0, 1.0, 2.0);
    const MeersonParams bad = MeersonParams::from_mu(1.0, 1.1, 2.0);
    CHECK(lagrangian_residual_analytic(bad, -1.2, 1.2, 0.0, 0.8, 9, 5, ref.lambda()) > 0.05);
}

TEST_CASE("finite-difference residuals converge at second order") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    const auto r1 = lagrangian_residual(p, -1.0, 1.0, 0.2, 0.6, 7, 5, 1e-2);
    const auto r2 = lagrangian_residual(p, -1.0, 1.0, 0.2, 0.6, 7, 5, 5e-3);
    const auto r4 = lagrangian_residual(p, -1.0, 1.0, 0.2, 0.6, 7, 5, 2.5e-3);
    auto order = [](double a, double b) { return std::log2(a / b); };
    CHECK(order(r1.mass_max, r2.mass_max) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(order(r2.mass_max, r4.mass_max) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(order(r2.momentum_max, r4.momentum_max) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(order(r2.energy_max, r4.energy_max) == doctest::Approx(2.0).epsilon(0.15));

    // negative control: fields for a detuned mu against the reference lambda
    // leave an O(1) energy residual at every h
    const MeersonParams bad = MeersonParams::from_mu(1.0, 1.1, 2.0);
    const double lam_ref = p.lambda();
    const auto b1 = lagrangian_residual(bad, -1.0, 1.0, 0.2, 0.6, 7, 5, 1e-2, lam_ref);
    const auto b2 = lagrangian_residual(bad, -1.0, 1.0, 0.2, 0.6, 7, 5, 2.5e-3, lam_ref);
    CHECK(b1.energy_max > 0.05);
    CHECK(order(b1.energy_max, b2.energy_max) < 0.5);
}

TEST_CASE("sampled-table profiles: monotone interpolation, family stays exact") {
    // table of a smooth positive profile; the interpolant must reproduce it
    // closely and never overshoot between knots
    auto truth = [](double m) { return 1.4 + 0.5 * std::tanh(m); };
    std::vector<double> ms, ys;
    for (int i = 0; i <= 40; ++i) {
        const double m = -1.6 + 3.2 * i / 40.0;
        ms.push_back(m);
        ys.push_back(truth(m));
    }
    auto prof = profile_from_table(ms, ys);
    for (double m : {-1.31, -0.5, 0.07, 0.93, 1.47})
        CHECK(prof(m) == doctest::Approx(truth(m)).epsilon(1e-5));
    // monotone data stay monotone through the knots
    double prev = prof(-1.6);
    for (double m = -1.6; m <= 1.6; m += 0.01) {
        CHECK(prof(m) >= prev - 1e-12);
        prev = prof(m);
    }
    CHECK(prof(-99.0) == doctest::Approx(ys.front()));  // clamped outside
    CHECK_THROWS_AS(profile_from_table({0.0, 1.0}, {1.0, -1.0}), std::invalid_argument);

    // the family built on the tabulated profile still solves the system
    const MeersonParams p = MeersonParams::from_mu(1.0, 0.9, 1.8, prof);
    CHECK(lagrangian_residual_analytic(p, -1.2, 1.2, 0.0, 0.5, 9, 4) < 1e-12);
}

TEST_CASE("eulerian total mass equals the mass-domain length") {
    const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
    const double edge = 1e-6;
    const double expected = (p.mass_hi() - p.mass_lo()) - 2 * edge;
    for (double t : {0.0, 0.45, 0.9})
        CHECK(eulerian_total_mass(p, t, edge) == doctest::Approx(expected).epsilon(1e-8));
}

}  // TEST_SUITE
