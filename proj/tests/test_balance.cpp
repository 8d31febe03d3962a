#include "doctest.h"

#include <cmath>

#include "granular/balance.hpp"
#include "granular/fit.hpp"
#include "granular/ode.hpp"

using namespace granular;

TEST_SUITE("balance") {

TEST_CASE("blow-up balance coefficients and exponents") {
    const Balance b21 = blowup_balance_isotropic(ModelParams(1.0, 1.0, 2), 1.0);
    CHECK(b21.lambda[0] == doctest::Approx(2.0).epsilon(1e-15));  // (n(gamma+1)-2)/lambda
    CHECK(b21.lambda[1] == doctest::Approx(-1.0));
    CHECK(b21.s[0] == doctest::Approx(-1.0));
    CHECK(b21.s[1] == doctest::Approx(-1.0));
    CHECK(b21.s[2] == doctest::Approx(0.0));
    CHECK(b21.s[3] == doctest::Approx(2.0));

    const Balance b353 = blowup_balance_isotropic(ModelParams(5.0 / 3.0, 1.0, 3), 1.0);
    CHECK(b353.s[2] == doctest::Approx(2.0));
    CHECK(b353.s[3] == doctest::Approx(4.0));
    CHECK(b353.lambda[0] == doctest::Approx(6.0).epsilon(1e-14));

    // degenerate when n(gamma+1) = 2
    CHECK_THROWS_AS(blowup_balance_isotropic(ModelParams(0.0, 1.0, 2), 1.0), std::domain_error);
}

TEST_CASE("truncation residual vanishes for the derived sign and not for the flipped one") {
    for (const auto& [n, gamma] : std::vector<std::pair<int, double>>{{2, 1.0}, {2, 5.0 / 3.0},
                                                                      {3, 5.0 / 3.0}, {3, 2.0}}) {
        const ModelParams p(gamma, 1.0, n);
        const Balance good = blowup_balance_isotropic(p, 1.0, 0.8, 1.3);
        const auto r = truncation_residual(p, good, 0.5);
        for (double ri : r) CHECK(std::abs(ri) < 1e-12);

        const Balance bad = blowup_balance_isotropic_flipped_sign(p, 1.0, 0.8, 1.3);
        const auto rb = truncation_residual(p, bad, 0.5);
        CHECK(std::abs(rb[0]) > 0.1);  // the phi equation exposes the sign
    }
}

TEST_CASE("zero coefficients satisfy the truncated system trivially") {
    const ModelParams p(5.0 / 3.0, 1.0, 2);
    Balance b = blowup_balance_isotropic(p, 1.0);
    b.lambda = {0, 0, 0, 0};
    for (double ri : truncation_residual(p, b, 0.25)) CHECK(ri == doctest::Approx(0.0));
}

TEST_CASE("resonance matrix: analytic jacobian matches finite differences") {
    const ModelParams p(5.0 / 3.0, 1.3, 2);
    const Balance b = blowup_balance_isotropic(p, 1.0, 0.7, 1.1);
    const ResonanceReport rep = resonances(p, b);

    // finite-difference jacobian of the truncated field at lambda
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
        double xp[4], xm[4], fp[4], fm[4];
        for (int k = 0; k < 4; ++k) xp[k] = xm[k] = b.lambda[k];
        xp[j] += h;
        xm[j] -= h;
        truncated_rhs(p, b, xp, fp);
        truncated_rhs(p, b, xm, fm);
        for (int i = 0; i < 4; ++i) {
            const double fd = (fp[i] - fm[i]) / (2 * h);
            const double analytic = -(rep.matrix_R(i, j) + (i == j ? b.s[i] : 0.0));
            CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("resonance spectrum of the blow-up balance") {
    // Eigensolving R = -Df(lambda) - diag(s) gives ((n(gamma+1)-2)/2, -1, 0, 0).
    // The first entry is half of n(gamma+1)-2; the closed-form general solution
    // of the truncated pair confirms the half (see the dynamical test below).
    for (const auto& [n, gamma] : std::vector<std::pair<int, double>>{{2, 1.0}, {3, 5.0 / 3.0},
                                                                      {2, 5.0 / 3.0}}) {
        const ModelParams p(gamma, 1.0, n);
        const double m = n * (gamma + 1) - 2;
        const ResonanceReport rep = resonances(p, blowup_balance_isotropic(p, 1.0));
        REQUIRE(rep.eigenvalues.size() == 4);
        for (const auto& z : rep.eigenvalues) CHECK(std::abs(z.imag()) < 1e-10);
        CHECK(rep.eigenvalues[0].real() == doctest::Approx(0.5 * m).epsilon(1e-10));
        CHECK(rep.eigenvalues[1].real() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(rep.eigenvalues[2].real() == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(rep.eigenvalues[3].real() == doctest::Approx(-1.0).epsilon(1e-10));
    }
}

TEST_CASE("dynamical confirmation of the leading resonance exponent") {
    // Perturb the balance and fit the decay order of the deviation of 1/phi
    // from its leading form; the arbitrary constant enters at relative order
    // tau^{(n(gamma+1)-2)/2} on top of the tau^{-1} leading term.
    const int n = 2;
    const double gamma = 5.0 / 3.0, lambda = 1.0, t_star = 1.0;
    const ModelParams p(gamma, lambda, n);
    const Balance b = blowup_balance_isotropic(p, t_star);
    const double m = n * (gamma + 1) - 2;  // 10/3

    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        double x[4] = {y[0], y[1], y[2], y[3]}, f[4];
        truncated_rhs(p, b, x, f);
        dy.assign(f, f + 4);
    };
    // start on the perturbed solution at tau0 = 0.9: u = 1/phi = lambda tau/m + K tau^{1+m/2}
    const double tau0 = 0.9, K = 0.05;
    const double u0 = lambda * tau0 / m + K * std::pow(tau0, 1 + 0.5 * m);
    std::vector<double> y0 = {1.0 / u0, -1.0 / tau0, 1.0 * std::pow(tau0, 2.0 * (n - 2)),
                              1.0 * std::pow(tau0, 2.0 * (n - 1))};
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    std::vector<double> taus = {0.5, 0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
    std::vector<double> lx, ly;
    for (double tau : taus) {
        const auto tr = integrate_ode(rhs, t_star - tau0, y0, t_star - tau, opt);
        const double u = 1.0 / tr.last_state()[0];
        const double dev = u - lambda * tau / m;
        REQUIRE(dev > 0);
        lx.push_back(std::log(tau));
        ly.push_back(std::log(dev));
    }
    const double slope = fit_line(lx, ly).slope;  // expect 1 + m/2 = 8/3
    CHECK(slope == doctest::Approx(1.0 + 0.5 * m).epsilon(0.01));
}

TEST_CASE("1d family balance solves the full system and carries resonances -1, 0") {
    const ModelParams p(2.0, 1.0, 1);
    const double alpha0 = -0.8, C0 = 1.0;
    const Balance b = family_balance_1d(p, alpha0, C0, 1.0);
    // the truncation keeps all terms for these weights, so the residual
    // vanishing means the family solves the full system
    for (double t : {0.0, 0.4, 0.8})
        for (double ri : truncation_residual(p, b, t)) CHECK(std::abs(ri) < 1e-11);

    const ResonanceReport rep = resonances(p, b);
    std::vector<double> re;
    for (const auto& z : rep.eigenvalues) {
        // the double zero can split into a conjugate pair of size sqrt(eps)
        CHECK(std::abs(z.imag()) < 1e-6);
        re.push_back(z.real());
    }
    // frozen from the eigensolve of the analytic matrix: {-(2 alpha0+1), 0, 0, -1}
    CHECK(re[0] == doctest::Approx(-(2 * alpha0 + 1)).epsilon(1e-9));
    CHECK(std::abs(re[1]) < 1e-6);
    CHECK(std::abs(re[2]) < 1e-6);
    CHECK(re[3] == doctest::Approx(-1.0).epsilon(1e-9));
}

}  // TEST_SUITE
