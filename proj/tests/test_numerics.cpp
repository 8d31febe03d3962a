#include "doctest.h"

#include <cmath>
#include <complex>

#include "granular/chebyshev.hpp"
#include "granular/eigen.hpp"
#include "granular/fit.hpp"
#include "granular/linalg.hpp"
#include "granular/ode.hpp"
#include "granular/quadrature.hpp"
#include "granular/rootfind.hpp"

using namespace granular;

TEST_SUITE("numerics") {

TEST_CASE("gauss-legendre integrates polynomials and smooth functions") {
    CHECK(integrate_gl([](double x) { return x * x * x * x * x; }, 0, 1, 10) ==
          doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(integrate_gl([](double x) { return std::sin(x); }, 0, M_PI, 32) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0, 1, 1e-13) ==
          doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
    CHECK(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-4); }, 0, 1, 1e-11) ==
          doctest::Approx(2 * (std::sqrt(1 + 1e-4) - std::sqrt(1e-4))).epsilon(1e-9));
}

TEST_CASE("root finding") {
    CHECK(find_root([](double x) { return std::cos(x); }, 0, 3) ==
          doctest::Approx(M_PI / 2).epsilon(1e-11));
    CHECK(find_root([](double x) { return std::cos(x); }, 0, 3, 1e-14) ==
          doctest::Approx(M_PI / 2).epsilon(1e-13));
    CHECK(find_root_expanding([](double x) { return x * x - 9; }, 0, 1) ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(find_root([](double x) { return 1 + x * x; }, 0, 1), std::invalid_argument);
}

TEST_CASE("chebyshev interpolation and antiderivative") {
    Chebyshev c([](double x) { return std::exp(x); }, -1, 2, 40);
    CHECK(c(0.37) == doctest::Approx(std::exp(0.37)).epsilon(1e-13));
    Chebyshev F = c.antiderivative();
    CHECK(F(2.0) == doctest::Approx(std::exp(2.0) - std::exp(-1.0)).epsilon(1e-12));
    CHECK(F(-1.0) == doctest::Approx(0.0).epsilon(1e-13));
    Chebyshev s([](double x) { return std::sin(3 * x); }, 0, 2, 48);
    Chebyshev Fs = s.antiderivative();
    CHECK(Fs(1.5) == doctest::Approx((1 - std::cos(4.5)) / 3).epsilon(1e-12));
}

TEST_CASE("line fit recovers slope") {
    std::vector<double> x{1, 2, 3, 4}, y;
    for (double xi : x) y.push_back(-2.5 * xi + 0.75);
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.5).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("symmetric eigenvalues via jacobi") {
    Mat m(2);
    m(0, 0) = 2; m(0, 1) = 1; m(1, 0) = 1; m(1, 1) = 2;
    auto ev = sym_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));
    Mat k(3);
    k(0, 0) = 4; k(1, 1) = 1; k(2, 2) = -2; k(0, 2) = 0.5; k(2, 0) = 0.5;
    auto ev3 = sym_eigenvalues(k);
    CHECK(ev3.front() == doctest::Approx(-2.0413812651491097).epsilon(1e-10));
    CHECK(ev3.back() == doctest::Approx(4.0413812651491097).epsilon(1e-10));
}

TEST_CASE("dense eigensolver handles real, zero and complex spectra") {
    DenseMatrix d(4);
    d(0, 0) = 4; d(1, 1) = 3; d(2, 2) = 2; d(3, 3) = 1;
    d(0, 1) = 5; d(1, 2) = -2; d(0, 3) = 7;
    auto ev = eigenvalues_sorted(d);
    CHECK(ev[0].real() == doctest::Approx(4).epsilon(1e-12));
    CHECK(ev[3].real() == doctest::Approx(1).epsilon(1e-12));

    DenseMatrix rot(2);  // eigenvalues +-i
    rot(0, 1) = -1; rot(1, 0) = 1;
    auto evc = eigenvalues_sorted(rot);
    CHECK(evc[0].real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(evc[0].imag()) == doctest::Approx(1.0).epsilon(1e-12));

    DenseMatrix nil(3);  // nilpotent: all eigenvalues zero
    nil(0, 1) = 1; nil(1, 2) = 1;
    for (const auto& z : eigenvalues_sorted(nil)) CHECK(std::abs(z) < 1e-5);

    // lower-triangular block pattern of the resonance matrices
    DenseMatrix r(4);
    r(0, 0) = 1; r(0, 1) = 4; r(1, 1) = -1;
    r(2, 0) = 1; r(2, 1) = 2; r(3, 0) = 1;
    auto evr = eigenvalues_sorted(r);
    CHECK(evr[0].real() == doctest::Approx(1).epsilon(1e-11));
    CHECK(evr[1].real() == doctest::Approx(0).epsilon(1e-11));
    CHECK(evr[2].real() == doctest::Approx(0).epsilon(1e-11));
    CHECK(evr[3].real() == doctest::Approx(-1).epsilon(1e-11));
}

TEST_CASE("rk45 basic accuracy and dense output") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) { dy[0] = -y[0]; };
    OdeOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    const auto tr = integrate_ode(rhs, 0, {1.0}, 5.0, opt);
    CHECK(tr.termination == Termination::ReachedFinalTime);
    CHECK(tr.last_state()[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-10));
    CHECK(tr.sample(1.7)[0] == doctest::Approx(std::exp(-1.7)).epsilon(1e-8));
}

TEST_CASE("rk45 lands exactly on forced times") {
    auto rhs = [](double t, const std::vector<double>&, std::vector<double>& dy) {
        dy[0] = std::cos(t);
    };
    OdeOptions opt;
    opt.force_times = {0.3, 1.1, 2.7};
    const auto tr = integrate_ode(rhs, 0, {0.0}, 3.0, opt);
    for (double ft : opt.force_times) {
        bool hit = false;
        for (double t : tr.t)
            if (t == ft) hit = true;
        CHECK(hit);
    }
}

TEST_CASE("rk45 detects blow-up of y' = y^2 and refines the time") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[0] * y[0];
    };
    OdeOptions opt;
    opt.rtol = 1e-10;
    const auto tr = integrate_ode(rhs, 0, {2.0}, 10.0, opt);
    CHECK(tr.termination == Termination::BlowUpDetected);
    CHECK(tr.t_estimate == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("rk45 reports a positivity crossing") {
    auto rhs = [](double, const std::vector<double>&, std::vector<double>& dy) { dy[0] = -1.0; };
    OdeOptions opt;
    opt.positive_index = 0;
    const auto tr = integrate_ode(rhs, 0, {1.0}, 10.0, opt);
    CHECK(tr.termination == Termination::PhiNonPositive);
    CHECK(tr.t_estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rk45 flags stiffness without growth as step underflow") {
    auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -1e14 * y[0];
    };
    OdeOptions opt;
    opt.min_step = 1e-9;
    opt.h_init = 1.0;
    const auto tr = integrate_ode(rhs, 0, {1.0}, 10.0, opt);
    CHECK(tr.termination == Termination::StepUnderflow);
}

}  // TEST_SUITE
