// core.hpp — model parameters, gas-state samples, and the two closed-form
// building blocks shared by every solution family: the homogeneous cooling
// law and the scalar constraint multiplier phi(t).
//
// All quantities are dimensionless (gas constant fixed to 1) in double
// precision.  Types are immutable values and the operations are pure.
#pragma once

#include <cmath>
#include <stdexcept>

#include "granular/linalg.hpp"

namespace granular {

struct ModelParams {
    double gamma;   // adiabatic index
    double lambda;  // dissipation constant, > 0
    int dim;        // spatial dimension n >= 1

    ModelParams(double gamma_, double lambda_, int dim_)
        : gamma(gamma_), lambda(lambda_), dim(dim_) {
        if (!(lambda > 0)) throw std::invalid_argument("ModelParams: lambda must be positive");
        if (dim < 1) throw std::invalid_argument("ModelParams: dim must be >= 1");
    }
};

struct GasSample {
    double rho;  // density, > 0
    Vec v;       // velocity
    double T;    // temperature, >= 0 (zero occurs at a vanishing middle state)

    GasSample(double rho_, Vec v_, double T_) : rho(rho_), v(v_), T(T_) {
        if (!(rho > 0)) throw std::invalid_argument("GasSample: rho must be positive");
        if (T < 0) throw std::invalid_argument("GasSample: T must be nonnegative");
    }
    double pressure() const { return rho * T; }
};

struct HaffParams {
    double rho0;  // constant density
    double T0;    // initial temperature

    HaffParams(double rho0_, double T0_) : rho0(rho0_), T0(T0_) {
        if (!(rho0 > 0) || !(T0 > 0)) throw std::invalid_argument("HaffParams: need rho0, T0 > 0");
    }
};

// Homogeneous cooling state: T(t) = (lambda*rho0*t/2 + T0^{-1/2})^{-2}.
inline double haff_temperature(const ModelParams& p, const HaffParams& h, double t) {
    if (t < 0) throw std::domain_error("haff_temperature: t must be >= 0");
    const double r = 0.5 * p.lambda * h.rho0 * t + 1.0 / std::sqrt(h.T0);
    return 1.0 / (r * r);
}

// Solution of phi' = -(lambda/2) phi^2:  phi(t) = (lambda*t/2 + 1/phi0)^{-1}.
inline double phi_closed_form(const ModelParams& p, double phi0, double t) {
    if (!(phi0 > 0)) throw std::domain_error("phi_closed_form: phi0 must be positive");
    if (t < 0) throw std::domain_error("phi_closed_form: t must be >= 0");
    return 1.0 / (0.5 * p.lambda * t + 1.0 / phi0);
}

// Constraint variable z = rho - phi * T^{-1/2}; z = 0 picks the solution
// class in which density and temperature are slaved through phi.
inline double constraint_z(double phi, const GasSample& s) {
    if (!(s.T > 0)) throw std::domain_error("constraint_z: requires T > 0");
    return s.rho - phi / std::sqrt(s.T);
}

}  // namespace granular
