// balance.hpp — leading-order power-law analysis of the isotropic coefficient
// system near a movable singularity.
//
// The isotropic system in x = (phi, alpha1, a, C) is polynomial, so it is held
// here as a list of monomial terms.  Given exponents s, the quasihomogeneous
// truncation keeps exactly the terms of weight s_i - 1 in equation i; a
// balance (lambda, s) makes x_i = lambda_i (t*-t)^{s_i} an exact solution of
// the truncated system.  Resonances are the eigenvalues of
//   R = -Df_trunc(lambda) - diag(s),
// the positions at which free constants enter the local series.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "granular/core.hpp"
#include "granular/eigen.hpp"

namespace granular {

struct Balance {
    std::vector<double> s;       // exponents, state order (phi, alpha1, a, C)
    std::vector<double> lambda;  // leading coefficients
    double t_star = 0;
};

struct ResonanceReport {
    DenseMatrix matrix_R{4};
    std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
};

namespace balance_detail {

struct Monomial {
    double coef;
    int pow[4];
};

using System = std::array<std::vector<Monomial>, 4>;

inline System isotropic_system(const ModelParams& p) {
    const double n = p.dim, g = p.gamma, L = p.lambda;
    System f;
    f[0] = {{-0.5 * n * (g + 1), {1, 1, 0, 0}}, {-0.5 * L, {2, 0, 0, 0}}};
    f[1] = {{-1.0, {0, 2, 0, 0}}, {-1.0, {0, 0, 1, 0}}};
    f[2] = {{-(2.0 + n * (g - 1)), {0, 1, 1, 0}}, {-L, {1, 0, 1, 0}}};
    f[3] = {{-n * (g - 1), {0, 1, 0, 1}}, {-L, {1, 0, 0, 1}}};
    return f;
}

// weight of a monomial under exponents s: sum_j pow_j * s_j
inline double weight(const Monomial& m, const std::vector<double>& s) {
    double w = 0;
    for (int j = 0; j < 4; ++j) w += m.pow[j] * s[j];
    return w;
}

inline System truncate(const System& f, const std::vector<double>& s) {
    System t;
    for (int i = 0; i < 4; ++i)
        for (const Monomial& m : f[i])
            if (std::abs(weight(m, s) - (s[i] - 1.0)) < 1e-9) t[i].push_back(m);
    return t;
}

inline double eval_term(const Monomial& m, const double x[4]) {
    double v = m.coef;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < m.pow[j]; ++k) v *= x[j];
    return v;
}

inline void eval_system(const System& f, const double x[4], double out[4]) {
    for (int i = 0; i < 4; ++i) {
        out[i] = 0;
        for (const Monomial& m : f[i]) out[i] += eval_term(m, x);
    }
}

inline DenseMatrix jacobian(const System& f, const double x[4]) {
    DenseMatrix J(4);
    for (int i = 0; i < 4; ++i)
        for (const Monomial& m : f[i])
            for (int j = 0; j < 4; ++j) {
                if (m.pow[j] == 0) continue;
                double v = m.coef * m.pow[j];
                for (int k = 0; k < 4; ++k) {
                    const int pw = m.pow[k] - (k == j ? 1 : 0);
                    for (int q = 0; q < pw; ++q) v *= x[k];
                }
                J(i, j) += v;
            }
    return J;
}

}  // namespace balance_detail

// The contracting balance behind the finite-time blow-up statement:
//   s = (-1, -1, 2(n-2), 2(n-1)),
//   lambda = ((n(gamma+1)-2)/lambda, -1, A0, C0).
// The sign of the phi coefficient is the one forced by substitution into the
// truncated system (truncation_residual vanishes only with the plus sign;
// see the companion discrepancy test for the flipped variant).
inline Balance blowup_balance_isotropic(const ModelParams& p, double t_star, double A0 = 1.0,
                                        double C0 = 1.0) {
    const double m = p.dim * (p.gamma + 1.0) - 2.0;
    if (std::abs(m) < 1e-12)
        throw std::domain_error("blowup_balance_isotropic: degenerate balance n(gamma+1) = 2");
    Balance b;
    b.s = {-1.0, -1.0, 2.0 * (p.dim - 2.0), 2.0 * (p.dim - 1.0)};
    b.lambda = {m / p.lambda, -1.0, A0, C0};
    b.t_star = t_star;
    return b;
}

// Same exponents with the phi coefficient sign flipped; not a valid balance,
// provided so tests can demonstrate the failure by substitution.
inline Balance blowup_balance_isotropic_flipped_sign(const ModelParams& p, double t_star,
                                                     double A0 = 1.0, double C0 = 1.0) {
    Balance b = blowup_balance_isotropic(p, t_star, A0, C0);
    b.lambda[0] = -b.lambda[0];
    return b;
}

// Exponent/coefficient set of the 1D exact family; for these weights the
// truncation keeps every term, which is why the family solves the full system.
inline Balance family_balance_1d(const ModelParams& p, double alpha0, double C0, double t_star) {
    if (p.dim != 1) throw std::invalid_argument("family_balance_1d: requires n = 1");
    Balance b;
    b.s = {-1.0, -1.0, -2.0, -2.0 * (alpha0 + 1.0)};
    b.lambda = {-(2.0 + (p.gamma + 1.0) * alpha0) / p.lambda, alpha0, -alpha0 * (alpha0 + 1.0), C0};
    b.t_star = t_star;
    return b;
}

// Substitutes lambda (t*-t)^s into the truncated system at time t and returns
// the per-equation defect d/dt[lambda tau^s] - f_trunc.
inline std::vector<double> truncation_residual(const ModelParams& p, const Balance& b, double t) {
    using namespace balance_detail;
    if (!(t < b.t_star)) throw std::domain_error("truncation_residual: need t < t_star");
    const double tau = b.t_star - t;
    const System trunc = truncate(isotropic_system(p), b.s);
    double x[4], f[4];
    for (int i = 0; i < 4; ++i) x[i] = b.lambda[i] * std::pow(tau, b.s[i]);
    eval_system(trunc, x, f);
    std::vector<double> r(4);
    for (int i = 0; i < 4; ++i)
        r[i] = -b.lambda[i] * b.s[i] * std::pow(tau, b.s[i] - 1.0) - f[i];
    return r;
}

// Resonance matrix and its spectrum for a balance of the isotropic system.
inline ResonanceReport resonances(const ModelParams& p, const Balance& b) {
    using namespace balance_detail;
    const System trunc = truncate(isotropic_system(p), b.s);
    double lam[4] = {b.lambda[0], b.lambda[1], b.lambda[2], b.lambda[3]};
    DenseMatrix J = jacobian(trunc, lam);
    ResonanceReport rep;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rep.matrix_R(i, j) = -J(i, j) - (i == j ? b.s[i] : 0.0);
    rep.eigenvalues = eigenvalues_sorted(rep.matrix_R);
    return rep;
}

// Truncated vector field itself (used by tests to confirm the resonance
// exponent dynamically, independent of the matrix route).
inline void truncated_rhs(const ModelParams& p, const Balance& b, const double x[4], double out[4]) {
    using namespace balance_detail;
    const System trunc = truncate(isotropic_system(p), b.s);
    eval_system(trunc, x, out);
}

}  // namespace granular
