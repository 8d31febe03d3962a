// chebyshev.hpp — Chebyshev interpolation on an interval, with antiderivative.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace granular {

// Interpolant through the N+1 Chebyshev–Lobatto points of [a, b].  Geometric
// convergence for functions analytic on the closed interval.
class Chebyshev {
  public:
    Chebyshev() = default;

    Chebyshev(const std::function<double(double)>& f, double a, double b, int degree)
        : a_(a), b_(b), coef_(degree + 1, 0.0) {
        const int n = degree;
        std::vector<double> fv(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double x = std::cos(M_PI * j / n);
            fv[j] = f(0.5 * (a + b) + 0.5 * (b - a) * x);
        }
        // discrete cosine transform (direct sums; n stays small here)
        for (int k = 0; k <= n; ++k) {
            double s = 0.5 * (fv[0] + (k % 2 == 0 ? fv[n] : -fv[n]));
            for (int j = 1; j < n; ++j) s += fv[j] * std::cos(M_PI * k * j / n);
            coef_[k] = 2.0 * s / n;
        }
        coef_[0] *= 0.5;
        coef_[n] *= 0.5;
    }

    double operator()(double x) const {
        const double u = (2 * x - a_ - b_) / (b_ - a_);
        // Clenshaw
        double b1 = 0, b2 = 0;
        for (int k = int(coef_.size()) - 1; k >= 1; --k) {
            const double t = 2 * u * b1 - b2 + coef_[k];
            b2 = b1;
            b1 = t;
        }
        return u * b1 - b2 + coef_[0];
    }

    // Antiderivative with F(a) = 0.
    Chebyshev antiderivative() const {
        const int n = int(coef_.size()) - 1;
        Chebyshev F;
        F.a_ = a_;
        F.b_ = b_;
        F.coef_.assign(n + 2, 0.0);
        const double scale = 0.5 * (b_ - a_);
        auto c = [&](int k) { return k <= n ? coef_[k] : 0.0; };
        F.coef_[1] = scale * (c(0) - 0.5 * c(2));
        for (int k = 2; k <= n + 1; ++k)
            F.coef_[k] = scale * (c(k - 1) - c(k + 1)) / (2.0 * k);
        F.coef_[0] = 0;
        F.coef_[0] = -F(a_);
        return F;
    }

    double lo() const { return a_; }
    double hi() const { return b_; }

  private:
    double a_ = -1, b_ = 1;
    std::vector<double> coef_;
};

}  // namespace granular
