// eigen.hpp — dense real eigenvalue solver (Hessenberg + Francis QR) for the
// small matrices arising from resonance analysis.  No symmetry is assumed;
// complex conjugate pairs are returned as such.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace granular {

class DenseMatrix {
  public:
    explicit DenseMatrix(int n = 0) : n_(n), a_(std::size_t(n) * n, 0.0) {}
    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[std::size_t(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * n_ + j]; }

  private:
    int n_;
    std::vector<double> a_;
};

namespace detail {

// similarity transform by the 3 (or 2) row Householder annihilating (x,y,z)
inline void apply_householder(DenseMatrix& h, int k, double x, double y, double z, int len) {
    const int n = h.size();
    double v[3] = {x, y, z};
    double nrm = std::sqrt(x * x + y * y + z * z);
    if (nrm == 0) return;
    v[0] += (x >= 0 ? nrm : -nrm);
    double vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (vv == 0) return;
    for (int j = 0; j < n; ++j) {  // H <- P H
        double s = 0;
        for (int r = 0; r < len; ++r) s += v[r] * h(k + r, j);
        s *= 2.0 / vv;
        for (int r = 0; r < len; ++r) h(k + r, j) -= s * v[r];
    }
    for (int i = 0; i < n; ++i) {  // H <- H P
        double s = 0;
        for (int r = 0; r < len; ++r) s += h(i, k + r) * v[r];
        s *= 2.0 / vv;
        for (int r = 0; r < len; ++r) h(i, k + r) -= s * v[r];
    }
}

inline void hessenberg(DenseMatrix& h) {
    const int n = h.size();
    for (int k = 1; k + 1 < n; ++k) {
        // annihilate column k-1 below row k
        for (int i = k + 1; i < n; ++i) {
            // use Givens rotations; simple and stable for small n
            const double a = h(k, k - 1), b = h(i, k - 1);
            if (b == 0) continue;
            const double r = std::hypot(a, b), c = a / r, s = b / r;
            for (int j = 0; j < n; ++j) {
                const double t1 = h(k, j), t2 = h(i, j);
                h(k, j) = c * t1 + s * t2;
                h(i, j) = -s * t1 + c * t2;
            }
            for (int j = 0; j < n; ++j) {
                const double t1 = h(j, k), t2 = h(j, i);
                h(j, k) = c * t1 + s * t2;
                h(j, i) = -s * t1 + c * t2;
            }
        }
    }
}

inline void eig2x2(double a, double b, double c, double d, std::vector<std::complex<double>>& out) {
    const double mu = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + b * c;
    if (disc >= 0) {
        const double q = std::sqrt(disc);
        out.emplace_back(mu + q, 0.0);
        out.emplace_back(mu - q, 0.0);
    } else {
        const double q = std::sqrt(-disc);
        out.emplace_back(mu, q);
        out.emplace_back(mu, -q);
    }
}

}  // namespace detail

inline std::vector<std::complex<double>> eigenvalues(DenseMatrix h) {
    using namespace detail;
    const int n = h.size();
    std::vector<std::complex<double>> ev;
    if (n == 0) return ev;
    if (n == 1) return {std::complex<double>(h(0, 0), 0.0)};
    hessenberg(h);

    double anorm = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) anorm += std::abs(h(i, j));
    const double tiny = 1e-300 + 1e-16 * anorm;

    int m = n - 1;
    int total_iter = 0;
    while (m >= 0) {
        if (++total_iter > 5000) throw std::runtime_error("eigenvalues: QR iteration stalled");
        // locate the active block [l..m]
        int l = m;
        while (l > 0) {
            const double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (std::abs(h(l, l - 1)) <= 1e-15 * s + tiny) {
                h(l, l - 1) = 0;
                break;
            }
            --l;
        }
        if (l == m) {
            ev.emplace_back(h(m, m), 0.0);
            --m;
            continue;
        }
        if (l == m - 1) {
            eig2x2(h(l, l), h(l, m), h(m, l), h(m, m), ev);
            m -= 2;
            continue;
        }
        // Francis double shift from the trailing 2x2 of the block
        double sh = h(m - 1, m - 1) + h(m, m);
        double det = h(m - 1, m - 1) * h(m, m) - h(m - 1, m) * h(m, m - 1);
        if (total_iter % 17 == 0) {  // exceptional shift
            const double w = std::abs(h(m, m - 1)) + std::abs(h(m - 1, m - 2));
            sh = 2 * w;
            det = w * w;
        }
        double x = h(l, l) * h(l, l) + h(l, l + 1) * h(l + 1, l) - sh * h(l, l) + det;
        double y = h(l + 1, l) * (h(l, l) + h(l + 1, l + 1) - sh);
        double z = (l + 2 <= m) ? h(l + 2, l + 1) * h(l + 1, l) : 0.0;
        for (int k = l; k <= m - 1; ++k) {
            const int len = (k + 2 <= m) ? 3 : 2;
            apply_householder(h, k, x, y, (len == 3 ? z : 0.0), len);
            if (k + 1 <= m - 1) {
                x = h(k + 1, k);
                y = h(k + 2, k);
                z = (k + 3 <= m) ? h(k + 3, k) : 0.0;
            }
        }
    }
    return ev;
}

inline std::vector<std::complex<double>> eigenvalues_sorted(const DenseMatrix& m) {
    auto ev = eigenvalues(m);
    std::sort(ev.begin(), ev.end(), [](const auto& p, const auto& q) {
        if (p.real() != q.real()) return p.real() > q.real();
        return p.imag() > q.imag();
    });
    return ev;
}

}  // namespace granular
