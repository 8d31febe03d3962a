// linalg.hpp — small dense vectors/matrices for spatial dimension n <= 3.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace granular {

struct Vec {
    int n = 0;
    std::array<double, 3> a{};

    Vec() = default;
    explicit Vec(int dim, double fill = 0.0) : n(dim) { a.fill(fill); }
    Vec(std::initializer_list<double> xs) : n(int(xs.size())) {
        int i = 0;
        for (double x : xs) a[i++] = x;
    }
    double& operator[](int i) { return a[i]; }
    double operator[](int i) const { return a[i]; }
};

struct Mat {
    int n = 0;
    std::array<double, 9> a{};  // row major

    Mat() = default;
    explicit Mat(int dim, double fill = 0.0) : n(dim) { a.fill(fill); }
    static Mat identity(int dim, double scale = 1.0) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = scale;
        return m;
    }
    double& operator()(int i, int j) { return a[3 * i + j]; }
    double operator()(int i, int j) const { return a[3 * i + j]; }
};

inline Vec operator+(Vec x, const Vec& y) { for (int i = 0; i < x.n; ++i) x[i] += y[i]; return x; }
inline Vec operator-(Vec x, const Vec& y) { for (int i = 0; i < x.n; ++i) x[i] -= y[i]; return x; }
inline Vec operator*(double s, Vec x) { for (int i = 0; i < x.n; ++i) x[i] *= s; return x; }
inline Mat operator+(Mat x, const Mat& y) { for (int i = 0; i < 9; ++i) x.a[i] += y.a[i]; return x; }
inline Mat operator-(Mat x, const Mat& y) { for (int i = 0; i < 9; ++i) x.a[i] -= y.a[i]; return x; }
inline Mat operator*(double s, Mat x) { for (int i = 0; i < 9; ++i) x.a[i] *= s; return x; }

inline double dot(const Vec& x, const Vec& y) {
    double s = 0;
    for (int i = 0; i < x.n; ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) y[i] += m(i, j) * x[j];
    return y;
}

inline Mat matmul(const Mat& x, const Mat& y) {
    Mat z(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k)
            for (int j = 0; j < x.n; ++j) z(i, j) += x(i, k) * y(k, j);
    return z;
}

inline Mat transpose(const Mat& m) {
    Mat t(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) t(i, j) = m(j, i);
    return t;
}

inline double trace(const Mat& m) {
    double s = 0;
    for (int i = 0; i < m.n; ++i) s += m(i, i);
    return s;
}

inline Mat symmetrize(const Mat& m) {
    Mat s(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

inline double max_abs(const Mat& m) {
    double s = 0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s = std::max(s, std::abs(m(i, j)));
    return s;
}

inline double max_abs(const Vec& v) {
    double s = 0;
    for (int i = 0; i < v.n; ++i) s = std::max(s, std::abs(v[i]));
    return s;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> sym_eigenvalues(Mat m) {
    const int n = m.n;
    if (n == 1) return {m(0, 0)};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30 * (1.0 + max_abs(m) * max_abs(m))) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                Mat r = Mat::identity(n);
                r(p, p) = c; r(q, q) = c; r(p, q) = s; r(q, p) = -s;
                m = matmul(transpose(r), matmul(m, r));
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace granular
