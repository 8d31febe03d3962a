// fit.hpp — linear least squares, used for singularity-exponent estimates.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace granular {

struct LineFit {
    double intercept = 0;
    double slope = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 matched samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0, sxy = 0;  // centered sums, stable for clustered abscissae
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

}  // namespace granular
