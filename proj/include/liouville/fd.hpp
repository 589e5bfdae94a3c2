#pragma once

// Finite-difference stencils for radial operators.
//
// On log-uniform grids the radial Laplacian is evaluated through the chain
// rule: with dots denoting d/d(log r),
//   Delta w = (w'' + (n-1)/r w') = (ddot{w} + (n-2) dot{w}) / r^2,
// using 4th-order central differences in log r.  A separate linear-stencil
// evaluator with even extension across r = 0 serves as an independent check
// for smooth closed-form inputs.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "grid.hpp"

namespace liouville {

struct LogDerivatives {
    double d1 = 0.0;  // d/d(log r)
    double d2 = 0.0;  // d^2/d(log r)^2
};

// 4th-order central differences at interior index i (2 <= i <= N-3).
inline LogDerivatives log_derivatives(const std::vector<double>& ys, std::size_t i, double h) {
    if (i < 2 || i + 2 >= ys.size())
        throw std::invalid_argument("log_derivatives: index too close to the boundary");
    LogDerivatives d;
    d.d1 = (-ys[i + 2] + 8.0 * ys[i + 1] - 8.0 * ys[i - 1] + ys[i - 2]) / (12.0 * h);
    d.d2 = (-ys[i + 2] + 16.0 * ys[i + 1] - 30.0 * ys[i] + 16.0 * ys[i - 1] - ys[i - 2]) /
           (12.0 * h * h);
    return d;
}

// Radial Laplacian in n dimensions at grid node i of a log-tabulated function.
inline double radial_laplacian_log(const LogGrid& grid, const std::vector<double>& ys,
                                   std::size_t i, int n) {
    const LogDerivatives d = log_derivatives(ys, i, grid.step);
    const double r = grid.xs[i];
    return (d.d2 + double(n - 2) * d.d1) / (r * r);
}

// Radial Laplacian of a callable at radius r via a linear 5-point stencil
// with even extension across r = 0; at r = 0 it reduces to n * g''(0).
template <class F>
double radial_laplacian_fd(F&& g, double r, int n, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("radial_laplacian_fd: need h > 0");
    if (!(r >= 0.0)) throw std::invalid_argument("radial_laplacian_fd: need r >= 0");
    auto ge = [&](double x) { return g(std::abs(x)); };
    const double gm2 = ge(r - 2.0 * h), gm1 = ge(r - h), g0 = ge(r), gp1 = ge(r + h),
                 gp2 = ge(r + 2.0 * h);
    const double d2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * h * h);
    if (r == 0.0) return double(n) * d2;
    const double d1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * h);
    return d2 + double(n - 1) / r * d1;
}

// k-fold radial Laplacian of a callable, each level by finite differences.
// Accuracy degrades with k; intended for cross-checks with generous
// tolerances, not production evaluation.
inline double radial_polyharmonic_fd(std::function<double(double)> g, double r, int n, int k,
                                     double h) {
    if (k < 1) throw std::invalid_argument("radial_polyharmonic_fd: need k >= 1");
    std::function<double(double)> cur = std::move(g);
    for (int level = 1; level < k; ++level) {
        auto prev = cur;
        cur = [prev, n, h](double x) { return radial_laplacian_fd(prev, x, n, h); };
    }
    return radial_laplacian_fd(cur, r, n, h);
}

}  // namespace liouville
