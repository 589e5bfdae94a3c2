#pragma once

// Small numeric helpers shared across the library: sphere measures,
// log-spaced sampling, least-squares fits, extremum scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace liouville {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Gamma(x) for half-integer arguments, x = twice_x / 2, twice_x >= 1.
// Recursion from Gamma(1/2) = sqrt(pi), Gamma(1) = 1.
inline double gamma_half_integer(int twice_x) {
    if (twice_x < 1) throw std::invalid_argument("gamma_half_integer: argument must be >= 1/2");
    double x = 0.5 * twice_x;
    double g = (twice_x % 2 == 1) ? std::sqrt(kPi) : 1.0;
    double base = (twice_x % 2 == 1) ? 0.5 : 1.0;
    for (double t = base; t < x - 0.25; t += 1.0) g *= t;
    return g;
}

// Surface measure of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("unit_sphere_area: n must be >= 1");
    return 2.0 * std::pow(kPi, 0.5 * n) / gamma_half_integer(n);
}

inline double ball_volume(int n, double r) {
    return unit_sphere_area(n) * std::pow(r, n) / n;
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw std::invalid_argument("log_spaced: need 0 < lo < hi, count >= 2");
    std::vector<double> out(count);
    const double t0 = std::log(lo), t1 = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(t0 + (t1 - t0) * double(i) / double(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::vector<double> lin_spaced(double lo, double hi, std::size_t count) {
    if (count < 2) throw std::invalid_argument("lin_spaced: count >= 2");
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * double(i) / double(count - 1);
    return out;
}

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms_residual = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matching sizes >= 2");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw std::runtime_error("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

struct Extremum {
    double arg = 0.0;
    double value = 0.0;
};

struct ExtremumOptions {
    bool log_spacing = true;
    bool maximize = false;
    std::size_t samples = 129;
    int refine_rounds = 3;
};

// Dense scan plus bracket refinement around the best sample. Used for
// the sampled fallback of essential inf/sup and for sup of h over step
// intervals. The result is an attained value, i.e. an upper bound for an
// infimum (lower bound for a supremum).
template <class F>
Extremum scan_extremum(F&& f, double lo, double hi, ExtremumOptions opt = {}) {
    if (!(hi > lo)) throw std::invalid_argument("scan_extremum: need lo < hi");
    if (opt.log_spacing && !(lo > 0.0)) opt.log_spacing = false;
    auto better = [&](double a, double b) { return opt.maximize ? a > b : a < b; };

    double a = lo, b = hi;
    Extremum best{lo, f(lo)};
    for (int round = 0; round <= opt.refine_rounds; ++round) {
        std::vector<double> xs = opt.log_spacing ? log_spaced(a, b, opt.samples)
                                                 : lin_spaced(a, b, opt.samples);
        std::size_t ibest = 0;
        double vbest = f(xs[0]);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            const double v = f(xs[i]);
            if (better(v, vbest)) {
                vbest = v;
                ibest = i;
            }
        }
        if (better(vbest, best.value) || round == 0) best = {xs[ibest], vbest};
        a = xs[ibest > 0 ? ibest - 1 : 0];
        b = xs[std::min(ibest + 1, xs.size() - 1)];
        if (!(b > a)) break;
    }
    return best;
}

}  // namespace liouville
