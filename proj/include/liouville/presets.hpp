#pragma once

// Built-in example families exercised by the command-line tool and the tests.
// Numbering follows the project's example catalog in the README.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "criterion.hpp"
#include "problem.hpp"
#include "profile.hpp"

namespace liouville {
namespace presets {

// Pure power forcing b(x) = |x|^l with a = 1.
inline ProblemSpec example21_power(int n, int k, double lambda, double l) {
    if (!(n > 2 * k)) throw std::invalid_argument("example21_power: need n > 2k");
    ProblemSpec s;
    s.n = n;
    s.k = k;
    s.m = 2 * k;
    s.lambda = lambda;
    s.sigma = 2.0;
    s.a = RadialProfile::constant(1.0);
    s.b = RadialProfile::power(l);
    return s;
}

// Critical power with a logarithmic twist: b(x) = |x|^{(n-2k)lambda-n} log^nu|x|.
inline ProblemSpec example21_log(int n, int k, double lambda, double nu) {
    if (!(n > 2 * k)) throw std::invalid_argument("example21_log: need n > 2k");
    ProblemSpec s;
    s.n = n;
    s.k = k;
    s.m = 2 * k;
    s.lambda = lambda;
    s.sigma = 2.0;
    const double l = double(n - 2 * k) * lambda - double(n);
    s.a = RadialProfile::constant(1.0);
    s.b = RadialProfile::product(
        {RadialProfile::power(l), RadialProfile::log_power(nu)});
    return s;
}

// Critical forcing masked to the window family 2^{2i} < |x| < 2^{2i+1}:
// within windows b = |x|^{(n-2k)lambda-n} log^nu|x|, elsewhere 0.  The narrow
// ring ratio sigma = 2^{1/4} keeps whole annuli inside single windows.
inline ProblemSpec example22_dyadic(double nu) {
    ProblemSpec s;
    s.n = 3;
    s.k = 1;
    s.m = 2;
    s.lambda = 2.0;
    s.sigma = std::pow(2.0, 0.25);
    const double l = double(s.n - 2) * s.lambda - double(s.n);  // k = 1
    RadialProfile core = RadialProfile::product(
        {RadialProfile::power(l), RadialProfile::log_power(nu)});
    s.a = RadialProfile::constant(1.0);
    s.b = RadialProfile::piecewise_annular({{{4.0, 8.0}, core}}, 4.0);
    return s;
}

// Series form of the window family: radii r_i = 2^{2i} (kept in log space,
// far beyond floating-point range for large i) with window coefficients
// b_i = r_i^{(n-2k)lambda-n} log^nu(r_i); the term law is i^nu.
struct DyadicSeries {
    ProblemSpec problem;
    std::vector<double> log_radii;
    std::vector<double> log_b;
    SeriesPattern pattern;
};

inline DyadicSeries example22_series(double nu, std::size_t terms = 1000) {
    if (terms < 2) throw std::invalid_argument("example22_series: need >= 2 terms");
    DyadicSeries out;
    out.problem = example22_dyadic(nu);
    const double l = double(out.problem.n - 2) * out.problem.lambda - double(out.problem.n);
    const double log2 = std::log(2.0);
    out.log_radii.reserve(terms);
    out.log_b.reserve(terms);
    for (std::size_t i = 1; i <= terms; ++i) {
        const double lr = 2.0 * double(i) * log2;
        out.log_radii.push_back(lr);
        out.log_b.push_back(l * lr + nu * std::log(lr));
    }
    out.pattern.ratio = 1.0;
    out.pattern.log_exponent = nu;
    return out;
}

// Doubling radii with coefficients tuned to make every term equal: partial
// sums grow linearly, the simplest certified divergence.
inline DyadicSeries example22_series_linear(std::size_t terms = 1000) {
    if (terms < 2) throw std::invalid_argument("example22_series_linear: need >= 2 terms");
    DyadicSeries out;
    out.problem = example21_power(3, 1, 2.0, -1.0);
    const double l = -1.0;
    const double log2 = std::log(2.0);
    for (std::size_t i = 1; i <= terms; ++i) {
        const double lr = double(i) * log2;
        out.log_radii.push_back(lr);
        out.log_b.push_back(l * lr);
    }
    out.pattern.ratio = 1.0;
    out.pattern.log_exponent = 0.0;
    return out;
}

// Simulation presets for the mass-doubling iteration.
struct BlowupPreset {
    ProblemSpec problem;
    double r0 = 1.0;
    double J0 = 1.0;
};

// Supercritical forcing: the iterated mass bound escapes to infinity within a
// few dozen steps for any positive constant.
inline BlowupPreset blowup_divergent() {
    BlowupPreset p;
    p.problem = example21_power(3, 1, 2.0, 1.0);
    return p;
}

// Subcritical forcing: the same iteration stays bounded.
inline BlowupPreset blowup_convergent() {
    BlowupPreset p;
    p.problem = example21_power(3, 1, 2.0, -2.0);
    return p;
}

}  // namespace presets
}  // namespace liouville
