#pragma once

// Simulation of the blow-up machinery behind the triviality proof on
// concrete data: the forcing mass J(r), the averaged annulus functional h
// on sqrt(sigma)-windows, the three step inequalities with empirically
// fitted constants, the doubling sequence, the two-regime partition of a
// geometric radius grid, the blow-up recurrence, and a randomized harness
// for the piecewise-constant envelope inequality.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "criterion.hpp"
#include "math_util.hpp"
#include "problem.hpp"
#include "quadrature.hpp"

namespace liouville {

// J(r) = int_{B_r} b |u|^lambda dx, reduced to a radial integral.
template <class B, class U>
double forcing_mass(B&& b, U&& u, double lambda, int n, double r, double rel_tol = 1e-9) {
    if (!(r > 0.0)) throw std::invalid_argument("forcing_mass: need r > 0");
    const double omega = unit_sphere_area(n);
    auto f = [&](double rho) {
        return b(rho) * std::pow(std::abs(u(rho)), lambda) * std::pow(rho, n - 1);
    };
    QuadResult q = integrate_gk(f, 0.0, r, rel_tol);
    if (q.infinite) throw std::runtime_error("forcing_mass: integral diverged");
    return omega * q.value;
}

// The averaged functional on the narrower sqrt(sigma)-annulus; dominates the
// criterion functional q pointwise because the infimum-average runs over a
// smaller window.
inline BoundValue h_hoelder(const ProblemSpec& s, double r, double rel_tol = 1e-9) {
    return q_hoelder_ratio(s, r, std::sqrt(s.sigma), rel_tol);
}

struct StepParams {
    int n = 3;
    int m = 2;
    double lambda = 2.0;
    double sigma = 2.0;
};

struct LemmaCheck {
    bool hypothesis_ok = true;
    std::string note;
    double lhs = 0.0;
    double rhs = 0.0;               // the structural side without its constant
    double fitted_constant = 0.0;   // lhs / rhs
};

// Growth step: J(r2) - J(r1) >= C (r2-r1)^{lambda m} r1^{(1-lambda) n}
//              sup_{[r1,r2]} h * J(r1)^lambda.
template <class JF, class HF>
LemmaCheck lemma31_check(JF&& J, HF&& h, double r1, double r2, const StepParams& p) {
    LemmaCheck chk;
    if (!(r1 > 0.0) || !(r2 > r1)) {
        chk.hypothesis_ok = false;
        chk.note = "radius hypothesis 0 < r1 < r2 fails";
        return chk;
    }
    const double J1 = J(r1), J2 = J(r2);
    if (!(J1 > 0.0)) {
        chk.hypothesis_ok = false;
        chk.note = "mass hypothesis J(r1) > 0 fails";
        return chk;
    }
    ExtremumOptions opt;
    opt.maximize = true;
    opt.samples = 129;
    const double sup_h = scan_extremum([&](double r) { return h(r); }, r1, r2, opt).value;
    chk.lhs = J2 - J1;
    chk.rhs = std::pow(r2 - r1, p.lambda * p.m) * std::pow(r1, (1.0 - p.lambda) * p.n) * sup_h *
              std::pow(J1, p.lambda);
    chk.fitted_constant = chk.rhs > 0.0 ? chk.lhs / chk.rhs : 0.0;
    return chk;
}

// Fast-growth step, valid while the mass at least doubles within one
// sqrt(sigma) factor:
//   J(r1)^{(1/lambda-1)/m} - J(r2)^{(1/lambda-1)/m}
//     >= C int_{r1}^{r2} r^{(1/lambda-1) n/m} h(r)^{1/(lambda m)} dr.
template <class JF, class HF>
LemmaCheck lemma32_check(JF&& J, HF&& h, double r1, double r2, const StepParams& p,
                         double hyp_tol = 1e-9) {
    LemmaCheck chk;
    const double root_sigma = std::sqrt(p.sigma);
    if (!(r1 > 0.0) || !(r2 > r1)) {
        chk.hypothesis_ok = false;
        chk.note = "radius hypothesis 0 < r1 < r2 fails";
        return chk;
    }
    if (r2 > root_sigma * r1 * (1.0 + hyp_tol)) {
        chk.hypothesis_ok = false;
        chk.note = "step hypothesis r2 <= sqrt(sigma) r1 fails";
        return chk;
    }
    const double J1 = J(r1), J2 = J(r2);
    if (!(J1 > 0.0)) {
        chk.hypothesis_ok = false;
        chk.note = "mass hypothesis J(r1) > 0 fails";
        return chk;
    }
    if (J2 < 2.0 * J1 * (1.0 - hyp_tol)) {
        chk.hypothesis_ok = false;
        chk.note = "doubling hypothesis 2 J(r1) <= J(r2) fails";
        return chk;
    }
    const double e = (1.0 / p.lambda - 1.0) / p.m;  // negative
    chk.lhs = std::pow(J1, e) - std::pow(J2, e);
    auto f = [&](double r) {
        return std::pow(r, (1.0 / p.lambda - 1.0) * p.n / p.m) *
               std::pow(h(r), 1.0 / (p.lambda * p.m));
    };
    chk.rhs = integrate_gk(f, r1, r2, 1e-9).value;
    chk.fitted_constant = chk.rhs > 0.0 ? chk.lhs / chk.rhs : 0.0;
    return chk;
}

// Slow-growth step on an exact sqrt(sigma) increment without doubling:
//   J(r1)^{1-lambda} - J(r2)^{1-lambda}
//     >= C int_{r1}^{r2} r^{(m-n) lambda + n - 1} h(r) dr.
template <class JF, class HF>
LemmaCheck lemma33_check(JF&& J, HF&& h, double r1, double r2, const StepParams& p,
                         double hyp_tol = 1e-9) {
    LemmaCheck chk;
    const double root_sigma = std::sqrt(p.sigma);
    if (!(r1 > 0.0) || !(r2 > r1)) {
        chk.hypothesis_ok = false;
        chk.note = "radius hypothesis 0 < r1 < r2 fails";
        return chk;
    }
    if (std::abs(r2 - root_sigma * r1) > hyp_tol * root_sigma * r1 + 1e-300) {
        chk.hypothesis_ok = false;
        chk.note = "step hypothesis r2 = sqrt(sigma) r1 fails";
        return chk;
    }
    const double J1 = J(r1), J2 = J(r2);
    if (!(J1 > 0.0)) {
        chk.hypothesis_ok = false;
        chk.note = "mass hypothesis J(r1) > 0 fails";
        return chk;
    }
    if (J2 > 2.0 * J1 * (1.0 + hyp_tol)) {
        chk.hypothesis_ok = false;
        chk.note = "flatness hypothesis J(r2) <= 2 J(r1) fails";
        return chk;
    }
    chk.lhs = std::pow(J1, 1.0 - p.lambda) - std::pow(J2, 1.0 - p.lambda);
    auto f = [&](double r) {
        return std::pow(r, double(p.m - p.n) * p.lambda + p.n - 1.0) * h(r);
    };
    chk.rhs = integrate_gk(f, r1, r2, 1e-9).value;
    chk.fitted_constant = chk.rhs > 0.0 ? chk.lhs / chk.rhs : 0.0;
    return chk;
}

// Radii r1 = rho_0 < rho_1 < ... with J(rho_{i+1}) = 2 J(rho_i), generated
// while the next doubling target still fits under J(r2).  J must be
// non-decreasing on [r1, r2].
template <class JF>
std::vector<double> doubling_sequence(JF&& J, double r1, double r2, double rel_tol = 1e-10) {
    if (!(r1 > 0.0) || !(r2 > r1))
        throw std::invalid_argument("doubling_sequence: need 0 < r1 < r2");
    const double J2 = J(r2);
    std::vector<double> rhos{r1};
    double Jcur = J(r1);
    if (!(Jcur > 0.0)) throw std::invalid_argument("doubling_sequence: need J(r1) > 0");
    while (2.0 * Jcur <= J2 * (1.0 + 1e-12)) {
        const double target = 2.0 * Jcur;
        double lo = rhos.back(), hi = r2;
        while (hi - lo > rel_tol * hi) {
            const double mid = 0.5 * (lo + hi);
            if (J(mid) < target)
                lo = mid;
            else
                hi = mid;
        }
        rhos.push_back(0.5 * (lo + hi));
        Jcur = target;
    }
    return rhos;
}

// Geometric radius grid r_i = sigma^{i/2} r0 with the two-regime partition:
// indices where the mass at least doubles across the step, and the rest.
struct XiPartition {
    std::vector<double> radii;  // steps + 1 entries
    std::vector<double> mass;   // J at each radius
    std::vector<int> xi1;       // J(r_{i+1}) >= 2 J(r_i)
    std::vector<int> xi2;       // complement
};

template <class JF>
XiPartition xi_partition(JF&& J, double r0, double sigma, int steps) {
    if (!(r0 > 0.0) || !(sigma > 1.0) || steps < 1)
        throw std::invalid_argument("xi_partition: need r0 > 0, sigma > 1, steps >= 1");
    XiPartition part;
    const double step = std::sqrt(sigma);
    double r = r0;
    for (int i = 0; i <= steps; ++i) {
        part.radii.push_back(r);
        part.mass.push_back(J(r));
        r *= step;
    }
    for (int i = 0; i < steps; ++i) {
        if (part.mass[std::size_t(i + 1)] >= 2.0 * part.mass[std::size_t(i)])
            part.xi1.push_back(i);
        else
            part.xi2.push_back(i);
    }
    return part;
}

// Discrete blow-up recurrence on the geometric grid:
//   J_{i+1} = J_i + C (r_{i+1} - r_i)^{lambda m} r_i^{(1-lambda) n} h(r_i) J_i^lambda.
// Divergence is declared when the mass exceeds the overflow threshold.
struct BlowupResult {
    bool blew_up = false;
    int steps_to_blowup = -1;
    std::vector<double> trajectory;  // J_0 .. J_last
};

template <class HF>
BlowupResult blowup_iterate(const StepParams& p, HF&& h, double r0, double J0, double C,
                            int max_steps, double overflow = 1e30) {
    if (!(r0 > 0.0) || !(C >= 0.0) || max_steps < 1)
        throw std::invalid_argument("blowup_iterate: bad arguments");
    BlowupResult out;
    out.trajectory.push_back(J0);
    double r = r0;
    double J = J0;
    const double step = std::sqrt(p.sigma);
    for (int i = 0; i < max_steps; ++i) {
        const double rn = r * step;
        const double inc = C * std::pow(rn - r, p.lambda * p.m) *
                           std::pow(r, (1.0 - p.lambda) * p.n) * h(r) * std::pow(J, p.lambda);
        J += inc;
        out.trajectory.push_back(J);
        if (!(J < overflow)) {
            out.blew_up = true;
            out.steps_to_blowup = i + 1;
            break;
        }
        r = rn;
    }
    return out;
}

// --- randomized envelope harness ---------------------------------------------

// For piecewise-constant psi >= 0 on [r1, r2] and the window minimum
// gamma(r) = min psi over (r/kappa, kappa r) intersected with [r1, r2],
// the inequality under test compares
//   LHS = ( sum_j psi_j^alpha |seg_j| )^{1/alpha}
//   RHS = sum_seg gamma_seg * alpha * (hi^{1/alpha} - lo^{1/alpha}),
// both evaluated in closed form.  The harness samples random dyadic
// partitions with log-uniform levels and tracks the worst LHS/RHS ratio.
struct PiecewisePsi {
    std::vector<double> edges;   // size N+1
    std::vector<double> values;  // size N
};

namespace detail {

inline void dyadic_split(std::mt19937_64& rng, double lo, double hi, int depth,
                         std::vector<double>& edges) {
    std::bernoulli_distribution split(0.5);
    if (depth > 0 && split(rng)) {
        const double mid = 0.5 * (lo + hi);
        dyadic_split(rng, lo, mid, depth - 1, edges);
        edges.push_back(mid);
        dyadic_split(rng, mid, hi, depth - 1, edges);
    }
}

}  // namespace detail

inline PiecewisePsi random_dyadic_psi(std::mt19937_64& rng, double r1, double r2,
                                      int max_depth = 6, double level_lo = 1e-3,
                                      double level_hi = 1e3) {
    PiecewisePsi psi;
    psi.edges.push_back(r1);
    std::vector<double> inner;
    detail::dyadic_split(rng, r1, r2, max_depth, inner);
    for (double e : inner) psi.edges.push_back(e);
    psi.edges.push_back(r2);
    std::uniform_real_distribution<double> ulog(std::log(level_lo), std::log(level_hi));
    for (std::size_t i = 0; i + 1 < psi.edges.size(); ++i)
        psi.values.push_back(std::exp(ulog(rng)));
    return psi;
}

inline double psi_window_min(const PiecewisePsi& psi, double lo, double hi) {
    double mn = kInf;
    for (std::size_t j = 0; j + 1 < psi.edges.size(); ++j) {
        if (psi.edges[j + 1] > lo && psi.edges[j] < hi) mn = std::min(mn, psi.values[j]);
    }
    return mn;
}

struct EnvelopeRatio {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

inline EnvelopeRatio envelope_ratio(const PiecewisePsi& psi, double alpha, double kappa) {
    if (!(alpha > 0.0) || !(kappa > 1.0))
        throw std::invalid_argument("envelope_ratio: need alpha > 0 and kappa > 1");
    const double r1 = psi.edges.front(), r2 = psi.edges.back();
    EnvelopeRatio out;

    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < psi.edges.size(); ++j)
        acc += std::pow(psi.values[j], alpha) * (psi.edges[j + 1] - psi.edges[j]);
    out.lhs = std::pow(acc, 1.0 / alpha);

    // gamma is piecewise constant with breakpoints where a window edge
    // crosses a partition point
    std::vector<double> cuts{r1, r2};
    for (double t : psi.edges) {
        const double a = t / kappa, b = t * kappa;
        if (a > r1 && a < r2) cuts.push_back(a);
        if (b > r1 && b < r2) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double rhs = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        const double rm = std::sqrt(lo * hi);
        const double g = psi_window_min(psi, std::max(rm / kappa, r1), std::min(rm * kappa, r2));
        rhs += g * alpha * (std::pow(hi, 1.0 / alpha) - std::pow(lo, 1.0 / alpha));
    }
    out.rhs = rhs;
    out.ratio = rhs > 0.0 ? out.lhs / rhs : kInf;
    return out;
}

struct Lemma34Result {
    double alpha = 0.0;
    double kappa = 0.0;
    std::size_t trials = 0;
    double min_ratio = kInf;
    std::size_t argmin_trial = 0;
    std::uint64_t seed = 0;
};

inline Lemma34Result lemma34_harness(double alpha, double kappa, double r1, double r2,
                                     std::size_t trials, std::uint64_t seed) {
    if (!(r2 > r1) || !(r1 > 0.0))
        throw std::invalid_argument("lemma34_harness: need 0 < r1 < r2");
    Lemma34Result res;
    res.alpha = alpha;
    res.kappa = kappa;
    res.trials = trials;
    res.seed = seed;
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        const PiecewisePsi psi = random_dyadic_psi(rng, r1, r2);
        const EnvelopeRatio er = envelope_ratio(psi, alpha, kappa);
        if (er.ratio < res.min_ratio) {
            res.min_ratio = er.ratio;
            res.argmin_trial = t;
        }
    }
    return res;
}

}  // namespace liouville
