#pragma once

// Adaptive one-dimensional quadrature on a Gauss(7)/Kronrod(15) pair.
// Panels are split worst-error-first; endpoint values are never sampled
// (all nodes are interior), which keeps integrable endpoint singularities
// reachable by subdivision. Divergence is reported instead of being
// silently truncated: a panel value or running sum past the overflow
// threshold, or a non-finite sample surviving in an arbitrarily small
// panel, sets the `infinite` flag.

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

#include "math_util.hpp"

namespace liouville {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    bool infinite = false;
    std::size_t panels = 0;
};

inline constexpr double kQuadOverflow = 1e30;

namespace detail {

// Abscissae (positive half) and weights of the 15-point Kronrod rule;
// odd-indexed nodes carry the embedded 7-point Gauss rule.
inline constexpr double kGK15Node[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGK15WG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelEval {
    double kronrod = 0.0;
    double gauss = 0.0;
    bool finite = true;
};

template <class F>
PanelEval gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    PanelEval p;
    const double fc = f(c);
    if (!std::isfinite(fc)) {
        p.finite = false;
        return p;
    }
    p.kronrod = kGK15WK[7] * fc;
    p.gauss = kGK15WG[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGK15Node[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        if (!std::isfinite(f1) || !std::isfinite(f2)) {
            p.finite = false;
            return p;
        }
        p.kronrod += kGK15WK[i] * (f1 + f2);
        if (i % 2 == 1) p.gauss += kGK15WG[i / 2] * (f1 + f2);
    }
    p.kronrod *= h;
    p.gauss *= h;
    return p;
}

struct Panel {
    double a, b, value, error;
    bool bad;  // contained a non-finite sample; value/error not accounted
    bool operator<(const Panel& o) const {
        if (bad != o.bad) return !bad;  // bad panels sort first
        return error < o.error;
    }
};

}  // namespace detail

template <class F>
QuadResult integrate_gk(F&& f, double a, double b, double rel_tol = 1e-9,
                        std::size_t max_panels = 4000) {
    QuadResult res;
    if (!(b > a)) {
        res.converged = true;
        return res;
    }
    const double min_width = 1e-15 * (std::abs(a) + std::abs(b) + 1.0);

    std::priority_queue<detail::Panel> queue;
    double sum = 0.0, err = 0.0;
    std::size_t bad_pending = 0;

    auto push = [&](double lo, double hi) {
        auto ev = detail::gk15_panel(f, lo, hi);
        if (!ev.finite) {
            queue.push({lo, hi, 0.0, 0.0, true});
            ++bad_pending;
            return;
        }
        const double e = std::abs(ev.kronrod - ev.gauss);
        sum += ev.kronrod;
        err += e;
        queue.push({lo, hi, ev.kronrod, e, false});
    };

    push(a, b);
    res.panels = 1;

    while (!queue.empty() && res.panels < max_panels && !res.infinite) {
        if (std::abs(sum) > kQuadOverflow) {
            res.infinite = true;
            break;
        }
        const double scale = std::max(std::abs(sum), 1e-300);
        if (bad_pending == 0 && err <= rel_tol * scale) break;

        detail::Panel worst = queue.top();
        queue.pop();
        if (worst.bad) {
            --bad_pending;
            if (worst.b - worst.a < min_width) {
                res.infinite = true;  // singular sample resisted refinement
                break;
            }
        } else {
            sum -= worst.value;
            err -= worst.error;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // At floating point resolution; keep the value, drop the error.
            if (!worst.bad)
                sum += worst.value;
            else
                res.infinite = true;
            continue;
        }
        push(worst.a, mid);
        push(mid, worst.b);
        res.panels += 2;
    }

    res.value = sum;
    res.abs_error = err;
    if (std::abs(sum) > kQuadOverflow) res.infinite = true;
    res.converged = !res.infinite && bad_pending == 0 &&
                    err <= rel_tol * std::max(std::abs(sum), 1e-300);
    return res;
}

// Non-adaptive single-panel rule; used for cumulative integration over the
// cells of a fine grid where the integrand is smooth by construction.
template <class F>
double gk15_cell(F&& f, double a, double b) {
    return detail::gk15_panel(f, a, b).kronrod;
}

// Integral over (R, infinity) via the substitution rho = R * exp(y).
// Proceeds in blocks of the substituted variable until a block contributes
// nothing at the requested tolerance. Suitable for integrands with power
// or power-log decay faster than 1/rho.
template <class F>
QuadResult integrate_tail(F&& f, double R, double rel_tol = 1e-9) {
    if (!(R > 0.0)) throw std::invalid_argument("integrate_tail: need R > 0");
    QuadResult res;
    auto g = [&](double y) {
        const double rho = R * std::exp(y);
        return f(rho) * rho;
    };
    const double y_cap = 700.0 - std::log(R);  // keep R*exp(y) finite
    const double block = 5.0;
    double y0 = 0.0;
    int quiet_blocks = 0;
    for (int i = 0; i < 200 && y0 < y_cap; ++i) {
        const double y1 = std::min(y0 + block, y_cap);
        QuadResult part = integrate_gk(g, y0, y1, rel_tol);
        if (part.infinite) {
            res.infinite = true;
            return res;
        }
        res.value += part.value;
        res.abs_error += part.abs_error;
        res.panels += part.panels;
        if (std::abs(res.value) > kQuadOverflow) {
            res.infinite = true;
            return res;
        }
        const double scale = std::max(std::abs(res.value), 1e-300);
        if (std::abs(part.value) <= 0.01 * rel_tol * scale)
            ++quiet_blocks;
        else
            quiet_blocks = 0;
        if (quiet_blocks >= 2) {
            res.converged = true;
            return res;
        }
        y0 = y1;
    }
    res.infinite = true;  // never settled before the cap
    return res;
}

}  // namespace liouville
