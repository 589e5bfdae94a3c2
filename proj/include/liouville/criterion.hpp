#pragma once

// Triviality criteria for the inequality with absorption exponent lambda:
// every admissible solution is trivial when the forcing integral
//   int_R^inf r^{(m-n)*lambda + n - 1} q(r) dr
// diverges, where q is one of the annulus functionals below.  Verdicts:
//   ForcedTrivial  - the integral diverges (symbolically certified, or
//                    numerically consistent with divergence),
//   NotForced      - divergence certifiably fails (symbolic convergence, or
//                    the functional vanishes identically),
//   Inconclusive   - no certificate either way.

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace liouville {

enum class Verdict { ForcedTrivial, NotForced, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::ForcedTrivial: return "ForcedTrivial";
        case Verdict::NotForced: return "NotForced";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

enum class CriterionMethod { essinf, hoelder, f_essinf, f_hoelder };

inline const char* to_string(CriterionMethod m) {
    switch (m) {
        case CriterionMethod::essinf: return "essinf";
        case CriterionMethod::hoelder: return "hoelder";
        case CriterionMethod::f_essinf: return "f_essinf";
        case CriterionMethod::f_hoelder: return "f_hoelder";
    }
    return "?";
}

struct QSample {
    double r = 0.0;
    double value = 0.0;      // q(r)
    double integrand = 0.0;  // r^{(m-n)lambda + n - 1} q(r)
    bool exact = true;
};

struct CriterionReport {
    Verdict verdict = Verdict::Inconclusive;
    CriterionMethod method = CriterionMethod::essinf;
    bool symbolic = false;
    std::string evidence;
    double net_power = 0.0;  // integrand r-exponent when symbolic
    double net_log = 0.0;    // integrand log-exponent when symbolic
    double r_start = 0.0;
    std::vector<QSample> samples;
    std::vector<double> ladder;             // cumulative-integral radii
    std::vector<double> partial_integrals;  // integral from r_start to ladder[j]
};

// --- annulus functionals ----------------------------------------------------

// ess inf over the annulus (r/sigma, sigma r) of a^{-lambda} b.
inline BoundValue q_essinf(const ProblemSpec& s, double r) {
    const double lo = r / s.sigma, hi = r * s.sigma;
    if (s.a.vanishes_on_subset(lo, hi))
        throw std::domain_error(
            "q_essinf: coefficient a vanishes on part of the annulus; use an f-variant "
            "criterion built from a lower bound b >= a^lambda f");
    RadialProfile q = RadialProfile::product({s.a.pow(-s.lambda), s.b});
    return q.ess_inf(lo, hi);
}

// Averaged functional with an explicit annulus ratio:
// ( r^{-n} int_{r/ratio < |x| < ratio r} a^{lambda/(lambda-1)}
//   b^{-1/(lambda-1)} dx )^{1-lambda}; exactly 0 whenever the inner integral
// diverges, including when b vanishes on a positive-measure subset.
inline BoundValue q_hoelder_ratio(const ProblemSpec& s, double r, double ratio,
                                  double rel_tol = 1e-9) {
    if (!(ratio > 1.0)) throw std::invalid_argument("q_hoelder_ratio: need ratio > 1");
    const double lo = r / ratio, hi = r * ratio;
    const double ed = s.lambda / (s.lambda - 1.0);
    const double eb = -1.0 / (s.lambda - 1.0);
    RadialProfile inner = RadialProfile::product({s.a.pow(ed), s.b.pow(eb)});
    if (inner.infinite_on_subset(lo, hi)) return {0.0, true};
    if (lo < inner.min_domain() - 1e-12)
        throw std::domain_error("q_hoelder: annulus extends below the coefficient domain");

    // Substituting u = rho / r keeps the integrand scale near 1 at large r.
    std::vector<double> edges{lo, hi};
    collect_piece_edges(inner.node(), lo, hi, edges);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const double omega = unit_sphere_area(s.n);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto f = [&](double u) { return inner(u * r) * std::pow(u, s.n - 1); };
        QuadResult part = integrate_gk(f, edges[i] / r, edges[i + 1] / r, rel_tol);
        if (part.infinite) return {0.0, true};
        total += part.value;
    }
    const double avg = omega * total;
    if (avg <= 0.0) return {kInf, false};
    if (std::isinf(avg)) return {0.0, true};
    return {std::pow(avg, 1.0 - s.lambda), false};
}

inline BoundValue q_hoelder(const ProblemSpec& s, double r, double rel_tol = 1e-9) {
    return q_hoelder_ratio(s, r, s.sigma, rel_tol);
}

// f-variant functionals for b >= a^lambda f: the coefficient a drops out.
inline BoundValue q_f_essinf(const ProblemSpec& s, double r) {
    if (!s.f) throw std::invalid_argument("q_f_essinf: the problem carries no profile f");
    return s.f->ess_inf(r / s.sigma, r * s.sigma);
}

inline BoundValue q_f_hoelder(const ProblemSpec& s, double r, double rel_tol = 1e-9) {
    if (!s.f) throw std::invalid_argument("q_f_hoelder: the problem carries no profile f");
    const double lo = r / s.sigma, hi = r * s.sigma;
    RadialProfile inner = s.f->pow(-1.0 / (s.lambda - 1.0));
    if (inner.infinite_on_subset(lo, hi)) return {0.0, true};
    if (lo < inner.min_domain() - 1e-12)
        throw std::domain_error("q_f_hoelder: annulus extends below the coefficient domain");
    std::vector<double> edges{lo, hi};
    collect_piece_edges(inner.node(), lo, hi, edges);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const double omega = unit_sphere_area(s.n);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        auto f = [&](double u) { return inner(u * r) * std::pow(u, s.n - 1); };
        QuadResult part = integrate_gk(f, edges[i] / r, edges[i + 1] / r, rel_tol);
        if (part.infinite) return {0.0, true};
        total += part.value;
    }
    const double avg = omega * total;
    if (avg <= 0.0) return {kInf, false};
    if (std::isinf(avg)) return {0.0, true};
    return {std::pow(avg, 1.0 - s.lambda), false};
}

inline BoundValue q_value(const ProblemSpec& s, CriterionMethod method, double r) {
    switch (method) {
        case CriterionMethod::essinf: return q_essinf(s, r);
        case CriterionMethod::hoelder: return q_hoelder(s, r);
        case CriterionMethod::f_essinf: return q_f_essinf(s, r);
        case CriterionMethod::f_hoelder: return q_f_hoelder(s, r);
    }
    return {0.0, false};
}

// --- classification ---------------------------------------------------------

struct ClassifyOptions {
    double r_start = 0.0;          // 0 = derive from the problem
    double r_top = 1e6;            // end of the sampling ladder
    double growth_tol = 0.05;      // tolerance on non-decreasing increments
    double quad_rel_tol = 1e-6;    // outer-integral quadrature tolerance
};

namespace detail {

struct SymbolicQ {
    double net_power = 0.0;
    double net_log = 0.0;
    double coef = 1.0;
    bool windowed = false;   // q supported on a geometric window family
    bool window_ok = true;   // at least one window admits a full annulus
};

inline bool same_exponents(const PowerLogMonomial& a, const PowerLogMonomial& b) {
    return std::abs(a.pow_plain - b.pow_plain) <= 1e-12 &&
           std::abs(a.pow_shift - b.pow_shift) <= 1e-12 &&
           std::abs(a.log_plain - b.log_plain) <= 1e-12 &&
           std::abs(a.log_shift - b.log_shift) <= 1e-12;
}

// Shared power-log exponents of a geometrically repeating piecewise profile,
// when every piece with a positive coefficient carries the same ones.
inline std::optional<SymbolicQ> windowed_monomial(const ProfileNode& nd, double annulus_ratio) {
    if (nd.kind != ProfileNode::Kind::piecewise) return std::nullopt;
    if (!(nd.repeat > 1.0)) return std::nullopt;
    SymbolicQ out;
    out.windowed = true;
    out.window_ok = false;
    bool have = false;
    PowerLogMonomial shared;
    for (std::size_t j = 0; j < nd.children.size(); ++j) {
        const auto m = make_profile(nd.children[j]).as_monomial();
        if (!m) return std::nullopt;
        if (!(m->coef > 0.0)) continue;
        if (!have) {
            shared = *m;
            have = true;
        } else if (!same_exponents(shared, *m)) {
            return std::nullopt;
        }
        shared.coef = std::min(shared.coef, m->coef);
        if (nd.bounds[j].second > nd.bounds[j].first * annulus_ratio * (1.0 + 1e-9))
            out.window_ok = true;
    }
    if (!have) return std::nullopt;
    out.net_power = shared.net_power();
    out.net_log = shared.net_log();
    out.coef = shared.coef;
    return out;
}

// Asymptotic exponents of q(r) when the coefficient data collapses to
// power-log monomials, possibly masked by a repeating window family.
inline std::optional<SymbolicQ> symbolic_q(const ProblemSpec& s, CriterionMethod method) {
    SymbolicQ out;
    if (method == CriterionMethod::essinf || method == CriterionMethod::hoelder) {
        const auto ma = s.a.as_monomial();
        if (!ma || !(ma->coef > 0.0)) return std::nullopt;
        const auto mb = s.b.as_monomial();
        if (mb) {
            if (!(mb->coef > 0.0)) return std::nullopt;
            out.net_power = -s.lambda * ma->net_power() + mb->net_power();
            out.net_log = -s.lambda * ma->net_log() + mb->net_log();
            out.coef = std::pow(ma->coef, -s.lambda) * mb->coef;
            return out;
        }
        const auto wb = windowed_monomial(s.b.node(), s.sigma * s.sigma);
        if (!wb) return std::nullopt;
        out = *wb;
        out.net_power = -s.lambda * ma->net_power() + wb->net_power;
        out.net_log = -s.lambda * ma->net_log() + wb->net_log;
        out.coef = std::pow(ma->coef, -s.lambda) * wb->coef;
        return out;
    }
    if (!s.f) return std::nullopt;
    const auto mf = s.f->as_monomial();
    if (mf) {
        if (!(mf->coef > 0.0)) return std::nullopt;
        out.net_power = mf->net_power();
        out.net_log = mf->net_log();
        out.coef = mf->coef;
        return out;
    }
    return windowed_monomial(s.f->node(), s.sigma * s.sigma);
}

}  // namespace detail

// Starting radius for the criterion integral: nominally 1, pushed out just far
// enough that every annulus (r/sigma, sigma r) lies in the coefficient domains.
inline double classify_start_radius(const ProblemSpec& s) {
    double dom = std::max(s.a.min_domain(), s.b.min_domain());
    if (s.f) dom = std::max(dom, s.f->min_domain());
    return std::max(1.0, s.sigma * dom * (1.0 + 1e-9));
}

inline CriterionReport classify_divergence(const ProblemSpec& s, CriterionMethod method,
                                           ClassifyOptions opt = {}) {
    s.validate();
    CriterionReport rep;
    rep.method = method;
    rep.r_start = opt.r_start > 0.0 ? opt.r_start : classify_start_radius(s);
    const double P0 = double(s.m - s.n) * s.lambda + double(s.n) - 1.0;

    auto push_samples = [&]() {
        for (double r = rep.r_start; r <= opt.r_top * (1.0 + 1e-12); r *= 10.0) {
            const BoundValue q = q_value(s, method, r);
            rep.samples.push_back({r, q.value, std::pow(r, P0) * q.value, q.exact});
        }
    };

    // Vacuous forcing: q identically zero from the start radius outward.
    const bool zero_b = (method == CriterionMethod::essinf || method == CriterionMethod::hoelder)
                            ? s.b.is_zero_on(rep.r_start, rep.r_start * 1e9)
                            : (s.f && s.f->is_zero_on(rep.r_start, rep.r_start * 1e9));
    if (zero_b) {
        rep.verdict = Verdict::NotForced;
        rep.symbolic = true;
        rep.evidence = "forcing coefficient vanishes identically beyond the start radius; "
                       "q = 0 and the criterion integral is 0";
        return rep;
    }

    // Symbolic route: power-log monomial data classifies exactly.
    if (const auto sq = detail::symbolic_q(s, method)) {
        rep.symbolic = true;
        if (sq->windowed && !sq->window_ok) {
            rep.verdict = Verdict::NotForced;
            rep.evidence = "the annulus ratio sigma^2 is at least every window ratio, so no "
                           "annulus fits inside a window and q vanishes identically";
            push_samples();
            return rep;
        }
        const double P = P0 + sq->net_power;
        const double L = sq->net_log;
        rep.net_power = P;
        rep.net_log = L;
        const double kEps = 1e-9;
        bool divergent;
        std::ostringstream ev;
        if (sq->windowed)
            ev << "q is supported on a geometric window family; on windows the ";
        ev << "integrand ~ r^(" << P << ") log^(" << L << ") r at infinity: ";
        if (P > -1.0 + kEps) {
            divergent = true;
            ev << "power exponent above -1, integral diverges";
        } else if (P < -1.0 - kEps) {
            divergent = false;
            ev << "power exponent below -1, integral converges";
        } else if (L >= -1.0 - kEps) {
            divergent = true;
            ev << "critical power with log exponent >= -1, "
               << (sq->windowed ? "window sums diverge" : "integral diverges");
        } else {
            divergent = false;
            ev << "critical power with log exponent < -1, "
               << (sq->windowed ? "window sums converge" : "integral converges");
        }
        rep.verdict = divergent ? Verdict::ForcedTrivial : Verdict::NotForced;
        rep.evidence = ev.str();
        push_samples();
        return rep;
    }

    // Bounded piecewise support without a repeat rule: q dies past the support.
    {
        const RadialProfile* forcing =
            (method == CriterionMethod::essinf || method == CriterionMethod::hoelder)
                ? &s.b
                : (s.f ? &*s.f : nullptr);
        if (forcing != nullptr) {
            const auto& nd = forcing->node();
            if (nd.kind == detail::ProfileNode::Kind::piecewise && !(nd.repeat > 1.0) &&
                !nd.bounds.empty()) {
                const double support_end = nd.bounds.back().second;
                rep.verdict = Verdict::NotForced;
                rep.symbolic = true;
                std::ostringstream ev;
                ev << "forcing coefficient is supported inside r <= " << support_end
                   << "; q vanishes beyond sigma times that radius and the criterion "
                      "integral is finite";
                rep.evidence = ev.str();
                push_samples();
                return rep;
            }
        }
    }

    // Numeric route: cumulative integral along a decade ladder.
    std::vector<double> ladder;
    for (double r = rep.r_start * 10.0; r <= opt.r_top * (1.0 + 1e-12); r *= 10.0)
        ladder.push_back(r);
    if (ladder.size() < 4) {
        for (double r = rep.r_start * 2.0; ladder.size() < 4; r *= 2.0) ladder.push_back(r);
        std::sort(ladder.begin(), ladder.end());
    }

    auto outer = [&](double r) {
        const BoundValue q = q_value(s, method, r);
        return std::pow(r, P0) * q.value;
    };

    bool all_zero = true;
    double acc = 0.0;
    double prev = rep.r_start;
    bool overflow = false;
    for (double R : ladder) {
        QuadResult part = integrate_gk(outer, prev, R, opt.quad_rel_tol, 2000);
        if (part.infinite) {
            overflow = true;
            break;
        }
        acc += part.value;
        if (part.value != 0.0) all_zero = false;
        rep.ladder.push_back(R);
        rep.partial_integrals.push_back(acc);
        prev = R;
    }
    push_samples();

    if (overflow) {
        rep.verdict = Verdict::ForcedTrivial;
        rep.evidence = "cumulative integral overflows the working range; divergence";
        return rep;
    }
    if (all_zero) {
        rep.verdict = Verdict::NotForced;
        rep.evidence = "every partial integral vanishes; q = 0 along the whole ladder";
        return rep;
    }

    // Growth fit over the last three ladder increments.
    const std::size_t nn = rep.partial_integrals.size();
    if (nn >= 4) {
        double inc[3];
        for (int i = 0; i < 3; ++i)
            inc[i] = rep.partial_integrals[nn - 3 + i] - rep.partial_integrals[nn - 4 + i];
        const bool growing = inc[0] > 0.0 &&
                             inc[1] >= inc[0] * (1.0 - opt.growth_tol) &&
                             inc[2] >= inc[1] * (1.0 - opt.growth_tol);
        std::ostringstream ev;
        ev << "last decade increments " << inc[0] << ", " << inc[1] << ", " << inc[2];
        if (growing) {
            rep.verdict = Verdict::ForcedTrivial;
            ev << ": non-decreasing, consistent with divergence";
        } else {
            rep.verdict = Verdict::Inconclusive;
            ev << ": decaying; convergence is likely but not certified";
        }
        rep.evidence = ev.str();
        return rep;
    }

    rep.verdict = Verdict::Inconclusive;
    rep.evidence = "too few ladder segments for a growth fit";
    return rep;
}

// --- series criterion -------------------------------------------------------

// Asymptotic law of the series terms t_i = r_i^{(m-n)lambda + n} b_i, supplied
// by whoever constructed the radii pattern: t_i ~ C ratio^i i^nu.
struct SeriesPattern {
    double ratio = 1.0;
    double log_exponent = 0.0;
};

struct SeriesReport {
    Verdict verdict = Verdict::Inconclusive;
    bool spacing_ok = false;
    std::size_t terms = 0;
    double log_partial_sum = 0.0;  // log of the partial sum, for divergent tails
    double partial_sum = 0.0;      // plain partial sum when it fits in range
    std::string evidence;
};

// Series form of the criterion, taken in log space so that radii far beyond
// the floating-point range (log r supplied directly) stay representable.
// Terms are t_i = r_i^{(m-n)lambda + n} b_i with log b_i supplied (-inf marks
// a zero coefficient); radii must satisfy r_{i+1} >= 2 r_i.  The series
// diverges exactly when the supplied term law has ratio > 1, or ratio == 1
// with index exponent >= -1.
inline SeriesReport series_criterion_log(const ProblemSpec& s,
                                         const std::vector<double>& log_radii,
                                         const std::vector<double>& log_b,
                                         std::optional<SeriesPattern> pattern = std::nullopt) {
    s.validate();
    SeriesReport rep;
    if (log_radii.size() < 2)
        throw std::invalid_argument("series_criterion: need >= 2 radii");
    if (log_b.size() != log_radii.size())
        throw std::invalid_argument("series_criterion: radii and coefficients differ in length");
    const double kLog2 = std::log(2.0);
    for (std::size_t i = 0; i + 1 < log_radii.size(); ++i) {
        if (!(log_radii[i + 1] - log_radii[i] >= kLog2 - 1e-9))
            throw std::invalid_argument(
                "series_criterion: radii must at least double at every step");
    }
    rep.spacing_ok = true;
    rep.terms = log_radii.size();

    const double E = double(s.m - s.n) * s.lambda + double(s.n);
    // log-safe accumulation: sum exp(l_i) tracked as running log-sum-exp
    double lse = -kInf;
    bool any = false;
    for (std::size_t i = 0; i < log_radii.size(); ++i) {
        if (log_b[i] == -kInf || std::isnan(log_b[i])) continue;
        const double lt = E * log_radii[i] + log_b[i];
        any = true;
        if (lse == -kInf)
            lse = lt;
        else {
            const double hi = std::max(lse, lt), lo = std::min(lse, lt);
            lse = hi + std::log1p(std::exp(lo - hi));
        }
    }
    rep.log_partial_sum = lse;
    rep.partial_sum = lse < 700.0 ? std::exp(lse) : kInf;

    std::ostringstream ev;
    if (!any) {
        rep.verdict = Verdict::NotForced;
        ev << "every window coefficient is zero; the series vanishes";
    } else if (pattern) {
        const double kEps = 1e-9;
        const bool div = pattern->ratio > 1.0 + kEps ||
                         (std::abs(pattern->ratio - 1.0) <= kEps &&
                          pattern->log_exponent >= -1.0 - kEps);
        rep.verdict = div ? Verdict::ForcedTrivial : Verdict::NotForced;
        ev << "term law ratio " << pattern->ratio << ", index exponent "
           << pattern->log_exponent << ": series " << (div ? "diverges" : "converges")
           << "; partial sum over " << rep.terms << " terms has log " << rep.log_partial_sum;
    } else {
        rep.verdict = Verdict::Inconclusive;
        ev << "no term law supplied; partial sum over " << rep.terms << " terms has log "
           << rep.log_partial_sum;
    }
    rep.evidence = ev.str();
    return rep;
}

// Plain-value convenience wrapper for radii and coefficients within the
// floating-point range.
inline SeriesReport series_criterion(const ProblemSpec& s, const std::vector<double>& radii,
                                     const std::vector<double>& b_values,
                                     std::optional<SeriesPattern> pattern = std::nullopt) {
    if (b_values.size() != radii.size())
        throw std::invalid_argument("series_criterion: radii and coefficients differ in length");
    std::vector<double> lr(radii.size()), lb(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i]))
            throw std::invalid_argument("series_criterion: radii must be finite and positive");
        if (!(b_values[i] >= 0.0))
            throw std::invalid_argument("series_criterion: coefficients must be >= 0");
        lr[i] = std::log(radii[i]);
        lb[i] = b_values[i] > 0.0 ? std::log(b_values[i]) : -kInf;
    }
    return series_criterion_log(s, lr, lb, pattern);
}

}  // namespace liouville
