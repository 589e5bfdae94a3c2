#pragma once

// Radial coefficient profiles as immutable expression trees.
//
// Primitives: constants, powers r^p, shifted powers (2+r)^p, log powers
// log(r)^q (natural log, domain r >= 1), shifted log powers log(2+r)^q,
// piecewise-annular assemblies (value 0 outside the pieces), sums,
// products, and real powers of a sub-profile.
//
// Essential bounds over an interval are exact whenever monotonicity can be
// established (endpoint evaluation) or the node is piecewise-annular
// (interval decomposition; a positive-measure gap pins the infimum at 0).
// Otherwise a dense log-uniform scan with bracket refinement produces an
// attained value, flagged as approximate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "math_util.hpp"
#include "quadrature.hpp"

namespace liouville {

enum class Monotone { increasing, decreasing, constant, unknown };

struct BoundValue {
    double value = 0.0;
    bool exact = true;
};

// Product of the primitive factors collapsed to exponents, when a profile
// is a plain power-log monomial: coef * r^pp * (2+r)^ps * log(r)^lp * log(2+r)^ls.
struct PowerLogMonomial {
    double coef = 1.0;
    double pow_plain = 0.0;
    double pow_shift = 0.0;
    double log_plain = 0.0;
    double log_shift = 0.0;

    double net_power() const { return pow_plain + pow_shift; }
    double net_log() const { return log_plain + log_shift; }
};

class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct ProfileNode {
    enum class Kind { constant, power, log_power, piecewise, sum, product, pow_of };
    Kind kind = Kind::constant;
    double param = 0.0;  // value for constants, exponent otherwise
    bool shifted = false;
    double repeat = 0.0;  // piecewise only: > 1 replicates the pieces geometrically
    std::vector<std::shared_ptr<const ProfileNode>> children;
    std::vector<std::pair<double, double>> bounds;  // piecewise intervals
    std::optional<Monotone> annotation;
};

// A piecewise interval materialized inside a query range; `child` indexes the
// sub-profile (which is always evaluated at the global radius).
struct EffectivePiece {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t child = 0;
};

using NodePtr = std::shared_ptr<const ProfileNode>;

}  // namespace detail

class RadialProfile {
  public:
    RadialProfile() : RadialProfile(make_constant(0.0)) {}

    static RadialProfile constant(double value) { return RadialProfile(make_constant(value)); }

    static RadialProfile power(double exponent, bool shifted = false) {
        if (!std::isfinite(exponent)) throw std::invalid_argument("power: non-finite exponent");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::power;
        nd->param = exponent;
        nd->shifted = shifted;
        return RadialProfile(std::move(nd));
    }

    static RadialProfile log_power(double exponent, bool shifted = false) {
        if (!std::isfinite(exponent)) throw std::invalid_argument("log_power: non-finite exponent");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::log_power;
        nd->param = exponent;
        nd->shifted = shifted;
        return RadialProfile(std::move(nd));
    }

    static RadialProfile sum(std::vector<RadialProfile> terms) {
        if (terms.empty()) throw std::invalid_argument("sum: need at least one term");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::sum;
        for (auto& t : terms) nd->children.push_back(t.node_);
        return RadialProfile(std::move(nd));
    }

    static RadialProfile product(std::vector<RadialProfile> factors) {
        if (factors.empty()) throw std::invalid_argument("product: need at least one factor");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::product;
        for (auto& f : factors) nd->children.push_back(f.node_);
        return RadialProfile(std::move(nd));
    }

    // With repeat_ratio > 1 the piece pattern (which must fit inside
    // [r_lo, r_lo * repeat_ratio]) replicates at r_lo * repeat_ratio^t for all
    // t >= 0; sub-profiles are evaluated at the global radius.
    static RadialProfile piecewise_annular(
        std::vector<std::pair<std::pair<double, double>, RadialProfile>> pieces,
        double repeat_ratio = 0.0);

    RadialProfile pow(double exponent) const {
        if (!std::isfinite(exponent)) throw std::invalid_argument("pow: non-finite exponent");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::pow_of;
        nd->param = exponent;
        nd->children.push_back(node_);
        return RadialProfile(std::move(nd));
    }

    RadialProfile annotated(Monotone m) const {
        auto nd = std::make_shared<detail::ProfileNode>(*node_);
        nd->annotation = m;
        return RadialProfile(std::move(nd));
    }

    double operator()(double r) const { return eval(*node_, r); }

    // Infimum of the open evaluation domain; evaluation below it throws.
    double min_domain() const { return min_domain(*node_); }

    Monotone direction(double lo, double hi) const { return direction(*node_, lo, hi); }

    BoundValue ess_inf(double lo, double hi) const { return ess_bound(*node_, lo, hi, true); }
    BoundValue ess_sup(double lo, double hi) const { return ess_bound(*node_, lo, hi, false); }

    // True if the profile is zero on a positive-measure subset of (lo, hi).
    bool vanishes_on_subset(double lo, double hi) const {
        return vanishes_on_subset(*node_, lo, hi);
    }
    // True if the profile is identically zero on (lo, hi).
    bool is_zero_on(double lo, double hi) const { return is_zero_on(*node_, lo, hi); }
    // True if the profile takes the value +infinity on a positive-measure subset.
    bool infinite_on_subset(double lo, double hi) const {
        return infinite_on_subset(*node_, lo, hi);
    }

    std::optional<PowerLogMonomial> as_monomial() const { return as_monomial(*node_); }

    // Exponent of the leading power as r -> 0+, or nullopt when the profile
    // vanishes identically near 0.
    std::optional<double> leading_power_at_zero() const { return lead_at_zero(*node_); }

    // First radius at which a piecewise assembly becomes active when the
    // profile vanishes near zero; 0.0 otherwise.
    double first_support_radius() const { return first_support(*node_); }

    const detail::ProfileNode& node() const { return *node_; }

    // Piece intervals of a piecewise node intersecting (lo, hi), repeats
    // materialized. Empty for other node kinds.
    static std::vector<detail::EffectivePiece> piece_intervals(const detail::ProfileNode& nd,
                                                               double lo, double hi) {
        if (nd.kind == detail::ProfileNode::Kind::piecewise)
            return effective_pieces(nd, lo, hi);
        return {};
    }

    nlohmann::json to_json() const { return to_json(*node_); }
    static RadialProfile from_json(const nlohmann::json& j) {
        return RadialProfile(parse(j, "profile"));
    }

  private:
    explicit RadialProfile(detail::NodePtr nd) : node_(std::move(nd)) {}

    static detail::NodePtr make_constant(double value) {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw std::invalid_argument("constant: value must be finite and >= 0");
        auto nd = std::make_shared<detail::ProfileNode>();
        nd->kind = detail::ProfileNode::Kind::constant;
        nd->param = value;
        return nd;
    }

    using Node = detail::ProfileNode;
    using Kind = detail::ProfileNode::Kind;

    static double min_domain(const Node& nd) {
        switch (nd.kind) {
            case Kind::constant: return 0.0;
            case Kind::power: return 0.0;
            case Kind::log_power: return nd.shifted ? 0.0 : 1.0;
            case Kind::piecewise: return 0.0;  // piece covers validated at build
            default: {
                double m = 0.0;
                for (const auto& c : nd.children) m = std::max(m, min_domain(*c));
                return m;
            }
        }
    }

    static double eval(const Node& nd, double r) {
        if (!(r >= 0.0)) throw std::domain_error("profile: radius must be >= 0");
        switch (nd.kind) {
            case Kind::constant: return nd.param;
            case Kind::power: {
                const double base = nd.shifted ? 2.0 + r : r;
                if (!nd.shifted && nd.param < 0.0 && r == 0.0) return kInf;
                if (nd.param == 0.0) return 1.0;
                return std::pow(base, nd.param);
            }
            case Kind::log_power: {
                if (!nd.shifted && r < 1.0)
                    throw std::domain_error("profile: log(r) factor needs r >= 1");
                const double L = std::log(nd.shifted ? 2.0 + r : r);
                if (nd.param == 0.0) return 1.0;
                if (L == 0.0) return nd.param > 0.0 ? 0.0 : kInf;
                return std::pow(L, nd.param);
            }
            case Kind::piecewise: {
                const auto it = find_piece(nd, r);
                if (it < 0) return 0.0;
                return eval(*nd.children[std::size_t(it)], r);
            }
            case Kind::sum: {
                double s = 0.0;
                for (const auto& c : nd.children) s += eval(*c, r);
                return s;
            }
            case Kind::product: {
                double p = 1.0;
                bool saw_inf = false;
                for (const auto& c : nd.children) {
                    const double v = eval(*c, r);
                    if (v == 0.0) return 0.0;  // absorbing, even against +inf
                    if (std::isinf(v))
                        saw_inf = true;
                    else
                        p *= v;
                }
                return saw_inf ? kInf : p;
            }
            case Kind::pow_of: {
                const double v = eval(*nd.children[0], r);
                const double e = nd.param;
                if (e == 0.0) return 1.0;
                if (v == 0.0) return e > 0.0 ? 0.0 : kInf;
                if (std::isinf(v)) return e > 0.0 ? kInf : 0.0;
                return std::pow(v, e);
            }
        }
        return 0.0;
    }

    static int search_base_pieces(const Node& nd, double r) {
        // bounds are sorted and disjoint
        int lo = 0, hi = int(nd.bounds.size()) - 1;
        while (lo <= hi) {
            const int mid = (lo + hi) / 2;
            if (r < nd.bounds[std::size_t(mid)].first)
                hi = mid - 1;
            else if (r > nd.bounds[std::size_t(mid)].second)
                lo = mid + 1;
            else
                return mid;
        }
        return -1;
    }

    static int find_piece(const Node& nd, double r) {
        if (nd.repeat > 1.0) {
            const double base_lo = nd.bounds.front().first;
            if (r < base_lo) return -1;
            // Fold r into the base period [base_lo, base_lo * repeat); the
            // sub-profile is still evaluated at the global radius.
            double t = std::floor(std::log(r / base_lo) / std::log(nd.repeat));
            for (int fix = 0; fix < 2; ++fix) {
                const double folded = r / std::pow(nd.repeat, t);
                if (folded < base_lo) {
                    t -= 1.0;
                    continue;
                }
                if (folded >= base_lo * nd.repeat) {
                    t += 1.0;
                    continue;
                }
                return search_base_pieces(nd, folded);
            }
            return -1;
        }
        return search_base_pieces(nd, r);
    }

    // Materialize the piece intervals intersecting (lo, hi). For repeating
    // assemblies this enumerates every geometric copy that overlaps the range,
    // so callers must pass a bounded interval.
    static std::vector<detail::EffectivePiece> effective_pieces(const Node& nd, double lo,
                                                                double hi) {
        std::vector<detail::EffectivePiece> out;
        if (!(hi > lo)) return out;
        if (!(nd.repeat > 1.0)) {
            for (std::size_t j = 0; j < nd.bounds.size(); ++j) {
                const double a = std::max(nd.bounds[j].first, lo);
                const double b = std::min(nd.bounds[j].second, hi);
                if (b > a) out.push_back({a, b, j});
            }
            return out;
        }
        const double base_lo = nd.bounds.front().first;
        if (hi <= base_lo) return out;
        const double span = std::log(nd.repeat);
        const double t_lo =
            std::floor(std::log(std::max(lo, base_lo) / base_lo) / span) - 1.0;
        const double t_hi = std::floor(std::log(hi / base_lo) / span) + 1.0;
        for (double t = std::max(0.0, t_lo); t <= t_hi; t += 1.0) {
            const double scale = std::pow(nd.repeat, t);
            for (std::size_t j = 0; j < nd.bounds.size(); ++j) {
                const double a = std::max(nd.bounds[j].first * scale, lo);
                const double b = std::min(nd.bounds[j].second * scale, hi);
                if (b > a) out.push_back({a, b, j});
            }
        }
        return out;
    }

    static Monotone combine_directions(const std::vector<Monotone>& ds) {
        bool any_inc = false, any_dec = false;
        for (auto d : ds) {
            if (d == Monotone::unknown) return Monotone::unknown;
            if (d == Monotone::increasing) any_inc = true;
            if (d == Monotone::decreasing) any_dec = true;
        }
        if (any_inc && any_dec) return Monotone::unknown;
        if (any_inc) return Monotone::increasing;
        if (any_dec) return Monotone::decreasing;
        return Monotone::constant;
    }

    static Monotone flip(Monotone m) {
        if (m == Monotone::increasing) return Monotone::decreasing;
        if (m == Monotone::decreasing) return Monotone::increasing;
        return m;
    }

    static Monotone direction(const Node& nd, double lo, double hi) {
        if (nd.annotation) return *nd.annotation;
        switch (nd.kind) {
            case Kind::constant: return Monotone::constant;
            case Kind::power:
                if (nd.param > 0.0) return Monotone::increasing;
                if (nd.param < 0.0) return Monotone::decreasing;
                return Monotone::constant;
            case Kind::log_power:
                if (nd.param > 0.0) return Monotone::increasing;
                if (nd.param < 0.0) return Monotone::decreasing;
                return Monotone::constant;
            case Kind::pow_of: {
                if (nd.param == 0.0) return Monotone::constant;
                const Monotone d = direction(*nd.children[0], lo, hi);
                return nd.param > 0.0 ? d : flip(d);
            }
            case Kind::sum:
            case Kind::product: {
                std::vector<Monotone> ds;
                ds.reserve(nd.children.size());
                for (const auto& c : nd.children) ds.push_back(direction(*c, lo, hi));
                const Monotone d = combine_directions(ds);
                if (d != Monotone::unknown) return d;
                return monomial_direction(nd, lo, hi);
            }
            case Kind::piecewise: {
                // Entirely inside one piece, or entirely inside a gap.
                const auto pieces = effective_pieces(nd, lo, hi);
                if (pieces.empty()) return Monotone::constant;
                if (pieces.size() == 1 && pieces[0].lo <= lo && pieces[0].hi >= hi)
                    return direction(*nd.children[pieces[0].child], lo, hi);
                return Monotone::unknown;
            }
        }
        return Monotone::unknown;
    }

    // Sign of d/dr for the collapsed monomial, scanned over the interval.
    static Monotone monomial_direction(const Node& nd, double lo, double hi) {
        const auto mono = as_monomial(nd);
        if (!mono || mono->coef == 0.0) return mono ? Monotone::constant : Monotone::unknown;
        const auto& m = *mono;
        auto logd = [&](double r) {
            double g = 0.0;
            if (m.pow_plain != 0.0) g += m.pow_plain / r;
            if (m.pow_shift != 0.0) g += m.pow_shift / (2.0 + r);
            if (m.log_plain != 0.0) g += m.log_plain / (r * std::log(r));
            if (m.log_shift != 0.0) g += m.log_shift / ((2.0 + r) * std::log(2.0 + r));
            return g;
        };
        bool nonneg = true, nonpos = true;
        const int kScan = 33;
        for (int i = 0; i <= kScan; ++i) {
            const double u = (0.5 + i) / (kScan + 1.0);
            const double r = (lo > 0.0) ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
            const double g = logd(r);
            if (g > 1e-14) nonpos = false;
            if (g < -1e-14) nonneg = false;
        }
        if (nonneg && nonpos) return Monotone::constant;
        if (nonneg) return Monotone::increasing;
        if (nonpos) return Monotone::decreasing;
        return Monotone::unknown;
    }

    static BoundValue ess_bound(const Node& nd, double lo, double hi, bool want_inf) {
        if (!(hi > lo)) throw std::invalid_argument("ess bound: need lo < hi");
        if (lo < min_domain(nd) - 1e-12)
            throw std::domain_error("ess bound: interval extends below the profile domain");

        const Monotone d = direction(nd, lo, hi);
        if (d == Monotone::constant) return {eval(nd, 0.5 * (lo + hi)), true};
        if (d == Monotone::increasing) return {eval(nd, want_inf ? lo : hi), true};
        if (d == Monotone::decreasing) return {eval(nd, want_inf ? hi : lo), true};

        switch (nd.kind) {
            case Kind::piecewise: {
                const double span = hi - lo;
                double covered = 0.0;
                BoundValue best{want_inf ? kInf : 0.0, true};
                bool any = false;
                for (const auto& p : effective_pieces(nd, lo, hi)) {
                    covered += p.hi - p.lo;
                    const BoundValue sub = ess_bound(*nd.children[p.child], p.lo, p.hi, want_inf);
                    if (!any || (want_inf ? sub.value < best.value : sub.value > best.value))
                        best.value = sub.value;
                    best.exact = best.exact && sub.exact;
                    any = true;
                }
                const bool gap = covered < span * (1.0 - 1e-12);
                if (want_inf) {
                    if (gap) return {0.0, true};
                    if (!any) return {0.0, true};
                    return best;
                }
                if (!any) return {0.0, true};
                if (gap && best.value < 0.0) best.value = 0.0;
                return best;
            }
            case Kind::pow_of: {
                const double e = nd.param;
                if (e == 0.0) return {1.0, true};
                const BoundValue sub =
                    ess_bound(*nd.children[0], lo, hi, e > 0.0 ? want_inf : !want_inf);
                double v;
                if (sub.value == 0.0)
                    v = e > 0.0 ? 0.0 : kInf;
                else if (std::isinf(sub.value))
                    v = e > 0.0 ? kInf : 0.0;
                else
                    v = std::pow(sub.value, e);
                return {v, sub.exact};
            }
            case Kind::product: {
                // Constant factors scale an exact bound of a single live factor.
                double scale = 1.0;
                const Node* live = nullptr;
                bool ok = true;
                for (const auto& c : nd.children) {
                    if (direction(*c, lo, hi) == Monotone::constant) {
                        scale *= eval(*c, 0.5 * (lo + hi));
                    } else if (live == nullptr) {
                        live = c.get();
                    } else {
                        ok = false;
                        break;
                    }
                }
                if (ok && live != nullptr && scale >= 0.0) {
                    const BoundValue sub = ess_bound(*live, lo, hi, want_inf);
                    if (scale == 0.0) return {0.0, true};
                    return {scale * sub.value, sub.exact};
                }
                break;
            }
            case Kind::sum: {
                double base = 0.0;
                const Node* live = nullptr;
                bool ok = true;
                for (const auto& c : nd.children) {
                    if (direction(*c, lo, hi) == Monotone::constant) {
                        base += eval(*c, 0.5 * (lo + hi));
                    } else if (live == nullptr) {
                        live = c.get();
                    } else {
                        ok = false;
                        break;
                    }
                }
                if (ok && live != nullptr) {
                    const BoundValue sub = ess_bound(*live, lo, hi, want_inf);
                    return {base + sub.value, sub.exact};
                }
                break;
            }
            default: break;
        }

        // Sampled fallback: attained value, flagged approximate.
        ExtremumOptions opt;
        opt.log_spacing = lo > 0.0;
        opt.maximize = !want_inf;
        opt.samples = 257;
        opt.refine_rounds = 3;
        const Extremum ex = scan_extremum([&](double r) { return eval(nd, r); }, lo, hi, opt);
        return {ex.value, false};
    }

    static bool is_zero_on(const Node& nd, double lo, double hi) {
        switch (nd.kind) {
            case Kind::constant: return nd.param == 0.0;
            case Kind::power: return false;
            case Kind::log_power: return false;
            case Kind::piecewise: {
                for (const auto& p : effective_pieces(nd, lo, hi))
                    if (!is_zero_on(*nd.children[p.child], p.lo, p.hi)) return false;
                return true;
            }
            case Kind::sum:
                for (const auto& c : nd.children)
                    if (!is_zero_on(*c, lo, hi)) return false;
                return true;
            case Kind::product:
                for (const auto& c : nd.children)
                    if (is_zero_on(*c, lo, hi)) return true;
                return false;
            case Kind::pow_of: return nd.param > 0.0 && is_zero_on(*nd.children[0], lo, hi);
        }
        return false;
    }

    static bool vanishes_on_subset(const Node& nd, double lo, double hi) {
        switch (nd.kind) {
            case Kind::constant: return nd.param == 0.0;
            case Kind::power: return false;
            case Kind::log_power: return false;
            case Kind::piecewise: {
                double covered = 0.0;
                for (const auto& p : effective_pieces(nd, lo, hi)) {
                    covered += p.hi - p.lo;
                    if (vanishes_on_subset(*nd.children[p.child], p.lo, p.hi)) return true;
                }
                return covered < (hi - lo) * (1.0 - 1e-12);
            }
            case Kind::sum:
                // Sound only when every term is identically zero somewhere in
                // common; approximated by the identical-zero test.
                for (const auto& c : nd.children)
                    if (!is_zero_on(*c, lo, hi)) return false;
                return true;
            case Kind::product:
                for (const auto& c : nd.children)
                    if (vanishes_on_subset(*c, lo, hi)) return true;
                return false;
            case Kind::pow_of:
                return nd.param > 0.0 && vanishes_on_subset(*nd.children[0], lo, hi);
        }
        return false;
    }

    static bool infinite_on_subset(const Node& nd, double lo, double hi) {
        switch (nd.kind) {
            case Kind::constant:
            case Kind::power:
            case Kind::log_power: return false;
            case Kind::piecewise: {
                for (const auto& p : effective_pieces(nd, lo, hi))
                    if (infinite_on_subset(*nd.children[p.child], p.lo, p.hi)) return true;
                return false;
            }
            case Kind::sum:
            case Kind::product:
                for (const auto& c : nd.children)
                    if (infinite_on_subset(*c, lo, hi)) return true;
                return false;
            case Kind::pow_of: {
                if (nd.param < 0.0 && vanishes_on_subset(*nd.children[0], lo, hi)) return true;
                return infinite_on_subset(*nd.children[0], lo, hi);
            }
        }
        return false;
    }

    static std::optional<PowerLogMonomial> as_monomial(const Node& nd) {
        PowerLogMonomial m;
        switch (nd.kind) {
            case Kind::constant:
                m.coef = nd.param;
                return m;
            case Kind::power:
                (nd.shifted ? m.pow_shift : m.pow_plain) = nd.param;
                return m;
            case Kind::log_power:
                (nd.shifted ? m.log_shift : m.log_plain) = nd.param;
                return m;
            case Kind::product: {
                for (const auto& c : nd.children) {
                    const auto sub = as_monomial(*c);
                    if (!sub) return std::nullopt;
                    m.coef *= sub->coef;
                    m.pow_plain += sub->pow_plain;
                    m.pow_shift += sub->pow_shift;
                    m.log_plain += sub->log_plain;
                    m.log_shift += sub->log_shift;
                }
                return m;
            }
            case Kind::pow_of: {
                const auto sub = as_monomial(*nd.children[0]);
                if (!sub) return std::nullopt;
                if (sub->coef < 0.0) return std::nullopt;
                m.coef = sub->coef == 0.0 ? 0.0 : std::pow(sub->coef, nd.param);
                m.pow_plain = nd.param * sub->pow_plain;
                m.pow_shift = nd.param * sub->pow_shift;
                m.log_plain = nd.param * sub->log_plain;
                m.log_shift = nd.param * sub->log_shift;
                return m;
            }
            case Kind::sum: {
                if (nd.children.size() == 1) return as_monomial(*nd.children[0]);
                return std::nullopt;
            }
            case Kind::piecewise: return std::nullopt;
        }
        return std::nullopt;
    }

    static std::optional<double> lead_at_zero(const Node& nd) {
        switch (nd.kind) {
            case Kind::constant:
                if (nd.param == 0.0) return std::nullopt;
                return 0.0;
            case Kind::power: return nd.shifted ? 0.0 : nd.param;
            case Kind::log_power:
                if (!nd.shifted)
                    throw std::domain_error("profile: log(r) factor undefined near r = 0");
                return 0.0;
            case Kind::piecewise: {
                if (nd.bounds.empty()) return std::nullopt;
                if (nd.bounds.front().first > 0.0) return std::nullopt;  // zero near 0
                return lead_at_zero(*nd.children[0]);
            }
            case Kind::sum: {
                std::optional<double> lead;
                for (const auto& c : nd.children) {
                    const auto sub = lead_at_zero(*c);
                    if (!sub) continue;
                    if (!lead || *sub < *lead) lead = sub;
                }
                return lead;
            }
            case Kind::product: {
                double total = 0.0;
                for (const auto& c : nd.children) {
                    const auto sub = lead_at_zero(*c);
                    if (!sub) return std::nullopt;  // factor vanishes near 0
                    total += *sub;
                }
                return total;
            }
            case Kind::pow_of: {
                const auto sub = lead_at_zero(*nd.children[0]);
                if (!sub) {
                    if (nd.param < 0.0)
                        throw std::domain_error(
                            "profile: negative power of a profile vanishing near 0");
                    return std::nullopt;
                }
                return nd.param * *sub;
            }
        }
        return 0.0;
    }

    static double first_support(const Node& nd) {
        switch (nd.kind) {
            case Kind::piecewise:
                return nd.bounds.empty() ? kInf : nd.bounds.front().first;
            case Kind::sum: {
                double s = kInf;
                for (const auto& c : nd.children) s = std::min(s, first_support(*c));
                return s == kInf ? 0.0 : s;
            }
            case Kind::product: {
                double s = 0.0;
                for (const auto& c : nd.children) s = std::max(s, first_support(*c));
                return s;
            }
            case Kind::pow_of: return first_support(*nd.children[0]);
            default: return 0.0;
        }
    }

    static nlohmann::json to_json(const Node& nd) {
        nlohmann::json j;
        switch (nd.kind) {
            case Kind::constant:
                j["type"] = "const";
                j["value"] = nd.param;
                break;
            case Kind::power:
                j["type"] = "power";
                j["exponent"] = nd.param;
                j["shifted"] = nd.shifted;
                break;
            case Kind::log_power:
                j["type"] = "log_power";
                j["exponent"] = nd.param;
                j["shifted"] = nd.shifted;
                break;
            case Kind::piecewise: {
                j["type"] = "piecewise_annular";
                auto arr = nlohmann::json::array();
                for (std::size_t i = 0; i < nd.bounds.size(); ++i) {
                    nlohmann::json p;
                    p["r_lo"] = nd.bounds[i].first;
                    p["r_hi"] = nd.bounds[i].second;
                    p["profile"] = to_json(*nd.children[i]);
                    arr.push_back(std::move(p));
                }
                j["pieces"] = std::move(arr);
                if (nd.repeat > 1.0) j["repeat_ratio"] = nd.repeat;
                break;
            }
            case Kind::sum: {
                j["type"] = "sum";
                auto arr = nlohmann::json::array();
                for (const auto& c : nd.children) arr.push_back(to_json(*c));
                j["terms"] = std::move(arr);
                break;
            }
            case Kind::product: {
                j["type"] = "product";
                auto arr = nlohmann::json::array();
                for (const auto& c : nd.children) arr.push_back(to_json(*c));
                j["factors"] = std::move(arr);
                break;
            }
            case Kind::pow_of:
                j["type"] = "pow";
                j["exponent"] = nd.param;
                j["base"] = to_json(*nd.children[0]);
                break;
        }
        if (nd.annotation) {
            switch (*nd.annotation) {
                case Monotone::increasing: j["monotone"] = "increasing"; break;
                case Monotone::decreasing: j["monotone"] = "decreasing"; break;
                case Monotone::constant: j["monotone"] = "constant"; break;
                case Monotone::unknown: j["monotone"] = "unknown"; break;
            }
        }
        return j;
    }

    static double require_number(const nlohmann::json& j, const char* key,
                                 const std::string& path) {
        if (!j.contains(key) || !j[key].is_number())
            throw SchemaError("schema error at " + path + ": missing numeric '" + key + "'");
        return j[key].get<double>();
    }

    static detail::NodePtr parse(const nlohmann::json& j, const std::string& path);

    detail::NodePtr node_;

    friend RadialProfile make_profile(detail::NodePtr);
};

inline RadialProfile make_profile(detail::NodePtr nd) { return RadialProfile(std::move(nd)); }

inline RadialProfile RadialProfile::piecewise_annular(
    std::vector<std::pair<std::pair<double, double>, RadialProfile>> pieces,
    double repeat_ratio) {
    auto nd = std::make_shared<detail::ProfileNode>();
    nd->kind = detail::ProfileNode::Kind::piecewise;
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first.first < b.first.first; });
    double prev_hi = 0.0;
    bool first = true;
    for (auto& p : pieces) {
        const double lo = p.first.first, hi = p.first.second;
        if (!(lo >= 0.0) || !(hi > lo))
            throw std::invalid_argument("piecewise_annular: need 0 <= r_lo < r_hi");
        if (!first && lo < prev_hi)
            throw std::invalid_argument("piecewise_annular: pieces must not overlap");
        if (lo < p.second.min_domain())
            throw std::invalid_argument(
                "piecewise_annular: piece starts below its profile's domain");
        nd->bounds.emplace_back(lo, hi);
        nd->children.push_back(p.second.node_);
        prev_hi = hi;
        first = false;
    }
    if (repeat_ratio != 0.0) {
        if (!(repeat_ratio > 1.0) || !std::isfinite(repeat_ratio))
            throw std::invalid_argument("piecewise_annular: repeat_ratio must exceed 1");
        if (nd->bounds.empty())
            throw std::invalid_argument("piecewise_annular: repeat_ratio needs pieces");
        const double base_lo = nd->bounds.front().first;
        if (!(base_lo > 0.0))
            throw std::invalid_argument(
                "piecewise_annular: repeating pieces must start at a positive radius");
        if (nd->bounds.back().second > base_lo * repeat_ratio * (1.0 + 1e-12))
            throw std::invalid_argument(
                "piecewise_annular: pieces must fit inside one period "
                "[r_lo, r_lo * repeat_ratio]");
        nd->repeat = repeat_ratio;
    }
    return RadialProfile(std::move(nd));
}

inline detail::NodePtr RadialProfile::parse(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object())
        throw SchemaError("schema error at " + path + ": expected an object");
    if (!j.contains("type") || !j["type"].is_string())
        throw SchemaError("schema error at " + path + ": missing string 'type'");
    const std::string type = j["type"].get<std::string>();

    auto shifted_of = [&](const nlohmann::json& v) {
        if (!v.contains("shifted")) return false;
        if (!v["shifted"].is_boolean())
            throw SchemaError("schema error at " + path + ": 'shifted' must be boolean");
        return v["shifted"].get<bool>();
    };

    RadialProfile out = RadialProfile::constant(0.0);
    try {
        if (type == "const") {
            out = RadialProfile::constant(require_number(j, "value", path));
        } else if (type == "power") {
            out = RadialProfile::power(require_number(j, "exponent", path), shifted_of(j));
        } else if (type == "log_power") {
            out = RadialProfile::log_power(require_number(j, "exponent", path), shifted_of(j));
        } else if (type == "pow") {
            if (!j.contains("base"))
                throw SchemaError("schema error at " + path + ": pow needs 'base'");
            RadialProfile base = RadialProfile(parse(j["base"], path + ".base"));
            out = base.pow(require_number(j, "exponent", path));
        } else if (type == "sum" || type == "product") {
            const char* key = type == "sum" ? "terms" : "factors";
            if (!j.contains(key) || !j[key].is_array() || j[key].empty())
                throw SchemaError("schema error at " + path + ": '" + key +
                                  "' must be a non-empty array");
            std::vector<RadialProfile> parts;
            for (std::size_t i = 0; i < j[key].size(); ++i)
                parts.push_back(RadialProfile(
                    parse(j[key][i], path + "." + key + "[" + std::to_string(i) + "]")));
            out = type == "sum" ? RadialProfile::sum(std::move(parts))
                                : RadialProfile::product(std::move(parts));
        } else if (type == "piecewise_annular") {
            if (!j.contains("pieces") || !j["pieces"].is_array())
                throw SchemaError("schema error at " + path + ": 'pieces' must be an array");
            std::vector<std::pair<std::pair<double, double>, RadialProfile>> pieces;
            for (std::size_t i = 0; i < j["pieces"].size(); ++i) {
                const auto& pj = j["pieces"][i];
                const std::string ppath = path + ".pieces[" + std::to_string(i) + "]";
                if (!pj.is_object() || !pj.contains("profile"))
                    throw SchemaError("schema error at " + ppath + ": need r_lo, r_hi, profile");
                pieces.push_back({{require_number(pj, "r_lo", ppath),
                                   require_number(pj, "r_hi", ppath)},
                                  RadialProfile(parse(pj["profile"], ppath + ".profile"))});
            }
            double repeat = 0.0;
            if (j.contains("repeat_ratio")) repeat = require_number(j, "repeat_ratio", path);
            out = RadialProfile::piecewise_annular(std::move(pieces), repeat);
        } else {
            throw SchemaError("schema error at " + path + ": unknown type '" + type + "'");
        }
    } catch (const std::invalid_argument& e) {
        throw SchemaError("schema error at " + path + ": " + e.what());
    }

    if (j.contains("monotone")) {
        const std::string m = j["monotone"].get<std::string>();
        if (m == "increasing")
            out = out.annotated(Monotone::increasing);
        else if (m == "decreasing")
            out = out.annotated(Monotone::decreasing);
        else if (m == "constant")
            out = out.annotated(Monotone::constant);
        else if (m == "unknown")
            out = out.annotated(Monotone::unknown);
        else
            throw SchemaError("schema error at " + path + ": bad 'monotone' value '" + m + "'");
    }
    return out.node_;
}

// --- module operations ----------------------------------------------------

inline double eval_profile(const RadialProfile& p, double r) { return p(r); }

// Essential infimum over the annulus (r/ratio, ratio*r).
inline BoundValue ess_inf_annulus(const RadialProfile& p, double r, double ratio) {
    if (!(ratio > 1.0)) throw std::invalid_argument("ess_inf_annulus: need ratio > 1");
    if (!(r > 0.0)) throw std::invalid_argument("ess_inf_annulus: need r > 0");
    return p.ess_inf(r / ratio, ratio * r);
}

namespace detail {
inline void collect_edges_impl(const ProfileNode& nd, double lo, double hi,
                               std::vector<double>& edges) {
    if (nd.kind == ProfileNode::Kind::piecewise) {
        for (const auto& p : RadialProfile::piece_intervals(nd, lo, hi)) {
            if (p.lo > lo && p.lo < hi) edges.push_back(p.lo);
            if (p.hi > lo && p.hi < hi) edges.push_back(p.hi);
        }
    }
    for (const auto& c : nd.children) collect_edges_impl(*c, lo, hi, edges);
}
}  // namespace detail

inline void collect_piece_edges(const detail::ProfileNode& nd, double lo, double hi,
                                std::vector<double>& edges) {
    detail::collect_edges_impl(nd, lo, hi, edges);
}

// n-dimensional integral of a radial profile over the annulus r1 < |x| < r2:
//   omega_{n-1} * int_{r1}^{r2} p(rho) rho^{n-1} drho.
// Divergent integrals are reported with the `infinite` flag, detected
// symbolically for power/log leading terms and by refinement overflow
// otherwise.
inline QuadResult annulus_integral(const RadialProfile& p, double r1, double r2, int n,
                                   double rel_tol = 1e-9) {
    if (!(r1 >= 0.0) || !(r2 > r1)) throw std::invalid_argument("annulus_integral: bad radii");
    if (n < 1) throw std::invalid_argument("annulus_integral: need n >= 1");
    if (r1 < p.min_domain() - 1e-12)
        throw std::domain_error("annulus_integral: interval extends below the profile domain");

    QuadResult res;
    if (p.infinite_on_subset(r1, r2)) {
        res.infinite = true;
        return res;
    }

    const double omega = unit_sphere_area(n);
    auto f = [&](double rho) { return p(rho) * std::pow(rho, n - 1); };

    double lo = r1;
    double head = 0.0;
    if (r1 == 0.0) {
        const auto lead = p.leading_power_at_zero();
        if (!lead) {
            lo = std::min(p.first_support_radius(), r2);
        } else {
            const double a0 = *lead + (n - 1);
            if (a0 <= -1.0) {
                res.infinite = true;
                return res;
            }
            if (*lead < 0.0) {
                // Integrable singularity: closed-form head on the local
                // power model, adaptive body beyond.
                const double delta = r2 * 1e-7;
                const double c1 = p(0.4 * delta) * std::pow(0.4 * delta, -*lead);
                const double c2 = p(0.8 * delta) * std::pow(0.8 * delta, -*lead);
                const double c = 0.5 * (c1 + c2);
                head = c * std::pow(delta, a0 + 1.0) / (a0 + 1.0);
                lo = delta;
            }
        }
    } else {
        // Unshifted log factor with negative exponent is singular at r = 1.
        const auto mono = p.as_monomial();
        if (mono && mono->log_plain < 0.0 && r1 <= 1.0 + 1e-15) {
            if (mono->log_plain <= -1.0) {
                res.infinite = true;
                return res;
            }
            const double delta = 1.0 + (r2 - 1.0) * 1e-7;
            const double x = 1.0 + 0.5 * (delta - 1.0);
            const double c = f(x) * std::pow(std::log(x), -mono->log_plain);
            head = c * std::pow(delta - 1.0, mono->log_plain + 1.0) / (mono->log_plain + 1.0);
            lo = delta;
        }
    }

    // Seed panels at piece boundaries so discontinuities are never averaged.
    std::vector<double> edges{lo, r2};
    collect_piece_edges(p.node(), lo, r2, edges);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    res.converged = true;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        QuadResult part = integrate_gk(f, edges[i], edges[i + 1], rel_tol);
        if (part.infinite) {
            res.infinite = true;
            res.converged = false;
            return res;
        }
        res.value += part.value;
        res.abs_error += part.abs_error;
        res.panels += part.panels;
        res.converged = res.converged && part.converged;
    }
    res.value = omega * (res.value + head);
    res.abs_error *= omega;
    if (std::abs(res.value) > kQuadOverflow) res.infinite = true;
    return res;
}

// Reduction of |zeta|^p-growth coefficients to the unit-growth setting via
// v = |u|^{p-1} u; the effective absorption exponent becomes lambda / p.
struct PGrowth {
    double lambda_prime = 0.0;
    bool in_scope = false;  // the studied range needs lambda' > 1
    std::string note;
};

inline PGrowth p_growth_transform(double lambda, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("p_growth_transform: need p > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("p_growth_transform: need lambda > 0");
    PGrowth g;
    g.lambda_prime = lambda / p;
    g.in_scope = g.lambda_prime > 1.0;
    g.note = g.in_scope
                 ? "substitution v = |u|^{p-1} u reduces growth p to 1"
                 : "substitution v = |u|^{p-1} u gives lambda' <= 1: outside the studied range";
    return g;
}

}  // namespace liouville
