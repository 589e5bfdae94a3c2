#pragma once

// Weak-form verification on radial cutoffs.
//
// Test functions are radial plateaus: 1 on B_{r1}, 0 outside B_{r2}, with a
// smoothstep transition that is C^m at both junctions.  On the transition
// shell the function is a polynomial in z = (r2 - r)/(r2 - r1); iterated
// radial Laplacians stay inside the family sum_j P_j(z) r^{-j} because
// dz/dr is constant, so (-Delta)^k is evaluated exactly (polynomial
// bookkeeping), not by nested finite differences.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "math_util.hpp"
#include "quadrature.hpp"

namespace liouville {

inline double binomial(int n, int kk) {
    if (kk < 0 || kk > n) return 0.0;
    double v = 1.0;
    for (int i = 0; i < kk; ++i) v = v * double(n - i) / double(i + 1);
    return v;
}

// Polynomial coefficients (ascending) of the order-m smoothstep on [0, 1]:
// S_m(0) = 0, S_m(1) = 1, with m vanishing derivatives at both ends.
inline std::vector<double> smoothstep_coeffs(int m) {
    if (m < 0) throw std::invalid_argument("smoothstep_coeffs: need m >= 0");
    std::vector<double> c(std::size_t(2 * m + 2), 0.0);
    for (int j = 0; j <= m; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        c[std::size_t(m + 1 + j)] = sign * binomial(m + j, j) * binomial(2 * m + 1, m - j);
    }
    return c;
}

inline double smoothstep(int m, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const auto c = smoothstep_coeffs(m);
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
}

struct TestFunction {
    double r1 = 1.0;
    double r2 = 2.0;
    int order = 2;  // C^order at the junctions

    void validate() const {
        if (!(r1 > 0.0) || !(r2 > r1))
            throw std::invalid_argument("test function: need 0 < r1 < r2");
        if (order < 0) throw std::invalid_argument("test function: need order >= 0");
    }

    double operator()(double r) const {
        if (r <= r1) return 1.0;
        if (r >= r2) return 0.0;
        return smoothstep(order, (r2 - r) / (r2 - r1));
    }
};

// sum_j P_j(z) r^{-j} on the shell [r1, r2], closed under d/dr.
class ShellFunction {
  public:
    static ShellFunction transition(const TestFunction& t) {
        t.validate();
        ShellFunction s;
        s.r1_ = t.r1;
        s.r2_ = t.r2;
        s.beta_ = -1.0 / (t.r2 - t.r1);  // dz/dr
        s.terms_.push_back(smoothstep_coeffs(t.order));
        return s;
    }

    double operator()(double r) const {
        const double z = (r2_ - r) / (r2_ - r1_);
        double acc = 0.0;
        double rpow = 1.0;
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            if (j > 0) rpow /= r;
            const auto& P = terms_[j];
            double v = 0.0;
            for (std::size_t i = P.size(); i-- > 0;) v = v * z + P[i];
            acc += v * rpow;
        }
        return acc;
    }

    ShellFunction ddr() const {
        ShellFunction out = shell_like();
        out.terms_.assign(terms_.size() + 1, {});
        for (std::size_t j = 0; j < terms_.size(); ++j) {
            // d/dr [P(z) r^{-j}] = beta P'(z) r^{-j} - j P(z) r^{-j-1}
            accumulate(out.terms_[j], derivative(terms_[j]), beta_);
            accumulate(out.terms_[j + 1], terms_[j], -double(j));
        }
        out.trim();
        return out;
    }

    ShellFunction laplacian(int n) const {
        const ShellFunction d1 = ddr();
        const ShellFunction d2 = d1.ddr();
        ShellFunction out = shell_like();
        out.terms_ = d2.terms_;
        // + (n-1)/r * d1: shift every term one power of r down
        if (out.terms_.size() < d1.terms_.size() + 1) out.terms_.resize(d1.terms_.size() + 1);
        for (std::size_t j = 0; j < d1.terms_.size(); ++j)
            accumulate(out.terms_[j + 1], d1.terms_[j], double(n - 1));
        out.trim();
        return out;
    }

    ShellFunction polyharmonic(int k, int n) const {
        if (k < 1) throw std::invalid_argument("polyharmonic: need k >= 1");
        ShellFunction out = laplacian(n);
        for (int i = 1; i < k; ++i) out = out.laplacian(n);
        return out;
    }

    double r1() const { return r1_; }
    double r2() const { return r2_; }

  private:
    ShellFunction shell_like() const {
        ShellFunction s;
        s.r1_ = r1_;
        s.r2_ = r2_;
        s.beta_ = beta_;
        return s;
    }

    static std::vector<double> derivative(const std::vector<double>& P) {
        std::vector<double> d;
        for (std::size_t i = 1; i < P.size(); ++i) d.push_back(double(i) * P[i]);
        return d;
    }

    static void accumulate(std::vector<double>& dst, const std::vector<double>& src,
                           double scale) {
        if (scale == 0.0) return;
        if (dst.size() < src.size()) dst.resize(src.size(), 0.0);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
    }

    void trim() {
        while (!terms_.empty() && terms_.back().empty()) terms_.pop_back();
    }

    double r1_ = 0.0, r2_ = 0.0, beta_ = 0.0;
    std::vector<std::vector<double>> terms_;
};

// int u (-Delta)^k phi dx  >=  int b u^lambda phi dx  over R^n, both sides
// reduced to radial integrals.  Equality holds when (-Delta)^k u = b u^lambda
// pointwise on the support.
struct WeakFormCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_gap = 0.0;  // (lhs - rhs) / max(|lhs|, |rhs|)
    bool holds = false;
};

template <class U, class B>
WeakFormCheck verify_weak(U&& u, B&& b, double lambda, int k, int n, const TestFunction& test,
                          double rel_tol = 1e-9) {
    test.validate();
    if (!(lambda > 1.0)) throw std::invalid_argument("verify_weak: need lambda > 1");
    if (k < 1 || n < 1) throw std::invalid_argument("verify_weak: need k >= 1 and n >= 1");
    if (test.order < 2 * k)
        throw std::invalid_argument(
            "verify_weak: the test function must be C^{2k}; raise its order");

    const double omega = unit_sphere_area(n);
    const ShellFunction shell = ShellFunction::transition(test);
    const ShellFunction op = shell.polyharmonic(k, n);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;

    auto f_lhs = [&](double r) {
        return u(r) * sign * op(r) * std::pow(r, n - 1);
    };
    QuadResult L = integrate_gk(f_lhs, test.r1, test.r2, rel_tol);

    auto f_rhs_core = [&](double r) {
        return b(r) * std::pow(u(r), lambda) * std::pow(r, n - 1);
    };
    QuadResult R1 = integrate_gk(f_rhs_core, 0.0, test.r1, rel_tol);
    auto f_rhs_shell = [&](double r) { return f_rhs_core(r) * shell(r); };
    QuadResult R2 = integrate_gk(f_rhs_shell, test.r1, test.r2, rel_tol);

    WeakFormCheck chk;
    chk.lhs = omega * L.value;
    chk.rhs = omega * (R1.value + R2.value);
    const double scale = std::max(std::abs(chk.lhs), std::abs(chk.rhs));
    chk.rel_gap = scale > 0.0 ? (chk.lhs - chk.rhs) / scale : 0.0;
    chk.holds = chk.lhs >= chk.rhs - 1e-9 * scale;
    return chk;
}

// Radial Hoelder inequality over the annulus (ball when r1 = 0):
//   int f g dx <= (int f^lambda dx)^{1/lambda} (int g^{lambda'} dx)^{1/lambda'}
// with 1/lambda + 1/lambda' = 1.  Equality when f^lambda is proportional
// to g^{lambda'}.
struct HolderCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double factor_f = 0.0;  // (int f^lambda dx)^{1/lambda}
    double factor_g = 0.0;  // (int g^{lambda'} dx)^{1/lambda'}
    double slack = 0.0;     // rhs / lhs
    bool holds = false;
};

template <class F, class G>
HolderCheck holder_annulus_check(F&& f, G&& g, double r1, double r2, int n, double lambda,
                                 double rel_tol = 1e-9) {
    if (!(lambda > 1.0)) throw std::invalid_argument("holder_annulus_check: need lambda > 1");
    if (!(r1 >= 0.0) || !(r2 > r1))
        throw std::invalid_argument("holder_annulus_check: need 0 <= r1 < r2");
    const double lam2 = lambda / (lambda - 1.0);
    const double omega = unit_sphere_area(n);
    auto prod = [&](double r) { return f(r) * g(r) * std::pow(r, n - 1); };
    auto ff = [&](double r) { return std::pow(f(r), lambda) * std::pow(r, n - 1); };
    auto gg = [&](double r) { return std::pow(g(r), lam2) * std::pow(r, n - 1); };
    HolderCheck chk;
    chk.lhs = omega * integrate_gk(prod, r1, r2, rel_tol).value;
    chk.factor_f = std::pow(omega * integrate_gk(ff, r1, r2, rel_tol).value, 1.0 / lambda);
    chk.factor_g = std::pow(omega * integrate_gk(gg, r1, r2, rel_tol).value, 1.0 / lam2);
    chk.rhs = chk.factor_f * chk.factor_g;
    chk.slack = chk.lhs > 0.0 ? chk.rhs / chk.lhs : kInf;
    chk.holds = chk.lhs <= chk.rhs * (1.0 + 1e-9);
    return chk;
}

}  // namespace liouville
