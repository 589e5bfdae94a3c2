#pragma once

// Log-uniform radial grids and tabulated radial functions with power-log
// tail models.  Interpolation is 4-point Lagrange in log r; below the first
// node the value is held flat (all tabulated quantities here have finite
// limits at the origin); beyond the last node the tail model takes over.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "math_util.hpp"

namespace liouville {

struct LogGrid {
    double r_min = 1e-3;
    double r_max = 1e5;
    int count = 4096;
    std::vector<double> xs;
    double lx0 = 0.0;   // log(r_min)
    double step = 0.0;  // spacing in log r

    LogGrid() { rebuild(); }
    LogGrid(double rmin, double rmax, int n) : r_min(rmin), r_max(rmax), count(n) { rebuild(); }

    void rebuild() {
        if (!(r_min > 0.0) || !(r_max > r_min) || count < 8)
            throw std::invalid_argument("LogGrid: need 0 < r_min < r_max and count >= 8");
        xs = log_spaced(r_min, r_max, count);
        lx0 = std::log(r_min);
        step = (std::log(r_max) - lx0) / (count - 1);
    }

    LogGrid refined() const { return LogGrid(r_min, r_max, 2 * count); }
};

// coef * (2+r)^pow * log(2+r)^logpow, the closure of the function family
// produced by iterated radial Green's operators on power-log data.
struct TailModel {
    double coef = 0.0;
    double pow = 0.0;
    double logpow = 0.0;

    double operator()(double r) const {
        if (coef == 0.0) return 0.0;
        const double base = 2.0 + r;
        double v = coef * std::pow(base, pow);
        if (logpow != 0.0) v *= std::pow(std::log(base), logpow);
        return v;
    }
};

namespace detail {

// 4-point Lagrange interpolation at x given nodes x0..x3 (distinct).
inline double lagrange4(const double* xn, const double* yn, double x) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = yn[i];
        for (int j = 0; j < 4; ++j) {
            if (j == i) continue;
            w *= (x - xn[j]) / (xn[i] - xn[j]);
        }
        acc += w;
    }
    return acc;
}

}  // namespace detail

class TabulatedRadialFunction {
  public:
    TabulatedRadialFunction() = default;
    TabulatedRadialFunction(LogGrid grid, std::vector<double> values, TailModel tail)
        : grid_(std::move(grid)), ys_(std::move(values)), tail_(tail) {
        if (ys_.size() != grid_.xs.size())
            throw std::invalid_argument("TabulatedRadialFunction: value/node count mismatch");
    }

    const LogGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return ys_; }
    const TailModel& tail() const { return tail_; }
    double r_min() const { return grid_.r_min; }
    double r_max() const { return grid_.r_max; }

    double operator()(double r) const {
        if (!(r >= 0.0)) throw std::domain_error("tabulated function: radius must be >= 0");
        if (r <= grid_.r_min) return ys_.front();
        if (r >= grid_.r_max) return tail_.coef != 0.0 ? tail_(r) : ys_.back();
        const double lx = std::log(r);
        int j = int((lx - grid_.lx0) / grid_.step);
        int lo = j - 1;
        if (lo < 0) lo = 0;
        if (lo > grid_.count - 4) lo = grid_.count - 4;
        double xn[4], yn[4];
        for (int i = 0; i < 4; ++i) {
            xn[i] = grid_.lx0 + (lo + i) * grid_.step;
            yn[i] = ys_[std::size_t(lo + i)];
        }
        return detail::lagrange4(xn, yn, lx);
    }

    TabulatedRadialFunction scaled(double factor) const {
        TabulatedRadialFunction out = *this;
        for (auto& y : out.ys_) y *= factor;
        out.tail_.coef *= factor;
        return out;
    }

    void write_csv(std::ostream& os) const {
        os << "r,value\n";
        char buf[80];
        for (std::size_t i = 0; i < ys_.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid_.xs[i], ys_[i]);
            os << buf;
        }
    }

  private:
    LogGrid grid_;
    std::vector<double> ys_;
    TailModel tail_;
};

template <class F>
TabulatedRadialFunction tabulate(const LogGrid& grid, F&& f, TailModel tail = {}) {
    std::vector<double> ys;
    ys.reserve(grid.xs.size());
    for (double x : grid.xs) ys.push_back(f(x));
    return TabulatedRadialFunction(grid, std::move(ys), tail);
}

}  // namespace liouville
