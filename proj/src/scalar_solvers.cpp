#include "phicp/scalar_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace phicp {

namespace {

double eval_cubic(const CubicCoefficients& c, double t) {
    return ((c.c3 * t + c.c2) * t + c.c1) * t + c.c0;
}

double eval_cubic_deriv(const CubicCoefficients& c, double t) {
    return (3.0 * c.c3 * t + 2.0 * c.c2) * t + c.c1;
}

double newton_polish(const CubicCoefficients& c, double t) {
    const double d = eval_cubic_deriv(c, t);
    if (d == 0.0 || !std::isfinite(d)) return t;
    const double t1 = t - eval_cubic(c, t) / d;
    return std::isfinite(t1) ? t1 : t;
}

std::vector<double> quadratic_real_roots(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) {
            if (c == 0.0) throw std::invalid_argument("cubic_real_roots: all coefficients zero");
            return {};  // nonzero constant, no roots
        }
        return {-c / b};
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return {};
    const double sq = std::sqrt(disc);
    // Citardauq-stable split
    const double q = -0.5 * (b + std::copysign(sq, b));
    std::vector<double> roots;
    roots.push_back(q / a);
    if (q != 0.0)
        roots.push_back(c / q);
    else
        roots.push_back(0.0);
    std::sort(roots.begin(), roots.end());
    if (disc == 0.0 || std::abs(roots[1] - roots[0]) < 1e-14 * std::max(1.0, std::abs(roots[0])))
        roots.pop_back();
    return roots;
}

}  // namespace

std::vector<double> cubic_real_roots(const CubicCoefficients& c) {
    if (!std::isfinite(c.c3) || !std::isfinite(c.c2) || !std::isfinite(c.c1) || !std::isfinite(c.c0))
        throw std::invalid_argument("cubic_real_roots: non-finite coefficient");
    if (c.c3 == 0.0) return quadratic_real_roots(c.c2, c.c1, c.c0);

    // monic form t^3 + a t^2 + b t + d
    const double a = c.c2 / c.c3;
    const double b = c.c1 / c.c3;
    const double d = c.c0 / c.c3;

    const double q = (a * a - 3.0 * b) / 9.0;
    const double r = (a * (2.0 * a * a - 9.0 * b) + 27.0 * d) / 54.0;
    const double r2 = r * r;
    const double q3 = q * q * q;
    const double scale = std::max({std::abs(r2), std::abs(q3), 1e-300});
    const double disc = r2 - q3;  // > 0: one real root, < 0: three

    std::vector<double> roots;
    if (disc < -1e-12 * scale) {
        // three distinct real roots, trigonometric branch
        const double theta = std::acos(std::clamp(r / std::sqrt(q3), -1.0, 1.0));
        const double m = -2.0 * std::sqrt(q);
        roots = {m * std::cos(theta / 3.0) - a / 3.0,
                 m * std::cos((theta + 2.0 * M_PI) / 3.0) - a / 3.0,
                 m * std::cos((theta - 2.0 * M_PI) / 3.0) - a / 3.0};
    } else if (disc > 1e-12 * scale) {
        // single real root, Cardano
        const double s = -r - std::copysign(std::sqrt(disc), r);
        const double u = std::cbrt(s);
        const double v = (u == 0.0) ? 0.0 : q / u;
        roots = {u + v - a / 3.0};
    } else {
        // degenerate band: triple root when q ~ 0, else a double plus a simple
        if (std::abs(q) <= 1e-12 * std::max(1.0, a * a)) {
            roots = {-a / 3.0};
        } else {
            const double sq = std::sqrt(std::max(q, 0.0));
            const double s = std::copysign(sq, r);
            roots = {-2.0 * s - a / 3.0, s - a / 3.0};
        }
    }

    for (double& t : roots) t = newton_polish(c, t);
    std::sort(roots.begin(), roots.end());

    // collapse multiplicities
    std::vector<double> out;
    for (double t : roots) {
        if (out.empty() || std::abs(t - out.back()) > 1e-9 * std::max(1.0, std::abs(t)))
            out.push_back(t);
    }
    return out;
}

double root_select_closest(const std::vector<double>& roots, double previous) {
    if (roots.empty()) throw std::invalid_argument("root_select_closest: empty root list");
    double best = roots.front();
    double best_d = std::abs(best - previous);
    for (std::size_t i = 1; i < roots.size(); ++i) {
        const double d = std::abs(roots[i] - previous);
        if (d < best_d || (d == best_d && roots[i] < best)) {
            best = roots[i];
            best_d = d;
        }
    }
    return best;
}

GridPoint grid_argmin(const std::function<double(double)>& fn, double lo, double hi, double step) {
    if (!(lo < hi) || !(step > 0.0)) throw std::invalid_argument("grid_argmin: need lo < hi and step > 0");
    const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    GridPoint best{lo, std::numeric_limits<double>::infinity()};
    for (long k = 0; k <= count; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        const double v = fn(x);
        if (!std::isfinite(v)) throw numeric_error("grid_argmin: non-finite value at x=" + std::to_string(x), x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

GridPoint grid_argmax(const std::function<double(double)>& fn, double lo, double hi, double step) {
    GridPoint p = grid_argmin([&fn](double x) { return -fn(x); }, lo, hi, step);
    return {p.x, -p.value};
}

}  // namespace phicp
