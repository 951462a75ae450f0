#include "phicp/prox_ops.hpp"

#include <cmath>

#include "phicp/scalar_solvers.hpp"

namespace phicp {

Vec shifted_prox_point(const PhiProxRequest& r) {
    const double beta = surrogate_beta(r);
    if (!(beta > 0.0)) throw std::invalid_argument("shifted_prox_point: 1/(2 sigma) + a0 must be positive");
    if (r.tilt.empty()) return r.anchor;
    return add_scaled(r.anchor, -1.0 / (2.0 * beta), r.tilt);
}

double prox_scaled_sq_conjugate(double y_n, double tau, double xbar) {
    if (!(tau > 0.0)) throw std::invalid_argument("prox_scaled_sq_conjugate: tau must be positive");
    return 2.0 * (y_n + tau * xbar) / (tau + 2.0);
}

Vec prox_ls_conjugate(const Vec& v_n, double tau, const Vec& Axbar, const Vec& y) {
    if (!(tau > 0.0)) throw std::invalid_argument("prox_ls_conjugate: tau must be positive");
    check_same_dim(v_n, Axbar, "prox_ls_conjugate");
    check_same_dim(v_n, y, "prox_ls_conjugate");
    Vec out(v_n.size());
    for (std::size_t i = 0; i < v_n.size(); ++i)
        out[i] = (v_n[i] + tau * (Axbar[i] - y[i])) / (tau + 1.0);
    return out;
}

double prox_binary_penalty(double y, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 0.5))
        throw std::invalid_argument("prox_binary_penalty: need 0 < alpha < 1/2, got " + std::to_string(alpha));
    const double ay = std::abs(y);
    if (ay > 1.0 + 2.0 * alpha) return y / (1.0 + 2.0 * alpha);
    if (ay < 1.0 - 2.0 * alpha) return y / (1.0 - 2.0 * alpha);
    return y >= 0.0 ? 1.0 : -1.0;
}

Vec prox_binary_penalty(const Vec& y, double alpha) {
    Vec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = prox_binary_penalty(y[i], alpha);
    return out;
}

QuarticProxResult phi_prox_quartic(const PhiProxRequest& req) {
    if (req.anchor.size() != 1 || (!req.tilt.empty() && req.tilt.size() != 1))
        throw std::invalid_argument("phi_prox_quartic: scalar problem expected");
    if (!(req.sigma > 0.0)) throw std::invalid_argument("phi_prox_quartic: sigma must be positive");
    const double x0 = req.anchor[0];
    const double tilt = req.tilt.empty() ? 0.0 : req.tilt[0];
    const double lin = 2.0 * req.a0 + 1.0 / req.sigma;
    const double rhs = (1.0 / req.sigma + 2.0 * req.a0) * x0 - tilt;
    // 4 x^3 + lin x - rhs = 0
    std::vector<double> roots = cubic_real_roots({4.0, 0.0, lin, -rhs});
    return {root_select_closest(roots, x0), std::move(roots)};
}

Vec phi_prox_generic(const SurrogateSolver& solver, const PhiProxRequest& req) {
    std::optional<Vec> out = solver(req);
    if (!out)
        throw prox_error("phi_prox_generic: surrogate solver failed (well-posedness assumption violated)",
                         norm(req.anchor), req.a0);
    return *std::move(out);
}

SurrogateSolver make_quartic_solver() {
    return [](const PhiProxRequest& req) -> std::optional<Vec> {
        return Vec{phi_prox_quartic(req).x};
    };
}

SurrogateSolver make_binary_penalty_solver() {
    return [](const PhiProxRequest& req) -> std::optional<Vec> {
        const double beta = surrogate_beta(req);
        if (!(beta > 1.0)) return std::nullopt;  // alpha = 1/(2 beta) must stay below 1/2
        return prox_binary_penalty(shifted_prox_point(req), 1.0 / (2.0 * beta));
    };
}

SurrogateSolver make_zero_solver() {
    return [](const PhiProxRequest& req) -> std::optional<Vec> {
        if (!(surrogate_beta(req) > 0.0)) return std::nullopt;
        return shifted_prox_point(req);
    };
}

}  // namespace phicp
