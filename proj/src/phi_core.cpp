#include "phicp/phi_core.hpp"

#include <cmath>
#include <limits>

#include "phicp/scalar_solvers.hpp"

namespace phicp {

double phi_eval(const QuadraticPhi& phi, const Vec& x) {
    check_same_dim(phi.u, x, "phi_eval");
    return -phi.a * norm_sq(x) + dot(phi.u, x);
}

double phi_inner(const QuadraticPhi& p, const QuadraticPhi& q) {
    check_same_dim(p.u, q.u, "phi_inner");
    return p.a * q.a + dot(p.u, q.u);
}

double phi_norm(const QuadraticPhi& p) { return std::sqrt(phi_inner(p, p)); }

LiftedPoint lift(const Vec& x) { return {-norm_sq(x), x}; }

double pair_lifted(const QuadraticPhi& phi, const LiftedPoint& p) {
    check_same_dim(phi.u, p.x, "pair_lifted");
    return phi.a * p.s + dot(phi.u, p.x);
}

bool j_gamma_admissible(double gamma, double a) { return gamma > 0.0 && 2.0 * gamma * a >= -1.0; }

QuadraticPhi j_gamma_select(const Vec& x0, double gamma, double a) {
    if (!(gamma > 0.0)) throw std::invalid_argument("j_gamma_select: gamma must be positive");
    if (!j_gamma_admissible(gamma, a))
        throw membership_error("j_gamma_select: 2*gamma*a = " + std::to_string(2.0 * gamma * a) +
                               " < -1, pair not in J_gamma");
    return {a, scaled(x0, 1.0 / gamma + 2.0 * a)};
}

double conj_quadratic(double c, const QuadraticPhi& phi) {
    if (phi.a == -c && norm_sq(phi.u) == 0.0) return 0.0;
    if (phi.a > -c) return norm_sq(phi.u) / (4.0 * (phi.a + c));
    return std::numeric_limits<double>::infinity();
}

bool quartic_subgrad_admissible(double x0, double a) { return a >= -2.0 * x0 * x0; }

QuadraticPhi subdiff_quartic(double x0, double a) {
    if (!quartic_subgrad_admissible(x0, a))
        throw membership_error("subdiff_quartic: a = " + std::to_string(a) + " < -2*x0^2 = " +
                               std::to_string(-2.0 * x0 * x0));
    return {a, {4.0 * x0 * x0 * x0 + 2.0 * a * x0}};
}

std::optional<QuadraticPhi> conj_subgrad_convex(double c, const QuadraticPhi& phi0) {
    if (!(phi0.a > -c)) return std::nullopt;
    const Vec ubar = scaled(phi0.u, 1.0 / (2.0 * (phi0.a + c)));
    return QuadraticPhi{-norm_sq(ubar), ubar};
}

PhiSubgradSet conj_subgrad_phi(double c, const QuadraticPhi& phi0) {
    if (phi0.u.size() != 1)
        throw std::invalid_argument("conj_subgrad_phi: scalar primal space expected");
    if (phi0.a == -c && phi0.u[0] == 0.0) return {PhiSubgradSet::Kind::WholeLine, 0.0};
    if (phi0.a > -c) return {PhiSubgradSet::Kind::Singleton, phi0.u[0] / (2.0 * (phi0.a + c))};
    return {PhiSubgradSet::Kind::Empty, 0.0};
}

SubgradientCertificate certify_subgradient(const std::function<double(double)>& f, const QuadraticPhi& phi,
                                           double x0, const GridSpec& grid) {
    if (phi.u.size() != 1)
        throw std::invalid_argument("certify_subgradient: scalar problems only");
    const double fx0 = f(x0);
    const double phix0 = phi_eval(phi, {x0});
    GridPoint worst = grid_argmin(
        [&](double y) { return f(y) - fx0 - phi_eval(phi, {y}) + phix0; }, grid.lo, grid.hi, grid.step);
    return {phi, x0, worst.value};
}

}  // namespace phicp
