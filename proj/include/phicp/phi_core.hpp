#pragma once

#include <functional>
#include <optional>

#include "phicp/errors.hpp"
#include "phicp/vec.hpp"

namespace phicp {

/* Calculus over the quadratic function class
 *
 *     phi = (a, u),   phi(x) = -a ||x||^2 + <u, x>,
 *
 * the dual objects of the splitting algorithms in this library. The pair
 * (a, u) is the whole representation; the function is never materialized.
 * Identifying the class with R x X gives it the inner product
 *
 *     <phi, psi> = a_phi a_psi + <u_phi, u_psi>,
 *
 * under which the embedding x -> (-||x||^2, x) turns evaluation into a
 * pairing: phi(x) = <phi, lift(x)>.
 *
 * Closed forms are provided for the families the experiments need:
 * h(x) = c||x||^2 (conjugate, convex subgradient of the conjugate,
 * quadratic-class subgradient of the conjugate) and f(x) = x^4 (scalar
 * subgradient selection). Everything else is checked against brute-force
 * grid oracles in the verification suites.
 */

struct QuadraticPhi {
    double a = 0.0;  // curvature coefficient
    Vec u;           // linear coefficient, same dimension as the primal space
};

// (-||x||^2, x), the embedding of a primal point into R x X.
struct LiftedPoint {
    double s = 0.0;
    Vec x;
};

double phi_eval(const QuadraticPhi& phi, const Vec& x);
double phi_inner(const QuadraticPhi& p, const QuadraticPhi& q);
double phi_norm(const QuadraticPhi& p);

LiftedPoint lift(const Vec& x);
// <phi, (s, x)> on R x X; equals phi_eval(phi, x) when (s, x) = lift(x).
double pair_lifted(const QuadraticPhi& phi, const LiftedPoint& p);

// Membership test and element selection for the duality map
//   J_gamma(x0) = { (a, (1/gamma + 2a) x0) : 2 gamma a >= -1 },
// the quadratic-class subdifferential of ||.||^2 / (2 gamma). The a is the
// caller's policy; selection outside the membership region throws.
bool j_gamma_admissible(double gamma, double a);
QuadraticPhi j_gamma_select(const Vec& x0, double gamma, double a);

/* Conjugate of h(x) = c ||x||^2 over the quadratic class:
 *
 *   h*(a, u) = 0                     if a = -c and u = 0
 *            = ||u||^2 / (4 (a + c)) if a > -c
 *            = +inf                  otherwise.
 */
double conj_quadratic(double c, const QuadraticPhi& phi);

// Subgradient selection for f(x) = x^4 (scalar): (a, 4 x0^3 + 2 a x0) is a
// valid quadratic-class subgradient at x0 exactly when a >= -2 x0^2.
bool quartic_subgrad_admissible(double x0, double a);
QuadraticPhi subdiff_quartic(double x0, double a);

// Convex subgradient of h* (h = c||x||^2) at phi0 on R x X: the pair
// (-ubar^2, ubar) with ubar = u0 / (2 (a0 + c)) when a0 > -c; empty
// otherwise. An empty result is an answer, not an error.
std::optional<QuadraticPhi> conj_subgrad_convex(double c, const QuadraticPhi& phi0);

// Quadratic-class subgradient set of h* at phi0 (scalar primal space):
// the whole line at phi0 = (-c, 0), the singleton u0 / (2 (a0 + c)) for
// a0 > -c, empty otherwise.
struct PhiSubgradSet {
    enum class Kind { Empty, Singleton, WholeLine };
    Kind kind = Kind::Empty;
    double value = 0.0;  // meaningful for Singleton only
};
PhiSubgradSet conj_subgrad_phi(double c, const QuadraticPhi& phi0);

/* Sampled witness that phi supports f at the anchor:
 *   slack = min over a grid of y of [ f(y) - f(x0) - phi(y) + phi(x0) ],
 * nonnegative (up to tolerance) iff phi is a subgradient on that grid.
 * Scalar problems only; defaults follow the toy problems, [-10,10] step 1e-4.
 */
struct GridSpec {
    double lo = -10.0, hi = 10.0, step = 1e-4;
};

struct SubgradientCertificate {
    QuadraticPhi phi;
    double anchor = 0.0;
    double slack = 0.0;
    bool valid(double tol = 1e-8) const { return slack >= -tol; }
};

SubgradientCertificate certify_subgradient(const std::function<double(double)>& f, const QuadraticPhi& phi,
                                           double x0, const GridSpec& grid = {});

}  // namespace phicp
