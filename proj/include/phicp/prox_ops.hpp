#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "phicp/errors.hpp"
#include "phicp/vec.hpp"

namespace phicp {

/* Proximal maps used by the splitting algorithms.
 *
 * The quadratic-class proximal step at anchor x0 with step sigma, curvature
 * offset a0 and a linear tilt solves
 *
 *     argmin_z  f(z) + <tilt, z> + (1/(2 sigma) + a0) ||z - x0||^2 .
 *
 * Writing beta = 1/(2 sigma) + a0, completing the square reduces this to a
 * classical prox at the shifted point x0 - tilt/(2 beta) with parameter
 * alpha = 1/(2 beta); that reduction lives here so the toy problems and the
 * tomography experiment share one code path.
 */

struct PhiProxRequest {
    Vec anchor;          // x0
    double sigma = 1.0;  // step, > 0
    double a0 = 0.0;     // curvature offset chosen from J_sigma
    Vec tilt;            // linear term <tilt, .>; empty mean zeros
};

inline double surrogate_beta(const PhiProxRequest& r) { return 1.0 / (2.0 * r.sigma) + r.a0; }

// x0 - tilt / (2 beta); requires beta > 0.
Vec shifted_prox_point(const PhiProxRequest& r);

// argmin_y y^2/4 - xbar*y + (y - y_n)^2 / (2 tau)  =  2 (y_n + tau xbar) / (tau + 2),
// the dual update for g(x) = x^2 with conjugate g*(y) = y^2/4.
double prox_scaled_sq_conjugate(double y_n, double tau, double xbar);

// Componentwise (v_n + tau (A xbar - y)) / (tau + 1): prox of the
// least-squares conjugate G*(v) = ||v||^2/2 + <v, y> with coupling <v, A xbar>.
Vec prox_ls_conjugate(const Vec& v_n, double tau, const Vec& Axbar, const Vec& y);

/* prox of alpha |z^2 - 1| at y, valid for 0 < alpha < 1/2:
 *
 *     y / (1 + 2 alpha)   if |y| > 1 + 2 alpha
 *     y / (1 - 2 alpha)   if |y| < 1 - 2 alpha
 *     y / |y|             otherwise  (band boundaries land here; sign(0) = +1)
 *
 * All three branches agree at the boundaries, so the map is continuous.
 */
double prox_binary_penalty(double y, double alpha);
Vec prox_binary_penalty(const Vec& y, double alpha);

struct QuarticProxResult {
    double x = 0.0;               // selected update
    std::vector<double> roots;    // all real roots considered
};

// Scalar quadratic-class prox of f(x) = x^4: solves
//   4 x^3 + (2 a0 + 1/sigma) x = (1/sigma + 2 a0) x0 - tilt
// and returns the real root closest to x0 (continuity selection).
QuarticProxResult phi_prox_quartic(const PhiProxRequest& req);

// Problem-supplied surrogate minimizer: given the request, return the
// argmin of f(z) + <tilt, z> + beta ||z - x0||^2, or nullopt on failure.
using SurrogateSolver = std::function<std::optional<Vec>(const PhiProxRequest&)>;

// Delegates to the supplied solver; a nullopt becomes a prox_error carrying
// the anchor and a0 (the standing well-posedness assumption did not hold).
Vec phi_prox_generic(const SurrogateSolver& solver, const PhiProxRequest& req);

// Ready-made solvers for the problem families in use.
SurrogateSolver make_quartic_solver();                 // f = x^4, scalar
SurrogateSolver make_binary_penalty_solver();          // f = sum_i |z_i^2 - 1|, needs beta > 1
SurrogateSolver make_zero_solver();                    // f = 0

}  // namespace phicp
