#pragma once

#include <functional>
#include <vector>

#include "phicp/errors.hpp"

namespace phicp {

// Coefficients of c3*t^3 + c2*t^2 + c1*t + c0. c3 = 0 degrades to the
// quadratic/linear solver.
struct CubicCoefficients {
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;
};

/* Real roots in ascending order, multiplicity collapsed.
 *
 * Three distinct real roots go through the trigonometric formula, a single
 * real root through Cardano; each root gets one Newton polish step. The
 * 1-vs-3 branch is decided by the discriminant with a relative threshold of
 * 1e-12: inside that band the root pattern is treated as degenerate and the
 * double root is reported once (so a near-degenerate cubic yields 2 values,
 * an exact triple root 1 value). The fixed threshold keeps the branch from
 * flipping between consecutive iterates of an outer algorithm.
 *
 * Throws invalid_argument when every coefficient is zero. A nonzero
 * constant with c3=c2=c1=0 has no roots and yields an empty list.
 */
std::vector<double> cubic_real_roots(const CubicCoefficients& c);

// Root nearest to `previous`; ties break toward the smaller root so traces
// reproduce bit-for-bit. Throws invalid_argument on an empty list.
double root_select_closest(const std::vector<double>& roots, double previous);

struct GridPoint {
    double x = 0.0;
    double value = 0.0;
};

/* Brute-force scan of fn over {lo, lo+step, ..., hi}: deterministic
 * left-to-right order with strict-less-than replacement, so the first
 * minimum wins. Used throughout the test suite as the independent oracle
 * for closed-form minimizers. Throws numeric_error (carrying the grid
 * point) if fn returns a non-finite value.
 */
GridPoint grid_argmin(const std::function<double(double)>& fn, double lo, double hi, double step);

// sup over the same grid; thin wrapper around grid_argmin of -fn.
GridPoint grid_argmax(const std::function<double(double)>& fn, double lo, double hi, double step);

}  // namespace phicp
