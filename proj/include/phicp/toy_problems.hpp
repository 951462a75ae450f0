#pragma once

#include <optional>

#include "phicp/algorithms.hpp"

namespace phicp {

/* The two scalar test problems, min x^4 + c x^2 with c = +1 (example 1,
 * convex) and c = -1 (example 2, two global minima at +-1/sqrt(2)), in the
 * three formulations the solvers accept. Example 2 has no convex conjugate
 * for g, so requesting its classical formulation is a construction error
 * rather than a silently divergent run.
 */

enum class Formulation { Classical, PhiCp, FullPhi };

struct ToyProblem {
    int example = 1;   // 1 or 2
    double c = 1.0;    // g = c x^2
    Formulation formulation = Formulation::Classical;

    std::vector<double> primal_refs;            // saddle x*
    std::optional<Vec> dual_ref_y;              // classical dual reference
    std::optional<QuadraticPhi> dual_ref_phi;   // pair dual reference

    ProblemSpec spec;
};

ToyProblem build_example(int which, Formulation formulation);

// min over reference saddles of |x - x*| (primal part only; the dual
// spaces differ between formulations and are reported separately).
double distance_to_saddle(double x, const ToyProblem& problem);

// distance of the run's dual variable to the formulation's dual reference
double dual_distance_to_saddle(const Dual& dual, const ToyProblem& problem);

// L(x, dual) for the problem's formulation; +inf off the conjugate domain.
double toy_lagrangian(const ToyProblem& problem, double x, const Dual& dual);

// fills dist_primal / dist_dual on every record (and the initial one)
void annotate_distances(Trace& trace, const ToyProblem& problem);

// smallest dist_primal over the whole annotated trace
double min_primal_distance(const Trace& trace);

}  // namespace phicp
