#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phicp/phi_core.hpp"
#include "phicp/prox_ops.hpp"
#include "phicp/vec.hpp"

namespace phicp {

/* Primal-dual iterations over the quadratic function class.
 *
 * Six schemes share the machinery here:
 *
 *   run_classical_cp  - Chambolle-Pock baseline (both proxes classical);
 *                       identical to run_phi_cp with the zero curvature
 *                       schedule.
 *   run_phi_cp        - quadratic-class primal prox, convex dual prox;
 *                       stops when the curvature schedule leaves the
 *                       admissible region abar >= -1/(2 sigma).
 *   run_full_phi_cp   - dual variable is itself a pair (a, u); the dual
 *                       prox for g = c x^2 reduces to one cubic in a plus
 *                       a closed-form u update.
 *   run_phi_cp_v2     - dual step built from quadratic-class subgradients
 *                       of the conjugate; a decremented by a fixed damping,
 *                       u updated by a closed form with a configurable
 *                       sqrt(2) sign branch.
 *   run_phi_ppa       - proximal point iteration on the dual space itself,
 *                       plain and restricted variants.
 *
 * Runs are deterministic: equal configuration gives bit-identical traces.
 */

struct LinearOperator {
    std::function<Vec(const Vec&)> apply;
    std::function<Vec(const Vec&)> apply_adjoint;
    double op_norm = 0.0;
    static LinearOperator identity(double op_norm = 1.0);
};

// Validated at construction: tau, sigma > 0 and tau * sigma * op_norm^2 < 1.
struct StepSizes {
    double tau;
    double sigma;
    double op_norm;
    StepSizes(double tau_, double sigma_, double op_norm_);
};

/* Curvature schedules for the primal prox parameter abar_n. The supporting
 * estimates only constrain the sequence (1 + 2 sigma a_n bounded away from
 * sqrt(sigma tau) ||L||, differences vanishing); the concrete policies are
 * the ones the experiments use:
 *
 *   constant         abar_{n+1} = abar_n
 *   quartic_feasible abar_{n+1} = abar_n + 2 x_{n+1}^2 - eps
 *   quartic_full     abar_{n+1} = abar_n + 2 x_{n+1}^2 - a_{n+1} - eps
 *   inverse_square   abar_{n+1} = abar_n - 1/n^2   (n >= 1; no-op at n = 0)
 *   decrement        abar_{n+1} = abar_n - eps
 */
struct ASchedule {
    enum class Policy { Constant, QuarticFeasible, QuarticFull, InverseSquare, Decrement };
    Policy policy = Policy::Constant;
    double a0 = 0.0;
    double eps = 1e-3;

    static ASchedule constant(double a);
    static ASchedule quartic_feasible(double a0, double eps = 1e-3);
    static ASchedule quartic_full(double a0, double eps = 1e-3);
    static ASchedule inverse_square(double a0);
    static ASchedule decrement(double a0, double eps = 1e-3);

    // value for iteration n+1, given completed iteration n (0-based)
    double next(double abar_n, long n, double x_next_norm_sq, double a_dual_next) const;
    std::string name() const;
};

using Dual = std::variant<Vec, QuadraticPhi>;

struct StopInfo {
    std::string reason;
    long iteration = 0;
};

struct PDState {
    long n = 0;
    Vec x, x_prev, xbar;
    Dual dual;
    double abar = 0.0;  // overwritten by the schedule's a0 when a run starts
    std::optional<StopInfo> stopped;
};

PDState make_classical_init(const Vec& x0, const Vec& y0);
PDState make_phi_init(const Vec& x0, const QuadraticPhi& phi0);

struct TraceRecord {
    long n = 0;
    Vec x;                  // retained for dims <= 64
    double x_norm = 0.0;
    Vec dual_u;             // y for classical duals, u for pair duals
    double dual_norm = 0.0;
    double abar = 0.0;      // schedule value entering iteration n
    std::optional<double> a_dual;
    std::optional<double> dist_primal;
    std::optional<double> dist_dual;
    std::vector<std::pair<std::string, double>> monitors;
};

struct Trace {
    bool full_iterates = true;
    TraceRecord initial;
    std::vector<TraceRecord> records;               // one per completed iteration
    std::vector<std::pair<long, Vec>> snapshots;    // sparse iterates for large dims
};

struct RunResult {
    PDState state;
    Trace trace;
};

// Oracle bundle for one saddle problem f(x) + coupling - g*(dual).
struct ProblemSpec {
    std::function<double(const Vec&)> f_value;
    SurrogateSolver f_prox;
    std::function<QuadraticPhi(const Vec& x0, double a)> f_subgrad;  // selection with explicit a

    std::function<Vec(const Vec& y, double tau, const Vec& Lxbar)> gstar_prox;  // convex dual update
    std::function<double(const Vec&)> gstar_value;
    std::optional<double> g_quad_coeff;  // c for g = c x^2; enables the pair-dual machinery

    LinearOperator L = LinearOperator::identity();
    double rho = 0.0;  // declared weak-convexity modulus of f
};

struct Alg1Options {
    // Replace the tilted surrogate by the full-splitting update
    // prox at x_n - sigma/(1 + 2 sigma abar_n) L* y_{n+1}.
    bool full_splitting = false;
};

RunResult run_phi_cp(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                     const PDState& init, long iterations, const Alg1Options& opts = {});

RunResult run_classical_cp(const ProblemSpec& problem, const StepSizes& steps, const PDState& init,
                           long iterations);

RunResult run_full_phi_cp(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                          const PDState& init, long iterations);

struct Alg3Options {
    double dual_eps = 1e-3;  // a_{n+1} = a_n - dual_eps
    enum class SqrtBranch { Plus, Minus };
    SqrtBranch branch = SqrtBranch::Minus;
    // Enforce ||u_n - u_{n+1}||^2 <= a_{n+1} - a_n instead of the damping
    // override. With a decreasing a this stops immediately; both modes are
    // kept because the two sources disagree.
    bool enforce_inequality = false;
};

RunResult run_phi_cp_v2(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                        const PDState& init, long iterations, const Alg3Options& opts = {});

/* Proximal point iteration on the dual space: find phi_{n+1} with
 * (u_n - u_{n+1}) / gamma a quadratic-class subgradient of h at phi_{n+1};
 * the restricted variant additionally demands
 * ||u_n - u_{n+1}||^2 <= a_{n+1} - a_n (so a is nondecreasing). When no
 * admissible next pair exists the run returns the current iterate.
 */
struct PpaRecord {
    long n = 0;
    double a = 0.0;
    Vec u;
    double h = 0.0;
    double u_diff = 0.0;  // ||u_n - u_{n+1}|| of the step that produced this record
};

struct PhiPpaProblem {
    std::function<double(const QuadraticPhi&)> h_value;
    // Returns an admissible phi_{n+1} or nullopt.
    std::function<std::optional<QuadraticPhi>(const QuadraticPhi& phi_n, double gamma, bool restricted)> step;
};

struct PpaResult {
    QuadraticPhi phi;
    std::optional<StopInfo> stopped;
    std::vector<PpaRecord> trace;  // entry 0 is the initial point
};

PpaResult run_phi_ppa(const PhiPpaProblem& problem, double gamma, const QuadraticPhi& phi0, long iterations,
                      bool restricted);

// h(phi) = conj_quadratic(c, phi) - phi(x*), with the closed-form
// subgradient-equation solver for both variants. Scalar primal space.
PhiPpaProblem make_quadratic_conjugate_ppa(double c, double xstar);

/* Residual series of the summed saddle-gap inequality: for each prefix
 * length N the value LHS - RHS with
 *   LHS = sum_{n=0}^{N} L(x*, y_{n+1}) - L(x_{n+1}, y*)
 *   RHS = (1 - sqrt(sigma tau) ||L||)/(2 tau) ||y* - y_{N+1}||^2
 *         - ||y* - y_0||^2 / (2 tau)
 *         + (1/(2 sigma) + abar_{N+1}) ||x* - x_{N+1}||^2
 *         - (1/(2 sigma) + abar_0) ||x* - x_0||^2,
 * where L(x, y) = f(x) + <Lx, y> - g*(y). Nonnegative on runs whose
 * hypotheses hold; used as a runtime validity monitor.
 */
std::vector<double> monitor_saddle_gap(const Trace& trace, const Vec& x_star, const Vec& y_star,
                                     const StepSizes& steps, const ProblemSpec& problem);

// Perturbed Jensen gap for rho-weakly convex f:
//   residual = sum_i w_i f(x_i) + (rho/2) sum_{i>j} w_i w_j ||x_i - x_j||^2
//              - f(sum_i w_i x_i),
// nonnegative up to rounding. Weights must be nonnegative and sum to one.
double monitor_jensen_wc(const std::function<double(const Vec&)>& f, double rho,
                         const std::vector<Vec>& points, const std::vector<double>& weights);

// (1/(N+1)) sum_{i=0}^{N} x_i over the whole trace (full-iterate traces only).
Vec ergodic_average_x(const Trace& trace);

}  // namespace phicp
