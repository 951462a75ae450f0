#include "phicp/algorithms.hpp"

#include <cmath>

#include "phicp/scalar_solvers.hpp"

namespace phicp {

namespace {

constexpr std::size_t kFullIterateDimCap = 64;
constexpr std::size_t kLargeRunSnapshots = 8;

TraceRecord make_record(long n, const Vec& x, const Vec& dual_u, double abar, std::optional<double> a_dual,
                        bool full) {
    TraceRecord r;
    r.n = n;
    r.x_norm = norm(x);
    r.dual_norm = norm(dual_u);
    if (full) {
        r.x = x;
        r.dual_u = dual_u;
    }
    r.abar = abar;
    r.a_dual = a_dual;
    return r;
}

void maybe_snapshot(Trace& tr, long n, const Vec& x, long total_iterations) {
    if (tr.full_iterates) return;
    const long stride = std::max<long>(1, total_iterations / static_cast<long>(kLargeRunSnapshots));
    if (n % stride == 0) tr.snapshots.emplace_back(n, x);
}

Vec solve_primal(const ProblemSpec& problem, const PhiProxRequest& req, long n) {
    try {
        return phi_prox_generic(problem.f_prox, req);
    } catch (prox_error& e) {
        e.set_iteration(n);
        throw;
    }
}

double coupling_margin_residual(const StepSizes& s, double abar_n, const Vec& x_n, const Vec& x_next) {
    const double lhs = (1.0 + 2.0 * s.sigma * abar_n) / std::sqrt(s.sigma * s.tau);
    const double r = norm(x_n) + norm(x_next);
    return lhs - 1.0 - r * r;
}

}  // namespace

LinearOperator LinearOperator::identity(double op_norm) {
    LinearOperator L;
    L.apply = [](const Vec& v) { return v; };
    L.apply_adjoint = [](const Vec& v) { return v; };
    L.op_norm = op_norm;
    return L;
}

StepSizes::StepSizes(double tau_, double sigma_, double op_norm_) : tau(tau_), sigma(sigma_), op_norm(op_norm_) {
    if (!(tau > 0.0) || !(sigma > 0.0) || !(op_norm >= 0.0) || !std::isfinite(tau) || !std::isfinite(sigma))
        throw std::invalid_argument("StepSizes: need tau, sigma > 0 and op_norm >= 0");
    if (!(tau * sigma * op_norm * op_norm < 1.0))
        throw std::invalid_argument("StepSizes: tau*sigma*||L||^2 = " +
                                    std::to_string(tau * sigma * op_norm * op_norm) + " must be < 1");
}

ASchedule ASchedule::constant(double a) { return {Policy::Constant, a, 0.0}; }
ASchedule ASchedule::quartic_feasible(double a0, double eps) { return {Policy::QuarticFeasible, a0, eps}; }
ASchedule ASchedule::quartic_full(double a0, double eps) { return {Policy::QuarticFull, a0, eps}; }
ASchedule ASchedule::inverse_square(double a0) { return {Policy::InverseSquare, a0, 0.0}; }
ASchedule ASchedule::decrement(double a0, double eps) { return {Policy::Decrement, a0, eps}; }

double ASchedule::next(double abar_n, long n, double x_next_norm_sq, double a_dual_next) const {
    switch (policy) {
        case Policy::Constant: return abar_n;
        case Policy::QuarticFeasible: return abar_n + 2.0 * x_next_norm_sq - eps;
        case Policy::QuarticFull: return abar_n + 2.0 * x_next_norm_sq - a_dual_next - eps;
        case Policy::InverseSquare: return n >= 1 ? abar_n - 1.0 / (static_cast<double>(n) * n) : abar_n;
        case Policy::Decrement: return abar_n - eps;
    }
    return abar_n;
}

std::string ASchedule::name() const {
    switch (policy) {
        case Policy::Constant: return "constant";
        case Policy::QuarticFeasible: return "quartic_feasible";
        case Policy::QuarticFull: return "quartic_full";
        case Policy::InverseSquare: return "inverse_square";
        case Policy::Decrement: return "decrement";
    }
    return "?";
}

PDState make_classical_init(const Vec& x0, const Vec& y0) {
    PDState s;
    s.x = x0;
    s.x_prev = x0;
    s.xbar = x0;
    s.dual = y0;
    return s;
}

PDState make_phi_init(const Vec& x0, const QuadraticPhi& phi0) {
    PDState s;
    s.x = x0;
    s.x_prev = x0;
    s.xbar = x0;
    s.dual = phi0;
    return s;
}

RunResult run_phi_cp(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                     const PDState& init, long iterations, const Alg1Options& opts) {
    if (!std::holds_alternative<Vec>(init.dual))
        throw std::invalid_argument("run_phi_cp: classical (vector) dual expected");
    if (!problem.gstar_prox)
        throw std::invalid_argument("run_phi_cp: problem provides no convex dual prox");

    PDState st = init;
    st.abar = sched.a0;
    st.stopped.reset();
    Vec y = std::get<Vec>(st.dual);

    Trace tr;
    tr.full_iterates = st.x.size() <= kFullIterateDimCap;
    tr.initial = make_record(0, st.x, y, st.abar, std::nullopt, tr.full_iterates);
    maybe_snapshot(tr, 0, st.x, iterations);

    const double stop_level = -1.0 / (2.0 * steps.sigma);
    for (long n = 0; n < iterations; ++n) {
        const Vec y_next = problem.gstar_prox(y, steps.tau, problem.L.apply(st.xbar));

        if (st.abar < stop_level) {
            st.stopped = StopInfo{"abar-infeasible", n};
            break;
        }

        PhiProxRequest req;
        req.sigma = steps.sigma;
        req.a0 = st.abar;
        if (opts.full_splitting) {
            const double denom = 1.0 + 2.0 * steps.sigma * st.abar;
            if (!(denom > 0.0)) {
                st.stopped = StopInfo{"abar-infeasible", n};
                break;
            }
            req.anchor = add_scaled(st.x, -steps.sigma / denom, problem.L.apply_adjoint(y_next));
        } else {
            req.anchor = st.x;
            req.tilt = problem.L.apply_adjoint(y_next);
        }
        const Vec x_next = solve_primal(problem, req, n);

        const double abar_next = sched.next(st.abar, n, norm_sq(x_next), 0.0);

        st.xbar = add_scaled(scaled(x_next, 2.0), -1.0, st.x);
        st.x_prev = st.x;
        st.x = x_next;
        y = y_next;
        st.abar = abar_next;
        st.n = n + 1;

        tr.records.push_back(make_record(n + 1, st.x, y, st.abar, std::nullopt, tr.full_iterates));
        maybe_snapshot(tr, n + 1, st.x, iterations);
    }
    st.dual = y;
    return {std::move(st), std::move(tr)};
}

RunResult run_classical_cp(const ProblemSpec& problem, const StepSizes& steps, const PDState& init,
                           long iterations) {
    // the zero element of J_sigma turns the quadratic-class prox into the
    // classical one, so the baseline is the same loop with a constant-0 schedule
    return run_phi_cp(problem, steps, ASchedule::constant(0.0), init, iterations);
}

namespace {

struct DualPairUpdate {
    bool feasible = false;
    double a = 0.0;
    Vec u;
};

// prox of the conjugate of c x^2 over pairs, at psi = (psi_a, psi_u):
// interior stationarity in a is (a - psi_a)(2a + tau + 2c)^2 = tau ||psi_u||^2,
// then u = 2 (a + c) psi_u / (tau + 2 (a + c)). Roots below -c are outside
// the conjugate's domain and are discarded.
DualPairUpdate solve_dual_pair_prox(double c, double tau, double psi_a, const Vec& psi_u, double a_prev) {
    const double t2c = tau + 2.0 * c;
    const CubicCoefficients cc{4.0, 4.0 * (t2c - psi_a), t2c * t2c - 4.0 * t2c * psi_a,
                               -t2c * t2c * psi_a - tau * norm_sq(psi_u)};
    std::vector<double> feasible;
    const double tol = 1e-12 * std::max(1.0, std::abs(c));
    for (double r : cubic_real_roots(cc))
        if (r >= -c - tol) feasible.push_back(std::max(r, -c));

    DualPairUpdate out;
    if (feasible.empty()) return out;
    out.feasible = true;
    out.a = root_select_closest(feasible, a_prev);
    out.u = scaled(psi_u, 2.0 * (out.a + c) / (tau + 2.0 * (out.a + c)));
    return out;
}

// tilt that folds phi(z) = -a z^2 + <u, z> into the quadratic surrogate:
// f(z) + phi(z) + (1/(2s)+abar)||z-x0||^2 = f(z) + <u - 2 a x0, z> + (1/(2s)+abar-a)||z-x0||^2 + const
PhiProxRequest tilted_request(const Vec& x0, double sigma, double abar, double a_dual, const Vec& u_dual) {
    PhiProxRequest req;
    req.anchor = x0;
    req.sigma = sigma;
    req.a0 = abar - a_dual;
    req.tilt = add_scaled(u_dual, -2.0 * a_dual, x0);
    return req;
}

}  // namespace

RunResult run_full_phi_cp(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                          const PDState& init, long iterations) {
    if (!std::holds_alternative<QuadraticPhi>(init.dual))
        throw std::invalid_argument("run_full_phi_cp: pair dual expected");
    if (!problem.g_quad_coeff)
        throw std::invalid_argument("run_full_phi_cp: needs g = c x^2 (g_quad_coeff unset)");
    const double c = *problem.g_quad_coeff;

    PDState st = init;
    st.abar = sched.a0;
    st.stopped.reset();
    QuadraticPhi phi = std::get<QuadraticPhi>(st.dual);

    Trace tr;
    tr.full_iterates = st.x.size() <= kFullIterateDimCap;
    tr.initial = make_record(0, st.x, phi.u, st.abar, phi.a, tr.full_iterates);

    const double stop_level = -1.0 / (2.0 * steps.sigma);
    for (long n = 0; n < iterations; ++n) {
        if (phi.a < -c) {
            st.stopped = StopInfo{"dual-boundary", n};
            break;
        }

        // prox center phi_n + tau (2 lift(x_n) - lift(x_{n-1}))
        const double psi_a = phi.a + steps.tau * (-2.0 * norm_sq(st.x) + norm_sq(st.x_prev));
        const Vec psi_u = add_scaled(phi.u, steps.tau, sub(scaled(st.x, 2.0), st.x_prev));

        const DualPairUpdate d = solve_dual_pair_prox(c, steps.tau, psi_a, psi_u, phi.a);
        if (!d.feasible) {
            st.stopped = StopInfo{"dual-infeasible", n};
            break;
        }

        if (st.abar < stop_level) {
            st.stopped = StopInfo{"abar-infeasible", n};
            break;
        }

        const Vec x_next = solve_primal(problem, tilted_request(st.x, steps.sigma, st.abar, d.a, d.u), n);
        const double mon = coupling_margin_residual(steps, st.abar, st.x, x_next);
        const double abar_next = sched.next(st.abar, n, norm_sq(x_next), d.a);

        st.xbar = add_scaled(scaled(x_next, 2.0), -1.0, st.x);
        st.x_prev = st.x;
        st.x = x_next;
        phi = {d.a, d.u};
        st.abar = abar_next;
        st.n = n + 1;

        TraceRecord rec = make_record(n + 1, st.x, phi.u, st.abar, phi.a, tr.full_iterates);
        rec.monitors.emplace_back("coupling_margin", mon);
        tr.records.push_back(std::move(rec));
    }
    st.dual = phi;
    return {std::move(st), std::move(tr)};
}

RunResult run_phi_cp_v2(const ProblemSpec& problem, const StepSizes& steps, const ASchedule& sched,
                        const PDState& init, long iterations, const Alg3Options& opts) {
    if (!std::holds_alternative<QuadraticPhi>(init.dual))
        throw std::invalid_argument("run_phi_cp_v2: pair dual expected");
    if (!problem.g_quad_coeff)
        throw std::invalid_argument("run_phi_cp_v2: needs g = c x^2 (g_quad_coeff unset)");
    const double c = *problem.g_quad_coeff;
    const double s = opts.branch == Alg3Options::SqrtBranch::Minus ? -1.0 : 1.0;

    PDState st = init;
    st.abar = sched.a0;
    st.stopped.reset();
    QuadraticPhi phi = std::get<QuadraticPhi>(st.dual);

    Trace tr;
    tr.full_iterates = st.x.size() <= kFullIterateDimCap;
    tr.initial = make_record(0, st.x, phi.u, st.abar, phi.a, tr.full_iterates);

    const double stop_level = -1.0 / (2.0 * steps.sigma);
    for (long n = 0; n < iterations; ++n) {
        if (phi.a < -c) {
            st.stopped = StopInfo{"dual-boundary", n};
            break;
        }

        const double a_next = phi.a - opts.dual_eps;
        if (a_next < -c) {
            st.stopped = StopInfo{"dual-infeasible", n};
            break;
        }
        // u_{n+1} = 2(a+c) [u_n + s tau sqrt(2) (x_n - x_{n-1}) + tau (2 x_n - x_{n-1})] / (2(a+c) + tau)
        const Vec dx = sub(st.x, st.x_prev);
        Vec num = add_scaled(phi.u, s * steps.tau * std::sqrt(2.0), dx);
        num = add_scaled(num, steps.tau, sub(scaled(st.x, 2.0), st.x_prev));
        const Vec u_next = scaled(num, 2.0 * (a_next + c) / (2.0 * (a_next + c) + steps.tau));

        if (opts.enforce_inequality && norm_sq(sub(phi.u, u_next)) > a_next - phi.a + 1e-15) {
            st.stopped = StopInfo{"dual-inadmissible", n};
            break;
        }

        if (st.abar < stop_level) {
            st.stopped = StopInfo{"abar-infeasible", n};
            break;
        }

        const Vec x_next = solve_primal(problem, tilted_request(st.x, steps.sigma, st.abar, a_next, u_next), n);
        const double mon = coupling_margin_residual(steps, st.abar, st.x, x_next);
        const double abar_next = sched.next(st.abar, n, norm_sq(x_next), a_next);

        st.xbar = add_scaled(scaled(x_next, 2.0), -1.0, st.x);
        st.x_prev = st.x;
        st.x = x_next;
        phi = {a_next, u_next};
        st.abar = abar_next;
        st.n = n + 1;

        TraceRecord rec = make_record(n + 1, st.x, phi.u, st.abar, phi.a, tr.full_iterates);
        rec.monitors.emplace_back("coupling_margin", mon);
        tr.records.push_back(std::move(rec));
    }
    st.dual = phi;
    return {std::move(st), std::move(tr)};
}

PpaResult run_phi_ppa(const PhiPpaProblem& problem, double gamma, const QuadraticPhi& phi0, long iterations,
                      bool restricted) {
    if (!(gamma > 0.0)) throw std::invalid_argument("run_phi_ppa: gamma must be positive");
    PpaResult res;
    res.phi = phi0;
    res.trace.push_back({0, phi0.a, phi0.u, problem.h_value(phi0), 0.0});

    for (long n = 0; n < iterations; ++n) {
        const std::optional<QuadraticPhi> next = problem.step(res.phi, gamma, restricted);
        if (!next || (restricted && norm_sq(sub(res.phi.u, next->u)) > next->a - res.phi.a + 1e-12)) {
            // no admissible phi_{n+1}: the algorithm returns the current iterate
            res.stopped = StopInfo{"no-admissible-step", n};
            break;
        }
        const double u_diff = norm(sub(res.phi.u, next->u));
        res.phi = *next;
        res.trace.push_back({n + 1, res.phi.a, res.phi.u, problem.h_value(res.phi), u_diff});
    }
    return res;
}

PhiPpaProblem make_quadratic_conjugate_ppa(double c, double xstar) {
    PhiPpaProblem P;
    P.h_value = [c, xstar](const QuadraticPhi& phi) {
        return conj_quadratic(c, phi) - phi_eval(phi, {xstar});
    };
    /* Subgradient-equation solver for h = conj - evaluation at xstar.
     *
     * Interior points (a > -c): w is an admissible subgradient direction iff
     * w + xstar equals the conjugate's gradient point u/(2(a+c)) and
     * w^2 + xstar^2 equals its square, which forces w * xstar = 0. So
     *   xstar = 0: any a works, u shrinks by u -> 2(a+c) u / (2(a+c)+gamma);
     *   xstar != 0: w = 0, pinning u_{n+1} = u_n and a_{n+1} = u_n/(2 xstar) - c.
     * The corner (-c, 0) admits w iff w * xstar <= 0.
     *
     * Policy: plain variant keeps a fixed when xstar = 0 (jumping to the
     * pinned pair when xstar != 0); restricted variant grows a by exactly
     * ||u_n - u_{n+1}||^2, the smallest admissible increase, found as a
     * cubic root.
     */
    P.step = [c, xstar](const QuadraticPhi& phi, double gamma,
                        bool restricted) -> std::optional<QuadraticPhi> {
        const double a = phi.a;
        const double u = phi.u.at(0);
        if (xstar == 0.0) {
            if (!(a > -c)) {
                // only the corner remains; admissible for any w when xstar = 0
                if (restricted && u * u > -c - a) return std::nullopt;
                return QuadraticPhi{-c, {0.0}};
            }
            if (!restricted) {
                const double u_next = 2.0 * (a + c) * u / (2.0 * (a + c) + gamma);
                return QuadraticPhi{a, {u_next}};
            }
            if (u == 0.0) return phi;
            // smallest a_next >= a with (a_next - a)(2(a_next + c) + gamma)^2 = gamma^2 u^2
            const double B = 2.0 * c + gamma;
            const CubicCoefficients cc{4.0, 4.0 * B - 4.0 * a, B * B - 4.0 * a * B,
                                       -a * B * B - gamma * gamma * u * u};
            std::optional<double> best;
            for (double r : cubic_real_roots(cc))
                if (r >= a - 1e-12 && r > -c && (!best || r < *best)) best = r;
            if (!best) return std::nullopt;
            const double a_next = std::max(*best, a);
            const double u_next = 2.0 * (a_next + c) * u / (2.0 * (a_next + c) + gamma);
            return QuadraticPhi{a_next, {u_next}};
        }
        // xstar != 0
        const double a_pin = u / (2.0 * xstar) - c;
        if (a_pin > -c && (!restricted || a_pin >= a)) return QuadraticPhi{a_pin, {u}};
        if (u * xstar <= 0.0 && (!restricted || u * u <= -c - a)) return QuadraticPhi{-c, {0.0}};
        return std::nullopt;
    };
    return P;
}

std::vector<double> monitor_saddle_gap(const Trace& trace, const Vec& x_star, const Vec& y_star,
                                     const StepSizes& steps, const ProblemSpec& problem) {
    if (!trace.full_iterates)
        throw std::invalid_argument("monitor_saddle_gap: needs a full-iterate trace");
    const auto lagrangian = [&](const Vec& x, const Vec& y) {
        return problem.f_value(x) + dot(problem.L.apply(x), y) - problem.gstar_value(y);
    };
    const Vec& x0 = trace.initial.x;
    const Vec& y0 = trace.initial.dual_u;
    const double abar0 = trace.initial.abar;
    const double shrink = (1.0 - std::sqrt(steps.sigma * steps.tau) * problem.L.op_norm) / (2.0 * steps.tau);

    std::vector<double> residuals;
    residuals.reserve(trace.records.size());
    double lhs = 0.0;
    for (const TraceRecord& rec : trace.records) {
        lhs += lagrangian(x_star, rec.dual_u) - lagrangian(rec.x, y_star);
        const double rhs = shrink * norm_sq(sub(y_star, rec.dual_u)) -
                           norm_sq(sub(y_star, y0)) / (2.0 * steps.tau) +
                           (1.0 / (2.0 * steps.sigma) + rec.abar) * norm_sq(sub(x_star, rec.x)) -
                           (1.0 / (2.0 * steps.sigma) + abar0) * norm_sq(sub(x_star, x0));
        residuals.push_back(lhs - rhs);
    }
    return residuals;
}

double monitor_jensen_wc(const std::function<double(const Vec&)>& f, double rho,
                         const std::vector<Vec>& points, const std::vector<double>& weights) {
    if (points.size() != weights.size() || points.empty())
        throw std::invalid_argument("monitor_jensen_wc: points/weights size mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < -1e-12) throw std::invalid_argument("monitor_jensen_wc: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw std::invalid_argument("monitor_jensen_wc: weights must sum to 1");

    Vec mix(points.front().size(), 0.0);
    double rhs = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mix = add_scaled(mix, weights[i], points[i]);
        rhs += weights[i] * f(points[i]);
        for (std::size_t j = 0; j < i; ++j)
            rhs += 0.5 * rho * weights[i] * weights[j] * norm_sq(sub(points[i], points[j]));
    }
    return rhs - f(mix);
}

Vec ergodic_average_x(const Trace& trace) {
    if (!trace.full_iterates)
        throw std::invalid_argument("ergodic_average_x: needs a full-iterate trace");
    Vec sum = trace.initial.x;
    for (const TraceRecord& rec : trace.records) sum = add_scaled(sum, 1.0, rec.x);
    return scaled(sum, 1.0 / static_cast<double>(trace.records.size() + 1));
}

}  // namespace phicp
