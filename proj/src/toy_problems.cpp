#include "phicp/toy_problems.hpp"

#include <cmath>
#include <limits>

namespace phicp {

ToyProblem build_example(int which, Formulation formulation) {
    if (which != 1 && which != 2) throw std::invalid_argument("build_example: which must be 1 or 2");
    // g = -x^2 has no convex conjugate, so both formulations whose dual step
    // is a classical prox are rejected, not silently mis-wired
    if (which == 2 && formulation != Formulation::FullPhi)
        throw std::invalid_argument("build_example: example 2 has nonconvex g = -x^2; only the pair-dual "
                                    "formulation applies");

    ToyProblem p;
    p.example = which;
    p.c = which == 1 ? 1.0 : -1.0;
    p.formulation = formulation;

    if (which == 1) {
        p.primal_refs = {0.0};
        // the first two formulations keep the classical dual space
        if (formulation == Formulation::FullPhi)
            p.dual_ref_phi = QuadraticPhi{-1.0, {0.0}};
        else
            p.dual_ref_y = Vec{0.0};
    } else {
        p.primal_refs = {-1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
        p.dual_ref_phi = QuadraticPhi{1.0, {0.0}};
    }

    ProblemSpec& s = p.spec;
    s.f_value = [](const Vec& x) {
        const double v = x.at(0);
        return v * v * v * v;
    };
    s.f_prox = make_quartic_solver();
    s.f_subgrad = [](const Vec& x0, double a) { return subdiff_quartic(x0.at(0), a); };
    s.L = LinearOperator::identity();
    s.rho = which == 2 ? 2.0 : 0.0;  // x^4 - x^2 is 2-weakly convex

    if (formulation == Formulation::Classical || formulation == Formulation::PhiCp) {
        // g(x) = x^2, g*(y) = y^2 / 4
        s.gstar_value = [](const Vec& y) {
            const double v = y.at(0);
            return v * v / 4.0;
        };
        s.gstar_prox = [](const Vec& y, double tau, const Vec& Lxbar) {
            return Vec{prox_scaled_sq_conjugate(y.at(0), tau, Lxbar.at(0))};
        };
    }
    s.g_quad_coeff = p.c;
    return p;
}

double distance_to_saddle(double x, const ToyProblem& problem) {
    double best = std::numeric_limits<double>::infinity();
    for (double ref : problem.primal_refs) best = std::min(best, std::abs(x - ref));
    return best;
}

double dual_distance_to_saddle(const Dual& dual, const ToyProblem& problem) {
    if (std::holds_alternative<Vec>(dual)) {
        if (!problem.dual_ref_y) throw std::invalid_argument("dual_distance_to_saddle: no classical reference");
        return norm(sub(std::get<Vec>(dual), *problem.dual_ref_y));
    }
    if (!problem.dual_ref_phi) throw std::invalid_argument("dual_distance_to_saddle: no pair reference");
    const QuadraticPhi& phi = std::get<QuadraticPhi>(dual);
    const QuadraticPhi diff{phi.a - problem.dual_ref_phi->a, sub(phi.u, problem.dual_ref_phi->u)};
    return phi_norm(diff);
}

double toy_lagrangian(const ToyProblem& problem, double x, const Dual& dual) {
    const double fx = x * x * x * x;
    if (std::holds_alternative<Vec>(dual)) {
        const double y = std::get<Vec>(dual).at(0);
        return fx + x * y - problem.spec.gstar_value(Vec{y});
    }
    const QuadraticPhi& phi = std::get<QuadraticPhi>(dual);
    return fx + phi_eval(phi, {x}) - conj_quadratic(problem.c, phi);
}

namespace {

void annotate_record(TraceRecord& rec, const ToyProblem& problem) {
    if (rec.x.empty()) return;
    rec.dist_primal = distance_to_saddle(rec.x[0], problem);
    if (rec.a_dual) {
        if (problem.dual_ref_phi)
            rec.dist_dual = dual_distance_to_saddle(QuadraticPhi{*rec.a_dual, rec.dual_u}, problem);
    } else if (problem.dual_ref_y) {
        rec.dist_dual = dual_distance_to_saddle(rec.dual_u, problem);
    }
}

}  // namespace

void annotate_distances(Trace& trace, const ToyProblem& problem) {
    annotate_record(trace.initial, problem);
    for (TraceRecord& rec : trace.records) annotate_record(rec, problem);
}

double min_primal_distance(const Trace& trace) {
    double best = std::numeric_limits<double>::infinity();
    if (trace.initial.dist_primal) best = *trace.initial.dist_primal;
    for (const TraceRecord& rec : trace.records)
        if (rec.dist_primal) best = std::min(best, *rec.dist_primal);
    return best;
}

}  // namespace phicp
