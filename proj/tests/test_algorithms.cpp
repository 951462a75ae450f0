#include <doctest.h>

#include <cmath>

#include "phicp/algorithms.hpp"
#include "phicp/io.hpp"
#include "phicp/rng.hpp"
#include "phicp/toy_problems.hpp"

using namespace phicp;

namespace {

const StepSizes kPaperSteps{0.25, 0.25, 1.0};

}  // namespace

TEST_SUITE("algorithms") {

    TEST_CASE("step sizes are validated at construction") {
        CHECK_THROWS_AS(StepSizes(1.1, 1.1, 1.0), std::invalid_argument);  // 1.21 >= 1
        CHECK_THROWS_AS(StepSizes(-0.1, 0.25, 1.0), std::invalid_argument);
        CHECK_NOTHROW(StepSizes(0.25, 0.25, 1.0));
        CHECK_NOTHROW(StepSizes(10.0, 10.0, 0.0));
    }

    TEST_CASE("schedules emit the documented sequences") {
        CHECK(ASchedule::constant(3.0).next(3.0, 5, 2.0, 1.0) == 3.0);
        CHECK(ASchedule::quartic_feasible(0, 1e-3).next(1.0, 0, 4.0, 0.0) == doctest::Approx(1.0 + 8.0 - 1e-3));
        CHECK(ASchedule::quartic_full(0, 1e-3).next(1.0, 0, 4.0, 2.0) == doctest::Approx(1.0 + 8.0 - 2.0 - 1e-3));
        CHECK(ASchedule::inverse_square(0).next(5.0, 0, 1.0, 0.0) == 5.0);  // no decrement at n = 0
        CHECK(ASchedule::inverse_square(0).next(5.0, 2, 1.0, 0.0) == doctest::Approx(5.0 - 0.25));
        CHECK(ASchedule::decrement(0, 1e-3).next(5.0, 9, 1.0, 0.0) == doctest::Approx(5.0 - 1e-3));
    }

    TEST_CASE("zero iterations return the initialization with an empty trace") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const RunResult r =
            run_phi_cp(toy.spec, kPaperSteps, ASchedule::constant(100.0), make_classical_init({5.0}, {10.0}), 0);
        CHECK(r.state.x[0] == 5.0);
        CHECK(std::get<Vec>(r.state.dual)[0] == 10.0);
        CHECK(r.trace.records.empty());
    }

    TEST_CASE("example 1: phi-CP and the classical baseline reach the saddle") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const PDState init = make_classical_init({5.0}, {10.0});

        const RunResult phi = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0), init, 501);
        CHECK(!phi.state.stopped);
        CHECK(std::abs(phi.state.x[0]) <= 1e-2);

        const RunResult classical = run_classical_cp(build_example(1, Formulation::Classical).spec,
                                                     kPaperSteps, init, 501);
        CHECK(std::abs(classical.state.x[0]) <= 1e-2);
    }

    TEST_CASE("example 1: the paper's growing schedule never stops early") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::quartic_feasible(100.0, 1e-3),
                                       make_classical_init({5.0}, {10.0}), 501);
        CHECK(!r.state.stopped);
        CHECK(r.trace.initial.abar == 100.0);
        for (const auto& rec : r.trace.records) CHECK(rec.abar >= -1.0 / (2.0 * 0.25));
    }

    TEST_CASE("a saddle initialization is a fixed point of the iteration") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::constant(1.0),
                                       make_classical_init({0.0}, {0.0}), 50);
        for (const auto& rec : r.trace.records) {
            CHECK(std::abs(rec.x[0]) <= 1e-14);
            CHECK(std::abs(rec.dual_u[0]) <= 1e-14);
        }
    }

    TEST_CASE("extrapolation invariant holds along the run") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0),
                                       make_classical_init({5.0}, {10.0}), 20);
        CHECK(r.state.xbar[0] == doctest::Approx(2 * r.state.x[0] - r.state.x_prev[0]).epsilon(1e-15));
    }

    TEST_CASE("saddle-gap monitor: nonnegative on a valid run, negative on a crafted violation") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const PDState init = make_classical_init({5.0}, {10.0});
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0), init, 501);
        const auto res = monitor_saddle_gap(r.trace, {0.0}, {0.0}, kPaperSteps, toy.spec);
        REQUIRE(res.size() == r.trace.records.size());
        for (double v : res) CHECK(v >= -1e-8);

        // single-term sum at N = 0 checked directly
        const RunResult one = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0), init, 1);
        const auto res1 = monitor_saddle_gap(one.trace, {0.0}, {0.0}, kPaperSteps, toy.spec);
        REQUIRE(res1.size() == 1);
        CHECK(res1[0] >= -1e-8);

        Trace fake;
        fake.initial = TraceRecord{0, {0.0}, 0.0, {0.0}, 0.0, 0.0, {}, {}, {}, {}};
        fake.records.push_back(TraceRecord{1, {5.0}, 5.0, {0.0}, 0.0, 1000.0, {}, {}, {}, {}});
        CHECK(monitor_saddle_gap(fake, {0.0}, {0.0}, kPaperSteps, toy.spec).front() < 0.0);
    }

    TEST_CASE("full splitting mode stays bounded and heads to the saddle") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        Alg1Options opts;
        opts.full_splitting = true;
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0),
                                       make_classical_init({5.0}, {10.0}), 501, opts);
        CHECK(!r.state.stopped);
        CHECK(std::abs(r.state.x[0]) < 5.0);
        for (const auto& rec : r.trace.records) CHECK(std::abs(rec.x[0]) <= 5.0);
    }

    TEST_CASE("pair-dual scheme: stationary point keeps the dual cubic at a_n") {
        const ToyProblem toy = build_example(1, Formulation::FullPhi);
        const RunResult r = run_full_phi_cp(toy.spec, kPaperSteps, ASchedule::constant(2.0),
                                            make_phi_init({0.0}, {0.5, {0.0}}), 3);
        for (const auto& rec : r.trace.records) {
            CHECK(std::abs(*rec.a_dual - 0.5) <= 1e-10);
            CHECK(std::abs(rec.x[0]) <= 1e-12);
            CHECK(std::abs(rec.dual_u[0]) <= 1e-12);
        }
    }

    TEST_CASE("pair-dual scheme on example 1 stays bounded and records distances") {
        const ToyProblem toy = build_example(1, Formulation::FullPhi);
        RunResult r = run_full_phi_cp(toy.spec, kPaperSteps, ASchedule::quartic_full(100.0, 1e-3),
                                      make_phi_init({5.0}, {2.0, {-5.0}}), 501);
        annotate_distances(r.trace, toy);
        for (const auto& rec : r.trace.records) CHECK(std::abs(rec.x[0]) <= 10.0);
        CHECK(r.trace.records.back().dist_primal.has_value());
        // stop reason, if any, carries a name
        if (r.state.stopped) CHECK(!r.state.stopped->reason.empty());
    }

    TEST_CASE("pair-dual monitor: condition along the whole trace implies boundedness") {
        const ToyProblem toy = build_example(2, Formulation::FullPhi);
        for (int alg : {2, 3}) {
            const PDState init = make_phi_init({2.0}, {1.5, {2.0}});
            const ASchedule sched = ASchedule::quartic_full(200.0, 1e-3);
            const RunResult r = alg == 2 ? run_full_phi_cp(toy.spec, kPaperSteps, sched, init, 501)
                                         : run_phi_cp_v2(toy.spec, kPaperSteps, sched, init, 501);
            bool condition_holds = true;
            double sup = std::abs(r.trace.initial.x[0]);
            for (const auto& rec : r.trace.records) {
                REQUIRE(rec.monitors.size() == 1);
                REQUIRE(rec.monitors[0].first == "coupling_margin");
                condition_holds = condition_holds && rec.monitors[0].second >= 0.0;
                sup = std::max(sup, std::abs(rec.x[0]));
            }
            if (condition_holds) CHECK(sup <= 10.0);
        }
    }

    TEST_CASE("subgradient-dual scheme: closed-form u updates") {
        const ToyProblem toy = build_example(1, Formulation::FullPhi);

        // all driving terms vanish
        Alg3Options opts;
        opts.dual_eps = 1e-3;
        const RunResult r0 = run_phi_cp_v2(toy.spec, kPaperSteps, ASchedule::constant(1.0),
                                           make_phi_init({0.0}, {1.0, {0.0}}), 1, opts);
        CHECK(std::abs(r0.trace.records.at(0).dual_u[0]) <= 1e-15);

        // x_n = x_{n-1} = 1, u_n = 0, a_{n+1} = 0 gives u = 2*(0.25)/(2.25) = 2/9
        const RunResult r1 = run_phi_cp_v2(toy.spec, kPaperSteps, ASchedule::constant(100.0),
                                           make_phi_init({1.0}, {opts.dual_eps, {0.0}}), 1, opts);
        CHECK(*r1.trace.records.at(0).a_dual == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(r1.trace.records.at(0).dual_u[0] == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

        // inequality mode rejects a decreasing a immediately
        Alg3Options strict = opts;
        strict.enforce_inequality = true;
        const RunResult r2 = run_phi_cp_v2(toy.spec, kPaperSteps, ASchedule::constant(100.0),
                                           make_phi_init({1.0}, {1.0, {3.0}}), 5, strict);
        REQUIRE(r2.state.stopped.has_value());
        CHECK(r2.state.stopped->reason == "dual-inadmissible");
        CHECK(r2.trace.records.empty());
    }

    TEST_CASE("dual proximal iteration: fixed points and monotone h") {
        const PhiPpaProblem P = make_quadratic_conjugate_ppa(1.0, 0.0);

        // already minimized: zero u stays put
        const PpaResult fixed = run_phi_ppa(P, 1.0, {2.0, {0.0}}, 10, false);
        CHECK(fixed.phi.a == 2.0);
        CHECK(fixed.phi.u[0] == 0.0);

        const PpaResult plain = run_phi_ppa(P, 1.0, {0.0, {5.0}}, 2000, false);
        for (std::size_t i = 0; i + 1 < plain.trace.size(); ++i)
            CHECK(plain.trace[i + 1].h <= plain.trace[i].h + 1e-10);
        CHECK(plain.trace.back().h <= 1e-6);

        const PpaResult restr = run_phi_ppa(P, 1.0, {0.0, {5.0}}, 10000, true);
        for (std::size_t i = 0; i + 1 < restr.trace.size(); ++i)
            CHECK(restr.trace[i + 1].a >= restr.trace[i].a - 1e-12);
        CHECK(restr.trace.back().u_diff < 1e-6);

        // a crafted step proposing a decreasing a is rejected by the restricted runner
        PhiPpaProblem bad = P;
        bad.step = [](const QuadraticPhi& phi, double, bool) -> std::optional<QuadraticPhi> {
            return QuadraticPhi{phi.a - 1.0, phi.u};
        };
        const PpaResult rejected = run_phi_ppa(bad, 1.0, {0.0, {5.0}}, 10, true);
        REQUIRE(rejected.stopped.has_value());
        CHECK(rejected.stopped->iteration == 0);
        CHECK(rejected.phi.a == 0.0);  // returns phi_n per the stopping rule
    }

    TEST_CASE("jensen monitor: degenerate weights, weak convexity, classical convexity") {
        const auto square = [](const Vec& x) { return x.at(0) * x.at(0); };
        CHECK(monitor_jensen_wc(square, 0.0, {{1.0}, {2.0}}, {1.0, 0.0}) == doctest::Approx(0.0));

        const auto binary_pen = [](const Vec& x) {
            double s = 0;
            for (double v : x) s += std::abs(v * v - 1);
            return s;
        };
        CounterRng rng(64);
        for (int t = 0; t < 500; ++t) {
            std::vector<Vec> pts(3, Vec(2));
            for (auto& p : pts)
                for (auto& v : p) v = rng.uniform(-2, 2);
            double l1 = rng.uniform01(), l2 = rng.uniform01(), l3 = rng.uniform01();
            const double s = l1 + l2 + l3;
            CHECK(monitor_jensen_wc(binary_pen, 2.0, pts, {l1 / s, l2 / s, l3 / s}) >= -1e-9);
        }
        CHECK_THROWS_AS(monitor_jensen_wc(square, 0.0, {{1.0}}, {0.5}), std::invalid_argument);
        CHECK_THROWS_AS(monitor_jensen_wc(square, 0.0, {{1.0}, {2.0}}, {2.0, -1.0}), std::invalid_argument);
    }

    TEST_CASE("ergodic average over a short trace") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const RunResult r = run_phi_cp(toy.spec, kPaperSteps, ASchedule::constant(0.0),
                                       make_classical_init({4.0}, {0.0}), 2);
        const Vec avg = ergodic_average_x(r.trace);
        const double expect =
            (r.trace.initial.x[0] + r.trace.records[0].x[0] + r.trace.records[1].x[0]) / 3.0;
        CHECK(avg[0] == doctest::Approx(expect));
    }

    TEST_CASE("identical configurations produce byte-identical traces") {
        const ToyProblem toy = build_example(1, Formulation::PhiCp);
        const PDState init = make_classical_init({5.0}, {10.0});
        const RunResult a = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0), init, 100);
        const RunResult b = run_phi_cp(toy.spec, kPaperSteps, ASchedule::inverse_square(100.0), init, 100);
        CHECK(io::trace_csv_string(a.trace) == io::trace_csv_string(b.trace));
    }
}
