#include <doctest.h>

#include <cmath>

#include "phicp/prox_ops.hpp"
#include "phicp/rng.hpp"
#include "phicp/scalar_solvers.hpp"

using namespace phicp;

TEST_SUITE("prox_ops") {

    TEST_CASE("prox of y^2/4 with coupling") {
        CHECK(prox_scaled_sq_conjugate(0.0, 0.25, 0.0) == doctest::Approx(0.0));
        // stationarity y/2 - xbar + (y - y_n)/tau = 0 holds at y = 10
        CHECK(prox_scaled_sq_conjugate(10.0, 0.25, 5.0) == doctest::Approx(10.0));
        // grid oracle for argmin y^2/4 + (y-1)^2/4
        const double expect = grid_argmin([](double y) { return y * y / 4 + (y - 1) * (y - 1) / 4; },
                                          -5, 5, 1e-5)
                                  .x;
        CHECK(prox_scaled_sq_conjugate(1.0, 2.0, 0.0) == doctest::Approx(0.5));
        CHECK(std::abs(prox_scaled_sq_conjugate(1.0, 2.0, 0.0) - expect) <= 1e-5);
    }

    TEST_CASE("least-squares conjugate prox") {
        const Vec r1 = prox_ls_conjugate({0.0}, 1.0, {0.5}, {0.0});
        CHECK(r1[0] == doctest::Approx(0.25));  // r/2 with r = 0.5

        const Vec r2 = prox_ls_conjugate({2.0}, 1.0, {0.0}, {0.0});
        CHECK(r2[0] == doctest::Approx(1.0));

        const Vec r3 = prox_ls_conjugate({1.0}, 3.0, {2.0}, {1.0});
        CHECK(r3[0] == doctest::Approx(1.0));  // stationarity v + y - Axbar + (v - v_n)/tau = 0

        CHECK_THROWS_AS(prox_ls_conjugate({1.0, 2.0}, 1.0, {0.0}, {0.0}), std::invalid_argument);
    }

    TEST_CASE("binary-penalty prox against the grid oracle") {
        const auto oracle = [](double y, double alpha) {
            return grid_argmin(
                       [=](double z) { return alpha * std::abs(z * z - 1.0) + 0.5 * (z - y) * (z - y); },
                       -5, 5, 1e-5)
                .x;
        };
        CHECK(prox_binary_penalty(2.0, 0.25) == doctest::Approx(4.0 / 3.0));
        CHECK(std::abs(prox_binary_penalty(2.0, 0.25) - oracle(2.0, 0.25)) <= 1e-4);

        CHECK(prox_binary_penalty(0.25, 0.25) == doctest::Approx(0.5));
        CHECK(std::abs(prox_binary_penalty(0.25, 0.25) - oracle(0.25, 0.25)) <= 1e-4);

        CHECK(prox_binary_penalty(1.2, 0.25) == doctest::Approx(1.0));
        CHECK(std::abs(prox_binary_penalty(1.2, 0.25) - oracle(1.2, 0.25)) <= 1e-4);

        CHECK_THROWS_AS(prox_binary_penalty(1.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(prox_binary_penalty(1.0, 0.6), std::invalid_argument);
    }

    TEST_CASE("binary-penalty branches are continuous") {
        for (double alpha : {0.1, 0.25, 0.4})
            for (double b : {1.0 + 2 * alpha, 1.0 - 2 * alpha})
                for (double s : {1.0, -1.0}) {
                    const double inner = prox_binary_penalty(s * b * (1 - 1e-12), alpha);
                    const double at = prox_binary_penalty(s * b, alpha);
                    const double outer = prox_binary_penalty(s * b * (1 + 1e-12), alpha);
                    CHECK(std::abs(at - inner) <= 1e-9);
                    CHECK(std::abs(at - outer) <= 1e-9);
                }
    }

    TEST_CASE("quartic prox: fixed point, paper setting, damped setting") {
        const QuarticProxResult r0 = phi_prox_quartic({{0.0}, 0.25, 0.0, {0.0}});
        CHECK(r0.x == doctest::Approx(0.0));

        // argmin x^4 + 2 (x-1)^2: grid oracle and the root of x^3 + x = 1
        const QuarticProxResult r1 = phi_prox_quartic({{1.0}, 0.25, 0.0, {0.0}});
        const double expect = grid_argmin([](double x) { return x * x * x * x + 2 * (x - 1) * (x - 1); },
                                          -5, 5, 1e-6)
                                  .x;
        CHECK(std::abs(r1.x - expect) <= 1e-5);
        CHECK(r1.x == doctest::Approx(0.6823278038280193).epsilon(1e-9));

        const QuarticProxResult r2 = phi_prox_quartic({{5.0}, 0.25, 100.0, {10.0}});
        CHECK(std::abs(4 * r2.x * r2.x * r2.x + 204 * r2.x - 1010) <= 1e-8);
        const double expect2 =
            grid_argmin([](double x) { return x * x * x * x + 10 * x + 102 * (x - 5) * (x - 5); }, -5, 5, 1e-6)
                .x;
        CHECK(std::abs(r2.x - expect2) <= 1e-5);
    }

    TEST_CASE("quartic prox keeps global minimizers fixed") {
        for (double a0 : {-3.0, -1.0, 0.0, 7.0}) {
            const QuarticProxResult r = phi_prox_quartic({{0.0}, 0.25, a0, {0.0}});
            CHECK(std::abs(r.x) <= 1e-9);
        }
        // z^4 - z^2 folded as a pair tilt (a=1, u=0) around 1/sqrt(2)
        const double xs = 1.0 / std::sqrt(2.0);
        const QuarticProxResult r = phi_prox_quartic({{xs}, 0.25, 2.0 - 1.0, {-2.0 * xs}});
        CHECK(std::abs(r.x - xs) <= 1e-9);
    }

    TEST_CASE("generic prox: quartic cross-check, penalty reduction, zero objective") {
        const PhiProxRequest req{{1.0}, 0.25, 0.0, {0.0}};
        const Vec via_generic = phi_prox_generic(make_quartic_solver(), req);
        CHECK(std::abs(via_generic[0] - phi_prox_quartic(req).x) <= 1e-8);

        // completed square: componentwise binary prox of the shifted point
        CounterRng rng(31);
        for (int t = 0; t < 50; ++t) {
            PhiProxRequest r;
            r.anchor = {rng.uniform(-2, 2)};
            r.sigma = 0.25;
            r.a0 = rng.uniform(1.0, 20.0);
            r.tilt = {rng.uniform(-4, 4)};
            const double beta = surrogate_beta(r);
            const Vec got = phi_prox_generic(make_binary_penalty_solver(), r);
            const double expect = prox_binary_penalty(r.anchor[0] - r.tilt[0] / (2 * beta), 1 / (2 * beta));
            CHECK(got[0] == doctest::Approx(expect).epsilon(1e-12));
            const auto surrogate = [&](double z) {
                return std::abs(z * z - 1) + r.tilt[0] * z + beta * (z - r.anchor[0]) * (z - r.anchor[0]);
            };
            CHECK(surrogate(got[0]) <= grid_argmin(surrogate, -5, 5, 1e-4).value + 1e-6);
        }

        const Vec zero = phi_prox_generic(make_zero_solver(), {{3.0}, 0.5, 0.0, {2.0}});
        CHECK(zero[0] == doctest::Approx(3.0 - 2.0 / (2 * 1.0)));
    }

    TEST_CASE("generic prox surfaces solver failure with context") {
        // beta <= 1 makes the binary-penalty reduction invalid
        const PhiProxRequest bad{{0.0}, 1.0, 0.2, {0.0}};
        CHECK_THROWS_AS(phi_prox_generic(make_binary_penalty_solver(), bad), prox_error);
    }

    TEST_CASE("convex case matches the classical prox") {
        CounterRng rng(12);
        for (int t = 0; t < 50; ++t) {
            const double gamma_f = rng.uniform(0.2, 2.0);
            PhiProxRequest r;
            r.anchor = {rng.uniform(-5, 5)};
            r.sigma = rng.uniform(0.1, 1.0);
            r.a0 = 0.0;
            r.tilt = {rng.uniform(-2, 2)};
            const SurrogateSolver solver = [gamma_f](const PhiProxRequest& q) -> std::optional<Vec> {
                const double beta = surrogate_beta(q);
                return Vec{(2 * beta * q.anchor[0] - q.tilt[0]) / (1 / gamma_f + 2 * beta)};
            };
            const double got = phi_prox_generic(solver, r)[0];
            const double classical = (r.anchor[0] - r.sigma * r.tilt[0]) / (r.sigma / gamma_f + 1.0);
            CHECK(got == doctest::Approx(classical).epsilon(1e-10));
        }
    }
}
