#include <doctest.h>

#include <cmath>

#include "phicp/rng.hpp"
#include "phicp/tomography.hpp"

using namespace phicp;

namespace {

// dense normal-equation solve via Gaussian elimination, test-side oracle
Vec solve_normal_equations(const ProjectionOperator& A, const Vec& y) {
    const int n = A.cols;
    std::vector<Vec> M(n, Vec(n + 1, 0.0));
    // M = [A^T A | A^T y]
    for (int r = 0; r < A.rows; ++r)
        for (const auto& [i, wi] : A.row_entries[r]) {
            for (const auto& [j, wj] : A.row_entries[r]) M[i][j] += wi * wj;
            M[i][n] += wi * y[r];
        }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[col], M[piv]);
        REQUIRE(std::abs(M[col][col]) > 1e-12);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = M[r][col] / M[col][col];
            for (int c2 = col; c2 <= n; ++c2) M[r][c2] -= f * M[col][c2];
        }
    }
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = M[i][n] / M[i][i];
    return x;
}

ProjectionOperator diagonal_operator(const Vec& d) {
    ProjectionOperator A;
    A.rows = A.cols = static_cast<int>(d.size());
    A.row_entries.resize(A.rows);
    for (int i = 0; i < A.rows; ++i) A.row_entries[i].emplace_back(i, d[i]);
    return A;
}

}  // namespace

TEST_SUITE("tomography") {

    TEST_CASE("phantoms are deterministic two-valued images") {
        for (const char* shape : {"disk", "rect", "annulus", "two-disks"}) {
            const Phantom p = make_phantom(shape, 16);
            CHECK(p.pixels.size() == 256);
            bool has_fg = false;
            for (double v : p.pixels) {
                CHECK((v == 1.0 || v == -1.0));
                has_fg = has_fg || v == 1.0;
            }
            CHECK(has_fg);
            CHECK(p.pixels == make_phantom(shape, 16).pixels);
        }
        CHECK_THROWS_AS(make_phantom("blob", 16), std::invalid_argument);
    }

    TEST_CASE("single-cell axial ray carries the full cell height") {
        const ProjectionOperator A = build_projector(1, 1, {0.0}, 1);
        REQUIRE(A.rows == 1);
        REQUIRE(A.row_entries[0].size() == 1);
        CHECK(A.row_entries[0][0].second == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("constant image projects to the row sums, exactly") {
        const ProjectionOperator A = build_projector(12, 12, {0.0, 50.0, 100.0, 150.0}, 12);
        const Vec proj = A.apply(Vec(A.cols, 1.0));
        const Vec sums = A.row_sums();
        for (int r = 0; r < A.rows; ++r) CHECK(proj[r] == sums[r]);
    }

    TEST_CASE("axial projections are column and row sums") {
        const ProjectionOperator A = build_projector(4, 4, {0.0, 90.0}, 4);
        CounterRng rng(3);
        Vec img(16);
        for (auto& v : img) v = rng.uniform(-1, 1);
        const Vec proj = A.apply(img);
        for (int k = 0; k < 4; ++k) {
            double col = 0, row = 0;
            for (int j = 0; j < 4; ++j) col += img[j * 4 + k];
            for (int i = 0; i < 4; ++i) row += img[k * 4 + i];
            CHECK(proj[k] == doctest::Approx(col).epsilon(1e-12));
            CHECK(proj[4 + k] == doctest::Approx(row).epsilon(1e-12));
        }
    }

    TEST_CASE("adjoint is the exact transpose") {
        const ProjectionOperator A = build_projector(8, 8, {0.0, 50.0, 100.0, 150.0}, 8);
        CounterRng rng(17);
        for (int t = 0; t < 100; ++t) {
            Vec x(A.cols), v(A.rows);
            for (auto& e : x) e = rng.uniform(-1, 1);
            for (auto& e : v) e = rng.uniform(-1, 1);
            CHECK(std::abs(dot(A.apply(x), v) - dot(x, A.apply_adjoint(v))) <= 1e-10);
        }
    }

    TEST_CASE("operator norm: identity, diagonal, zero") {
        CHECK(estimate_op_norm(diagonal_operator({1, 1, 1, 1}), 50, 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(estimate_op_norm(diagonal_operator({3, 1}), 200, 1) == doctest::Approx(3.0).epsilon(1e-6));
        CHECK(estimate_op_norm(diagonal_operator({0, 0}), 10, 1) == 0.0);
    }

    TEST_CASE("sinogram noise is reproducible per seed") {
        const ProjectionOperator A = build_projector(8, 8, {0.0, 50.0}, 8);
        const Phantom ph = make_phantom("disk", 8);
        const Sinogram s1 = make_sinogram(A, ph.pixels, 0.01, 7);
        const Sinogram s2 = make_sinogram(A, ph.pixels, 0.01, 7);
        const Sinogram s3 = make_sinogram(A, ph.pixels, 0.01, 8);
        CHECK(s1.values == s2.values);
        CHECK(s1.values != s3.values);
    }

    TEST_CASE("thresholding maps zero to +1") {
        const Vec t = threshold_sign({0.2, -0.7, 0.0});
        CHECK(t[0] == 1.0);
        CHECK(t[1] == -1.0);
        CHECK(t[2] == 1.0);
    }

    TEST_CASE("cgls: identity system and dense oracle cross-check") {
        const ProjectionOperator Id = diagonal_operator({1, 1, 1, 1, 1});
        const Vec y{0.3, -1.2, 0.0, 2.0, 5.0};
        const CglsResult r = cgls_baseline(Id, y, 20);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(r.x_ls[i] - y[i]) <= 1e-10);

        // random full-rank 5x5, consistent right-hand side
        ProjectionOperator M;
        M.rows = M.cols = 5;
        M.row_entries.resize(5);
        CounterRng rng(11);
        for (int r2 = 0; r2 < 5; ++r2) {
            for (int c = 0; c < 5; ++c) M.row_entries[r2].emplace_back(c, rng.uniform(-1, 1));
            M.row_entries[r2][r2].second += 3.0;  // keep it well-conditioned
        }
        Vec xtrue(5);
        for (auto& v : xtrue) v = rng.uniform(-2, 2);
        const Vec rhs = M.apply(xtrue);
        const CglsResult got = cgls_baseline(M, rhs, 200);
        const Vec oracle = solve_normal_equations(M, rhs);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(got.x_ls[i] - oracle[i]) <= 1e-8);
    }

    TEST_CASE("degenerate zero-angle operator leaves the zero start fixed") {
        const Phantom ph = make_phantom("disk", 8);
        const ProjectionOperator A = build_projector(8, 8, {}, 8);
        REQUIRE(A.rows == 0);
        const TomoResult res = run_tomo_experiment(ph, A, 0.0, 1, 5, 100.0);
        for (double v : res.x) CHECK(v == 0.0);
    }

    TEST_CASE("primal step equals the componentwise penalty prox of the shifted point") {
        const ProjectionOperator A = build_projector(8, 8, {0.0, 50.0, 100.0, 150.0}, 8);
        const Phantom ph = make_phantom("disk", 8);
        const TomoResult one = run_tomo_experiment(ph, A, 0.01, 5, 1, 100.0);
        // with x0 = 0 the first update is prox(-A^T v_1 / (2 beta)) componentwise
        const Sinogram s = make_sinogram(A, ph.pixels, 0.01, 5);
        const double opn = estimate_op_norm(A, 200, 5);
        const double tau = 0.9 / opn;
        Vec v1(A.rows);
        for (int i = 0; i < A.rows; ++i) v1[i] = tau * (0.0 - s.values[i]) / (tau + 1.0);
        const Vec tilt = A.apply_adjoint(v1);
        const double beta = 1.0 / (2.0 * tau) + 100.0;
        for (int i = 0; i < A.cols; ++i) {
            const double expect = prox_binary_penalty(-tilt[i] / (2.0 * beta), 1.0 / (2.0 * beta));
            CHECK(one.x[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    TEST_CASE("small reconstruction beats the thresholded baseline") {
        const Phantom ph = make_phantom("disk", 24);
        const ProjectionOperator A = build_projector(24, 24, {0.0, 50.0, 100.0, 150.0}, 24);
        const TomoResult res = run_tomo_experiment(ph, A, 0.01, 42, 400, 100.0);
        const CglsResult base = cgls_baseline(A, res.sinogram.values, 200);
        CHECK(res.metrics.binariness >= 0.9);
        CHECK(res.metrics.hamming <= hamming_distance(base.x_thresholded, ph.pixels));
        // final data residual no worse than the zero start
        CHECK(res.metrics.residual <= norm(res.sinogram.values));
    }

    TEST_CASE("schedule violation surfaces as a named error") {
        const Phantom ph = make_phantom("disk", 8);
        const ProjectionOperator A = build_projector(8, 8, {0.0, 50.0}, 8);
        // abar0 inside the window where the prox parameter is invalid but the
        // curvature is still admissible: 0 < 1/(2 sigma) + abar <= 1
        const double sigma = 0.9 / estimate_op_norm(A, 200, 1);
        const double abar0 = -1.0 / (2.0 * sigma) + 0.5;
        CHECK_THROWS_AS(run_tomo_experiment(ph, A, 0.01, 1, 5, abar0), schedule_error);
    }
}
