#include "phicp/tomography.hpp"

#include <algorithm>
#include <cmath>

#include "phicp/prox_ops.hpp"
#include "phicp/rng.hpp"

namespace phicp {

namespace {

// fixed stream for power-iteration start vectors, independent of noise seeds
constexpr std::uint64_t kOpNormSeedSalt = 0x706f776572ULL;

bool inside_shape(const std::string& shape, double dx, double dy) {
    const double r = std::hypot(dx, dy);
    if (shape == "disk") return r <= 0.35;
    if (shape == "rect") return std::abs(dx) <= 0.3 && std::abs(dy) <= 0.2;
    if (shape == "annulus") return r >= 0.18 && r <= 0.38;
    if (shape == "two-disks")
        return std::hypot(dx - 0.22, dy) <= 0.16 || std::hypot(dx + 0.22, dy) <= 0.16;
    throw std::invalid_argument("make_phantom: unknown shape '" + shape + "'");
}

}  // namespace

Phantom make_phantom(const std::string& shape, int size) {
    if (size < 1) throw std::invalid_argument("make_phantom: size must be >= 1");
    Phantom p;
    p.width = p.height = size;
    p.shape = shape;
    p.pixels.resize(static_cast<std::size_t>(size) * size);
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const double dx = (i + 0.5) / size - 0.5;
            const double dy = (j + 0.5) / size - 0.5;
            p.pixels[static_cast<std::size_t>(j) * size + i] = inside_shape(shape, dx, dy) ? 1.0 : -1.0;
        }
    return p;
}

Vec ProjectionOperator::apply(const Vec& x) const {
    if (static_cast<int>(x.size()) != cols)
        throw std::invalid_argument("ProjectionOperator::apply: dimension mismatch");
    Vec out(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (const auto& [j, w] : row_entries[r]) s += w * x[j];
        out[r] = s;
    }
    return out;
}

Vec ProjectionOperator::apply_adjoint(const Vec& v) const {
    if (static_cast<int>(v.size()) != rows)
        throw std::invalid_argument("ProjectionOperator::apply_adjoint: dimension mismatch");
    Vec out(cols, 0.0);
    for (int r = 0; r < rows; ++r)
        for (const auto& [j, w] : row_entries[r]) out[j] += w * v[r];
    return out;
}

Vec ProjectionOperator::row_sums() const {
    Vec out(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (const auto& [j, w] : row_entries[r]) s += w;
        out[r] = s;
    }
    return out;
}

LinearOperator ProjectionOperator::as_linear_operator(double op_norm) const {
    LinearOperator L;
    L.apply = [this](const Vec& x) { return apply(x); };
    L.apply_adjoint = [this](const Vec& v) { return apply_adjoint(v); };
    L.op_norm = op_norm;
    return L;
}

ProjectionOperator build_projector(int width, int height, const std::vector<double>& angles_deg,
                                   int detectors) {
    if (width < 1 || height < 1 || detectors < 1)
        throw std::invalid_argument("build_projector: need width, height, detectors >= 1");
    ProjectionOperator A;
    A.width = width;
    A.height = height;
    A.angles_deg = angles_deg;
    A.detectors = detectors;
    A.cols = width * height;
    A.rows = static_cast<int>(angles_deg.size()) * detectors;
    A.row_entries.resize(A.rows);

    const double ex = width / 2.0, ey = height / 2.0;
    const double span = static_cast<double>(width);
    const double far = 2.0 * std::hypot(ex, ey) + 1.0;

    for (std::size_t ai = 0; ai < angles_deg.size(); ++ai) {
        const double th = angles_deg[ai] * M_PI / 180.0;
        const double dx = -std::sin(th), dy = std::cos(th);   // ray direction
        const double px = std::cos(th), py = std::sin(th);    // detector axis
        for (int k = 0; k < detectors; ++k) {
            const double off = (-0.5 + (k + 0.5) / detectors) * span;
            const double ox = off * px - far * dx;
            const double oy = off * py - far * dy;

            // clip the parametric line to the grid box
            double tmin = 0.0, tmax = 2.0 * far;
            bool hit = true;
            for (const auto& [o, d, e] : {std::tuple{ox, dx, ex}, std::tuple{oy, dy, ey}}) {
                if (std::abs(d) < 1e-14) {
                    if (o < -e || o > e) hit = false;
                } else {
                    double t0 = (-e - o) / d, t1 = (e - o) / d;
                    if (t0 > t1) std::swap(t0, t1);
                    tmin = std::max(tmin, t0);
                    tmax = std::min(tmax, t1);
                }
            }
            auto& entries = A.row_entries[ai * detectors + k];
            if (!hit || tmin >= tmax) continue;

            // all crossings of the grid lines inside (tmin, tmax)
            std::vector<double> ts{tmin, tmax};
            if (std::abs(dx) > 1e-14)
                for (int i = 0; i <= width; ++i) {
                    const double s = (-ex + i - ox) / dx;
                    if (s > tmin && s < tmax) ts.push_back(s);
                }
            if (std::abs(dy) > 1e-14)
                for (int j = 0; j <= height; ++j) {
                    const double s = (-ey + j - oy) / dy;
                    if (s > tmin && s < tmax) ts.push_back(s);
                }
            std::sort(ts.begin(), ts.end());

            for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
                const double len = ts[q + 1] - ts[q];
                if (len < 1e-12) continue;
                const double mid = 0.5 * (ts[q] + ts[q + 1]);
                const int ci = static_cast<int>(std::floor(ox + mid * dx + ex));
                const int cj = static_cast<int>(std::floor(oy + mid * dy + ey));
                if (ci >= 0 && ci < width && cj >= 0 && cj < height)
                    entries.emplace_back(cj * width + ci, len);
            }
        }
    }
    return A;
}

double estimate_op_norm(const ProjectionOperator& A, int iters, std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("estimate_op_norm: iters must be >= 1");
    Vec v(A.cols);
    for (int i = 0; i < A.cols; ++i) v[i] = uniform01_at(seed ^ kOpNormSeedSalt, i) - 0.5;
    double nv = norm(v);
    if (nv == 0.0) return 0.0;
    v = scaled(v, 1.0 / nv);
    for (int it = 0; it < iters; ++it) {
        Vec w = A.apply_adjoint(A.apply(v));
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;
        v = scaled(w, 1.0 / nw);
    }
    return norm(A.apply(v));  // sqrt of the Rayleigh quotient of A^T A
}

Sinogram make_sinogram(const ProjectionOperator& A, const Vec& image, double sigma, std::uint64_t seed) {
    Sinogram s;
    s.noise_sigma = sigma;
    s.seed = seed;
    s.values = A.apply(image);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.values[i] += sigma * gaussian_at(seed, i);
    return s;
}

Vec threshold_sign(const Vec& x) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= 0.0 ? 1.0 : -1.0;
    return out;
}

double hamming_distance(const Vec& a, const Vec& b) {
    check_same_dim(a, b, "hamming_distance");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d += 1.0;
    return d;
}

double binariness(const Vec& x, double tol) {
    if (x.empty()) return 0.0;
    double count = 0.0;
    for (double v : x)
        if (std::abs(std::abs(v) - 1.0) < tol) count += 1.0;
    return count / static_cast<double>(x.size());
}

TomoResult run_tomo_experiment(const Phantom& phantom, const ProjectionOperator& A, double noise_sigma,
                               std::uint64_t seed, long iterations, double abar0) {
    if (iterations < 1) throw std::invalid_argument("run_tomo_experiment: iterations must be >= 1");
    TomoResult res;
    res.sinogram = make_sinogram(A, phantom.pixels, noise_sigma, seed);
    res.op_norm = estimate_op_norm(A, 200, seed);
    res.tau = res.op_norm > 0.0 ? 0.9 / res.op_norm : 0.9;
    const StepSizes steps(res.tau, res.tau, res.op_norm);

    ProblemSpec prob;
    prob.f_value = [](const Vec& x) {
        double s = 0.0;
        for (double v : x) s += std::abs(v * v - 1.0);
        return s;
    };
    prob.f_prox = make_binary_penalty_solver();
    prob.rho = 2.0;
    const Vec& y = res.sinogram.values;
    prob.gstar_prox = [&y](const Vec& v, double tau, const Vec& Axbar) {
        return prox_ls_conjugate(v, tau, Axbar, y);
    };
    prob.gstar_value = [&y](const Vec& v) { return 0.5 * norm_sq(v) + dot(v, y); };
    prob.L = A.as_linear_operator(res.op_norm);

    const PDState init = make_classical_init(Vec(A.cols, 0.0), Vec(A.rows, 0.0));
    RunResult run;
    try {
        run = run_phi_cp(prob, steps, ASchedule::inverse_square(abar0), init, iterations);
    } catch (const prox_error& e) {
        throw schedule_error("run_tomo_experiment: binary-penalty prox needs alpha < 1/2 "
                             "(1/(2 sigma) + abar <= 1) at iteration " + std::to_string(e.iteration()),
                             e.iteration());
    }

    res.x = run.state.x;
    res.x_binary = threshold_sign(res.x);
    res.trace = std::move(run.trace);
    res.iterations_run = run.state.n;
    res.stopped = run.state.stopped;
    res.metrics.hamming = hamming_distance(res.x_binary, phantom.pixels);
    res.metrics.binariness = binariness(res.x);
    res.metrics.residual = norm(sub(A.apply(res.x), y));
    return res;
}

CglsResult cgls_baseline(const ProjectionOperator& A, const Vec& y, long iterations) {
    if (iterations < 1) throw std::invalid_argument("cgls_baseline: iterations must be >= 1");
    Vec x(A.cols, 0.0);
    Vec r = y;
    Vec s = A.apply_adjoint(r);
    Vec p = s;
    double gamma = norm_sq(s);
    for (long it = 0; it < iterations && gamma > 0.0; ++it) {
        const Vec q = A.apply(p);
        const double qq = norm_sq(q);
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        x = add_scaled(x, alpha, p);
        r = add_scaled(r, -alpha, q);
        s = A.apply_adjoint(r);
        const double gamma_next = norm_sq(s);
        p = add_scaled(s, gamma_next / gamma, p);
        gamma = gamma_next;
    }
    return {x, threshold_sign(x)};
}

}  // namespace phicp
