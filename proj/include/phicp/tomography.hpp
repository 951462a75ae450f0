#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phicp/algorithms.hpp"
#include "phicp/vec.hpp"

namespace phicp {

/* Binary tomography at desk scale: +-1 images, a parallel-beam projector
 * with exact ray/cell intersection lengths, seeded Gaussian measurement
 * noise, the separable |x^2 - 1| penalty wired into the primal-dual engine,
 * and a CGLS least-squares baseline with sign thresholding.
 *
 * Geometry: the image is a width x height grid of unit cells centered at
 * the origin (pixel units, so a ray crossing one cell straight through
 * contributes length 1). For angle theta the rays travel along
 * (-sin theta, cos theta); theta = 0 integrates columns, theta = 90
 * integrates rows. The detector array spans the image width, detector k
 * centered at offset (k + 1/2)/detectors - 1/2 of that span. Rows are
 * ordered angle-major, cells within a row in traversal order along the ray.
 */

struct Phantom {
    int width = 0, height = 0;
    Vec pixels;  // row-major, entries in {-1, +1}
    std::string shape;
};

// shape: disk | rect | annulus | two-disks. Deterministic in (shape, size).
Phantom make_phantom(const std::string& shape, int size);

struct ProjectionOperator {
    int rows = 0, cols = 0;
    int width = 0, height = 0;
    std::vector<double> angles_deg;
    int detectors = 0;
    std::vector<std::vector<std::pair<int, double>>> row_entries;  // (cell, length)

    Vec apply(const Vec& x) const;
    Vec apply_adjoint(const Vec& v) const;
    Vec row_sums() const;
    LinearOperator as_linear_operator(double op_norm) const;
};

// Rows with empty support are retained (all-zero rows allowed).
ProjectionOperator build_projector(int width, int height, const std::vector<double>& angles_deg,
                                   int detectors);

// Power iteration on A^T A from a seeded start vector; returns the square
// root of the final Rayleigh quotient. Zero operator gives 0.
double estimate_op_norm(const ProjectionOperator& A, int iters, std::uint64_t seed);

struct Sinogram {
    Vec values;  // A * image + noise
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

// values[i] = (A x)[i] + sigma * gaussian_at(seed, i); bit-reproducible.
Sinogram make_sinogram(const ProjectionOperator& A, const Vec& image, double sigma, std::uint64_t seed);

Vec threshold_sign(const Vec& x);  // sign with sign(0) = +1
double hamming_distance(const Vec& a, const Vec& b);
// fraction of entries with | |x_i| - 1 | < tol
double binariness(const Vec& x, double tol = 0.1);

struct TomoMetrics {
    double hamming = 0.0;
    double binariness = 0.0;
    double residual = 0.0;  // ||A x - y||
};

struct TomoResult {
    Vec x;
    Vec x_binary;
    Trace trace;
    TomoMetrics metrics;
    Sinogram sinogram;
    double op_norm = 0.0;
    double tau = 0.0;
    long iterations_run = 0;
    std::optional<StopInfo> stopped;
};

/* min ||A x - y||^2 / 2 + sum_i |x_i^2 - 1| solved by the quadratic-class
 * primal-dual scheme: dual update (v + tau (A xbar - y)) / (tau + 1),
 * primal update the componentwise binary-penalty prox of the tilt-shifted
 * point, curvature schedule abar_{n+1} = abar_n - 1/n^2 from abar0. Steps
 * tau = sigma = 0.9 / ||A|| (power-iteration estimate; 0.9 when A = 0).
 * Starts from the zero vector. Throws schedule_error if the schedule makes
 * the prox parameter alpha reach 1/2.
 */
TomoResult run_tomo_experiment(const Phantom& phantom, const ProjectionOperator& A, double noise_sigma,
                               std::uint64_t seed, long iterations, double abar0);

struct CglsResult {
    Vec x_ls;
    Vec x_thresholded;
};

// CGLS on min ||A x - y||^2 from zero; x_thresholded = threshold_sign(x_ls).
CglsResult cgls_baseline(const ProjectionOperator& A, const Vec& y, long iterations);

}  // namespace phicp
