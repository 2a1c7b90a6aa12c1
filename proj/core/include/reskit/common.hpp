// common.hpp — shared aliases, numeric configuration, small utilities

#pragma once

#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace reskit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Numeric knobs used across the library. Defaults are the shipped contract;
// everything is overridable through the CLI config ("tolerances" block).
struct NumericConfig {
    double structural_tol = 1e-12;  // projections, self-adjointness, (A1)
    double solve_tol = 1e-10;       // linear solve residuals
    double singular_rcond = 1e-13;  // reciprocal condition floor for shifted solves
    double eig_defect_cond = 1e10;  // eigenvector condition limit before DefectiveMatrix
    double extrap_tol = 1e-7;       // boundary-value extrapolation convergence
    double extrap_eps_max = 0.1;    // largest regularization depth (absolute)
    double extrap_spacing_factor = 3.0;  // smallest depth = factor * grid spacing
    double extrap_ratio = 0.70710678118654752;  // geometric depth sequence ratio
    int extrap_min_samples = 4;
    double riesz_idem_tol = 1e-8;       // Riesz projection idempotency
    double circle_touch_tol = 1e-8;     // relative clearance between circle and spectrum
    int riesz_nodes = 128;              // trapezoid nodes on Riesz circles (>= 16)
    double fixed_point_tol = 1e-9;      // |e - E + d^2 a0(E)| at convergence
    double fixed_point_damping = 0.5;
    int fixed_point_max_iter = 50;
    double c_constant = 0.25;           // cluster-gap constant entering the window width
    double class_real_tol = 1e-4;       // relative Im threshold calling an eigenvalue real
    double simplicity_tol = 1e-6;       // relative spacing below which spectra count as degenerate
    double derivative_step_factor = 0.05;  // finite-difference step = factor * window width
    double small_delta_guard = 0.2;     // |delta| guard for resonance expansions
    double quad_tol = 1e-10;            // adaptive quadrature absolute tolerance
    int quad_max_depth = 28;
    double contour_w_factor = 0.1;      // w = factor * alpha
    double contour_tail_tol = 1e-8;     // truncation target for the far contour
    int threads = 1;
};

inline bool nearly_zero(double x, double scale, double tol) { return std::abs(x) <= tol * scale; }

// Deterministic chunked parallel map: fn(i) for i in [0, n). Results must be
// written to preallocated slots by the caller. nthreads <= 1 runs inline.
inline void parallel_for(std::size_t n, int nthreads, const std::function<void(std::size_t)>& fn) {
    if (nthreads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(nthreads, n);
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (std::size_t w = 0; w < nt; ++w) {
        workers.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += nt) fn(i);
        });
    }
    for (auto& t : workers) t.join();
}

// Locale-independent shortest-exact double formatting (used by every CSV/JSON
// writer so that identical runs produce byte-identical artifacts).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace reskit
