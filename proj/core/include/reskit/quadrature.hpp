// quadrature.hpp — adaptive panel quadrature for smooth and oscillatory
// integrands, plus Richardson extrapolation of regularized boundary values.

#pragma once

#include <functional>
#include <vector>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"

namespace reskit::quad {

struct QuadResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

// Adaptive integration of f over [a, b]: 15-node Gauss-Legendre panels with
// bisection driven by a 7-node embedded estimate. `max_panel` caps the initial
// panel length (use ~pi/omega for integrands oscillating at frequency omega).
QuadResult integrate(const std::function<Complex(double)>& f, double a, double b,
                     double abs_tol, double max_panel = 0.0, int max_depth = 28);

// Semi-infinite integral of a decaying integrand: marches window by window
// from `a` in steps of `step` until `horizon_stop(t)` reports that the rest is
// negligible or `t_cap` is reached (IntegralNotDamped in that case).
struct TailResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    double horizon = 0.0;     // where integration stopped
    double tail_bound = 0.0;  // caller-supplied bound on the dropped tail
};

TailResult integrate_to_horizon(const std::function<Complex(double)>& f, double a, double step,
                                double abs_tol, const std::function<bool(double)>& horizon_stop,
                                const std::function<double(double)>& tail_bound, double t_cap);

// Richardson/Neville extrapolation of samples f(eps_k) -> eps = 0, assuming a
// Taylor expansion in eps. Samples must come with strictly decreasing eps.
// Returns the extrapolant; `spread` reports the difference between the last
// two tableau stages (the convergence indicator).
CMatrix richardson(const std::vector<double>& eps, const std::vector<CMatrix>& samples,
                   double* spread);

// Convenience wrapper: geometric eps sequence from eps_max down to >= eps_min
// with ratio 1/2, extrapolated with convergence control.
CMatrix extrapolate_to_zero(const std::function<CMatrix(double)>& f, double eps_max,
                            double eps_min, double tol, int min_samples = 4);

} // namespace reskit::quad
