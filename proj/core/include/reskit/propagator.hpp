// propagator.hpp — resonance expansion of <phi, e^{itL} psi>: stationary,
// exponentially decaying and remainder pieces, the contour-integral route as
// an independent check of the representation, and remainder decay fits.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"
#include "reskit/model.hpp"
#include "reskit/resonance.hpp"

namespace reskit::propagator {

using resonance::GapData;
using resonance::ResonanceData;

// ------------------------------ expansion pieces ----------------------------

// Full-space projection onto the surviving eigenvalue E of a partially stable
// cluster, assembled from the Feshbach-side data (Riesz block, boundary
// couplings and the 1/(1 - delta^2 a0') normalization).
CMatrix stationary_projection(const Model& model, const ResonanceData& rd,
                              const NumericConfig& cfg = {});

// <phi, Pi_E psi> without materializing the full-space operator.
Complex stationary_amplitude(const ResonanceData& rd, const CVector& phi, const CVector& psi);

struct StationaryTerm {
    int cluster_index = -1;
    double E = 0.0;
    Complex amplitude{0.0, 0.0};
};

struct DecayingTerm {
    int cluster_index = -1;
    int j = 0;
    Complex pole{0.0, 0.0};  // e + delta^2 a_{e,j}(e), Im > 0
    Complex amplitude{0.0, 0.0};
};

struct ExpansionResult {
    std::vector<double> t_grid;
    std::vector<StationaryTerm> stationary;
    std::vector<DecayingTerm> decaying;
    std::vector<Complex> expansion;  // sum of terms per t
    std::vector<Complex> exact;      // eigen-oracle amplitude per t
    std::vector<Complex> remainder;  // exact - expansion
    Complex overlap{0.0, 0.0};       // <phi, psi>
    double kappa = 0.0;              // boundedness report: (max|value|/(|phi||psi|) - 1)/delta
};

// Assemble the expansion over a time grid and record the exact remainder by
// subtraction from the spectral oracle.
ExpansionResult expand(const Model& model, const CVector& phi, const CVector& psi,
                       const std::vector<double>& t_grid,
                       const std::vector<ResonanceData>& resonances,
                       const NumericConfig& cfg = {});

// ------------------------------ contour route -------------------------------

struct ContourWindow {
    double center = 0.0;
    double halfwidth = 0.0;
};

struct ContourConfig {
    double w = 0.05;               // line offset below the real axis (w < 1)
    std::vector<ContourWindow> windows;
    double tail_tol = 1e-8;        // truncation budget for the far region
    double quad_tol = 1e-8;        // absolute amplitude tolerance
    double truncation_min = 0.0;   // lower bound for the far cutoff (0 = auto)

    static ContourConfig from_gaps(const Model& model, const GapData& gaps,
                                   const NumericConfig& cfg = {});
};

struct ContourResult {
    Complex total{0.0, 0.0};
    std::vector<Complex> window_contributions;  // one per configured window
    Complex far_contribution{0.0, 0.0};
    double truncation = 0.0;    // |Re z| cutoff used
    double quad_error = 0.0;    // accumulated quadrature error estimate
    std::size_t evaluations = 0;
};

// (1/it)(1/2 pi i) integral over R - iw of e^{itz} <phi, d/dz R_z psi> dz,
// split into the cluster windows and the regularized far region.
ContourResult contour_amplitude(const Model& model, const CVector& phi, const CVector& psi,
                                double t, const ContourConfig& config,
                                const NumericConfig& cfg = {});

// ------------------------------ remainder fits ------------------------------

struct RemainderFit {
    double amplitude = 0.0;  // C in |R| ~ C t^exponent
    double exponent = 0.0;
    int samples_used = 0;
    bool skipped = false;    // remainder identically zero at working precision
};

// Least-squares fit of log|R| against log t over [t_min, t_max]. Requires at
// least 20 usable samples (WindowTooSmall otherwise) unless the remainder
// vanishes, which is reported through `skipped`.
RemainderFit remainder_fit(const ExpansionResult& result, double t_min, double t_max);

// Generic log-log fit helper for decay-rate extraction.
struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);
// Fit log|y| = intercept - rate * t (exponential decay rate extraction).
LogFit exp_rate_fit(const std::vector<double>& t, const std::vector<double>& y);

// ---------------------------- regularity diagnostics -------------------------

// Empirical sup over the window of |<phi, d^k/dz^k R_z^{Pe} psi>| for
// k = 0..3, sampled on the boundary approach line Im z = -probe_depth.
std::array<double, 4> lap_diagnostics(const Model& model, int cluster_index, const CVector& phi,
                                      const CVector& psi, double window_halfwidth,
                                      double probe_depth, int n_samples = 21,
                                      const NumericConfig& cfg = {});

} // namespace reskit::propagator
