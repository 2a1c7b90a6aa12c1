// bath.hpp — quasi-continuum reservoir discretizations and finite surrogate
// model builders (generic Friedrichs-type and the doubled-space Liouvillean
// surrogate restricted to the single-excitation sector).

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"
#include "reskit/model.hpp"

namespace reskit::bath {

// ------------------------------ spectral density -----------------------------

// J(omega) >= 0 for omega >= 0. The power-law family is
// J(w) = A * w^s * exp(-w / omega_c); tables are linearly interpolated.
struct SpectralDensity {
    enum class Family { OhmicExp, Table };
    Family family = Family::OhmicExp;
    double amplitude = 1.0;  // A
    double exponent = 1.0;   // s
    double cutoff = 1.0;     // omega_c
    std::vector<double> table_omega;
    std::vector<double> table_value;

    double operator()(double omega) const;

    static SpectralDensity ohmic(double A, double s, double omega_c) {
        SpectralDensity J;
        J.amplitude = A;
        J.exponent = s;
        J.cutoff = omega_c;
        return J;
    }
};

// ------------------------------ discretizations ------------------------------

struct Discretization {
    std::vector<double> omega;   // mode frequencies, sorted (signed for thermal grids)
    std::vector<double> g;       // coupling amplitudes, g_k = sqrt(density * weight)
    std::string scheme = "uniform";
    double spacing = 0.0;        // characteristic level spacing

    int size() const { return static_cast<int>(omega.size()); }
};

// Thermally doubled signed-frequency grid on [-window, window]:
// |g(u)|^2 = (2/pi) J(|u|) / (1 - e^{-beta u}) * quadrature weight (u > 0),
// continued to u < 0 by exact detailed balance |g(-u)|^2 = e^{-beta u}|g(u)|^2.
// beta may be +infinity (zero temperature). Throws WindowTooNarrow when more
// than 1% of the thermal mass lies outside the window.
Discretization discretize(const SpectralDensity& J, double beta, int n, double window,
                          const std::string& scheme = "uniform");

// Plain uniform discretization of [a, b] with unit coupling density.
Discretization uniform_grid(double a, double b, int n);

// ------------------------------ model builders -------------------------------

// One embedded cluster of a Friedrichs-type surrogate: energy, and one
// coupling profile per member (nullptr means a decoupled direction).
struct FriedrichsCluster {
    double e = 0.0;
    std::vector<std::function<double(double)>> member_profiles;
};

// L0 = diag(grid) (+) cluster energies; I couples cluster members to the grid
// through the profiles, with zero cluster-diagonal blocks, so (A1) holds by
// construction.
Model build_friedrichs(const std::vector<FriedrichsCluster>& clusters,
                       const Discretization& grid, double delta);

// Doubled-system Liouvillean surrogate in the single-excitation sector:
// system block diag(0, +eps, -eps, 0) on (pp, pm, mp, mm), spin-flip V1-form
// coupling with amplitude g_scale, field block = the signed thermal grid.
// The interaction is I = V - JVJ with the modular conjugation acting on the
// system part by entrywise-conjugation swap. Clusters: e = 0 (m = 2), +/-eps.
struct LiouvilleSurrogateParams {
    double eps = 1.0;       // system Bohr frequency
    double delta = 0.0;     // perturbation parameter of the resulting Model
    double g_scale = 1.0;   // overall coupling amplitude multiplier
    std::string truncation = "single-excitation";
};

Model build_spinboson_liouvillean_surrogate(const LiouvilleSurrogateParams& params,
                                            const Discretization& thermal_grid, double beta);

// Closed-form golden-rule decay rate of the surrogate's e = 0 level shift
// eigenvalue, (g_scale^2 / 2) J(eps) coth(beta eps / 2), used as the
// independent cross-check against the discretized pipeline.
double golden_rule_rate(const SpectralDensity& J, double beta, double eps, double g_scale);

} // namespace reskit::bath
