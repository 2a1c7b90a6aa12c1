// resonance.hpp — level shift operators, the z-dependent reduced operator
// A_z = -Pe I R_z^{Pe} I Pe with its eigenvalues and Riesz projections,
// boundary-value extrapolation onto the real axis, perturbed-eigenvalue
// fixed points, correction operators, cluster gaps, and the golden-rule
// classification of embedded eigenvalues.

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"
#include "reskit/linop.hpp"
#include "reskit/model.hpp"

namespace reskit::resonance {

enum class Stability { Unstable, PartiallyStable };

const char* to_string(Stability s);

// ------------------------------- level shift --------------------------------

struct LevelShiftData {
    int cluster_index = -1;
    double e = 0.0;
    CMatrix lambda_matrix;             // m x m level shift operator
    std::vector<Complex> eigenvalues;  // simple by (A4); index 0 is the real one when partially stable
    std::vector<CMatrix> projections;  // rank-one spectral projections, same order
    Stability classification = Stability::Unstable;
    double extrapolation_spread = 0.0;
    double gap = 0.0;  // min pairwise eigenvalue separation within the cluster (inf for m = 1)
};

// Lambda_e = -Pe I (L0 - e + i0+)^{-1} I Pe via Richardson extrapolation of
// the regularized boundary values. Checks (A1) and the golden-rule structure
// (simple spectrum, dissipativity, at most one real eigenvalue).
LevelShiftData level_shift(const Model& model, int cluster_index, const NumericConfig& cfg = {});

// --------------------------- repeated A_z evaluation -------------------------

// Reduction of one cluster against the full generator L = L0 + delta I (or
// against L0 alone for the level-shift limit). Provides A_z off the axis, its
// boundary values on the axis, and the boundary coupling blocks entering the
// correction operators.
class ClusterResolvent {
  public:
    ClusterResolvent(const Model& model, int cluster_index, bool include_coupling,
                     const NumericConfig& cfg = {});

    int multiplicity() const { return m_; }
    double cluster_energy() const { return e_; }

    // A_z for Im z < 0 (direct evaluation).
    CMatrix a(Complex z) const;
    // A_{x - i0+} for real x through the extrapolated limit.
    CMatrix a_boundary(double x, double* spread = nullptr) const;
    // R^{Pe}_{x-i0+} I Pe (complement coordinates, k x m).
    CMatrix boundary_coupling_right(double x) const;
    // Pe I R^{Pe}_{x-i0+} (m x k).
    CMatrix boundary_coupling_left(double x) const;

    const std::vector<int>& cluster_axes() const { return cluster_axes_; }
    const std::vector<int>& complement_axes() const { return complement_axes_; }
    const linop::ResolventEvaluator& evaluator() const { return *eval_; }

    double eps_max() const { return eps_max_; }
    double eps_min() const { return eps_min_; }

  private:
    int m_ = 0;
    double e_ = 0.0;
    NumericConfig cfg_;
    std::vector<int> cluster_axes_, complement_axes_;
    CMatrix coupling_;  // k x m block (I restricted: complement rows, cluster cols)
    std::shared_ptr<linop::ResolventEvaluator> eval_;
    double eps_max_ = 0.0, eps_min_ = 0.0;

    CMatrix extrapolate(const std::function<CMatrix(double)>& f, double* spread) const;
};

// A_z as a standalone operation; window_halfwidth guards |Re z - e| (pass
// +infinity to skip the check). Real-axis shifts are extrapolated from below.
CMatrix a_z(const Model& model, int cluster_index, Complex z,
            double window_halfwidth = std::numeric_limits<double>::infinity(),
            const NumericConfig& cfg = {});

// ------------------------------ Riesz projection -----------------------------

// Q = (-1/2 pi i) oint (A - zeta)^{-1} d zeta over the circle |zeta - center|
// = radius, by the trapezoidal rule (spectrally accurate for analytic
// integrands). The circle must separate at least one eigenvalue group.
CMatrix riesz_projection(const CMatrix& A, Complex center, double radius, int n_nodes = 128,
                         const NumericConfig& cfg = {});

// ------------------------------ resonance data ------------------------------

struct ResonanceMode {
    Complex lambda;   // paired level-shift eigenvalue
    Complex a;        // a_{e,j}(e)
    Complex a_prime;  // d/dz a_{e,j} at the boundary point e
    CMatrix riesz;    // Q_j(e), m x m on the cluster coordinates
};

struct ResonanceData {
    int cluster_index = -1;
    double e = 0.0;
    double delta = 0.0;
    LevelShiftData level_shift;
    std::vector<ResonanceMode> modes;  // same ordering as level_shift.eigenvalues
    CMatrix coupling_right_e;          // R^{Pe}_{e-i0} I Pe   (k x m)
    CMatrix coupling_left_e;           // Pe I R^{Pe}_{e-i0}   (m x k)
    double deviation_constant = 0.0;   // ||A_e - Lambda|| / |delta|

    // Partially stable clusters only: the surviving eigenvalue data.
    bool partially_stable = false;
    double E = 0.0;                    // fixed point of e - E + delta^2 a_0(E) = 0
    double fixed_point_residual = 0.0;
    CMatrix q0_E;                      // Q_0(E), m x m
    Complex a0_prime_E{0.0, 0.0};
    CMatrix coupling_right_E, coupling_left_E;

    std::vector<int> cluster_axes, complement_axes;

    // <phi, (Q_j(e) + delta Qtilde_j) psi> assembled from the factored blocks.
    Complex decay_amplitude(int j, const CVector& phi, const CVector& psi) const;
    // Q_j(e) + delta Qtilde_j as a full-space matrix.
    CMatrix decay_operator(int j) const;
};

// Spectral data of A at z = e (and at the surviving eigenvalue E for
// partially stable clusters), paired against the level-shift eigenvalues.
ResonanceData resonance_data(const Model& model, int cluster_index,
                             const LevelShiftData& lsd, double window_halfwidth,
                             const NumericConfig& cfg = {});

// --------------------------------- gaps -------------------------------------

struct GapData {
    double delta_gap = 0.0;  // min within-cluster resonance separation
    double g = 0.0;          // eigenvalue gap of L0
    double alpha = 0.0;      // integration window half-width
    double gamma = 0.0;      // minimal positive Im lambda (decay rate per delta^2)
    double c = 0.25;         // configured cluster-gap constant
};

GapData gaps(const std::vector<LevelShiftData>& all, double c_constant,
             const NumericConfig& cfg = {});

// --------------------------------- reports ----------------------------------

// CSV columns: cluster_e, j, re_a, im_a, re_lambda, im_lambda, classification.
void export_resonance_csv(std::ostream& os, const std::vector<ResonanceData>& data);
// CSV columns: cluster_e, j, re_lambda, im_lambda, classification.
void export_levelshift_csv(std::ostream& os, const std::vector<LevelShiftData>& data);

} // namespace reskit::resonance
