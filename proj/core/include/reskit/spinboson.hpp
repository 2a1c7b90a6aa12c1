// spinboson.hpp — arbitrary-coupling relaxation analytics for the two-level
// system in a thermal Bose field: the Q1/Q2 bath kernels, the relaxation time
// integral, the resonance table, the coherent (Weyl) overlap algebra over the
// thermally doubled one-particle space, leading-order decay projections, and
// dynamics curves with the return-to-equilibrium envelope.

#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reskit/bath.hpp"
#include "reskit/common.hpp"
#include "reskit/errors.hpp"

namespace reskit::spinboson {

// ------------------------------- parameters ---------------------------------

struct SpinBosonParams {
    double delta = 0.1;  // tunneling matrix element (perturbation parameter)
    double eps = 0.0;    // detuning
    double q0 = 1.0;     // coupling constant (arbitrary size)
    double beta = 1.0;   // inverse temperature
    bath::SpectralDensity J;
};

// ------------------------------- bath kernels -------------------------------

// Q1(t) = int_0^inf J(w)/w^2 sin(w t) dw.
double q1(const bath::SpectralDensity& J, double t, double* error_estimate = nullptr,
          const NumericConfig& cfg = {});
// Q2(t) = int_0^inf J(w)(1 - cos(w t))/w^2 coth(beta w / 2) dw; beta may be
// +infinity (coth -> 1).
double q2(const bath::SpectralDensity& J, double beta, double t,
          double* error_estimate = nullptr, const NumericConfig& cfg = {});

// ------------------------------ relaxation time ------------------------------

struct HorizonInfo {
    double horizon = 0.0;
    double tail_bound = 0.0;
    double error_estimate = 0.0;
};

// tau^{-1} = int_0^inf cos(eps t) cos[(q0^2/pi) Q1(t)] e^{-(q0^2/pi) Q2(t)} dt.
double tau_inverse(const SpinBosonParams& p, HorizonInfo* info = nullptr,
                   const NumericConfig& cfg = {});

// Companion half-line sine transform of the same kernel; this is a documented
// model choice for the real part of the +/-eps resonances, not a quantity the
// source analysis pins down.
double lamb_shift_x(const SpinBosonParams& p, HorizonInfo* info = nullptr,
                    const NumericConfig& cfg = {});

inline const char* x_definition_note() {
    return "x = int_0^inf sin(eps t) cos[(q0^2/pi) Q1(t)] e^{-(q0^2/pi) Q2(t)} dt "
           "(companion sine transform; model choice)";
}

struct SBResonance {
    double e = 0.0;  // cluster energy: 0 or +/- eps
    int j = 0;
    Complex lambda{0.0, 0.0};
};

struct RelaxationData {
    std::vector<double> t_samples;
    std::vector<double> q1_samples;
    std::vector<double> q2_samples;
    double tau_inv = 0.0;
    double x = 0.0;
    HorizonInfo tau_info, x_info;
    // {0, 0, 0}, {0, 1, i/tau}, {+eps, 0, x + i/(2 tau)}, {-eps, 0, -x + i/(2 tau)}
    std::vector<SBResonance> resonances;
};

RelaxationData relaxation_data(const SpinBosonParams& p, int n_kernel_samples = 201,
                               const NumericConfig& cfg = {});

// ---------------------------- coherent overlap algebra -----------------------

// Quadratic forms of the displacement function f = -(i/2) q0 h/u over the
// thermally doubled line, reduced to one-dimensional integrals over J:
//   <a,a> = (q0^2/2pi) int J(w) coth(beta w/2) / w^2 dw            (a = f_beta)
//   <a,b> = -(q0^2/2pi) int J(w) / (w^2 sinh(beta w/2)) dw         (b = Jbar a)
// Throws InfraredDivergent when the forms do not exist for the given J.
class OverlapAlgebra {
  public:
    OverlapAlgebra(const bath::SpectralDensity& J, double beta, double q0,
                   const NumericConfig& cfg = {});

    double caa() const { return caa_; }
    double cab() const { return cab_; }

    // Glued inner product of coefficient pairs over the basis (a, b).
    Complex inner(const Eigen::Vector2cd& f, const Eigen::Vector2cd& g) const;

  private:
    double caa_ = 0.0, cab_ = 0.0;
};

// A (scalar multiple of a) Weyl vector amp * W(c_a a + c_b b) Omega, closed
// under products by the canonical commutation phase.
struct CoherentVector {
    std::string label;
    Complex amplitude{1.0, 0.0};
    Eigen::Vector2cd coeff{0.0, 0.0};
};

// The closed label set {Omega, X0, X0*, X+, X-}.
CoherentVector coherent_label(const OverlapAlgebra& alg, const std::string& label);
std::vector<std::string> coherent_label_set();

// Left-multiply by a Weyl factor W(c_a a + c_b b): CCR reduction.
CoherentVector weyl_apply(const OverlapAlgebra& alg, const Eigen::Vector2cd& factor,
                          const CoherentVector& v);

// <left, right> through the CCR-reduced representatives.
Complex weyl_overlap(const OverlapAlgebra& alg, const CoherentVector& left,
                     const CoherentVector& right);

// Independent route: vacuum expectation of a product of Weyl factors by
// normal-ordered pairings, exp{-1/4 sum |F_i|^2 - 1/2 sum_{i<j} <F_i, F_j>}.
Complex gaussian_moment(const OverlapAlgebra& alg, const std::vector<Eigen::Vector2cd>& factors);

// Gram matrix of a label list; PSD up to tolerance for a consistent state.
CMatrix gram_matrix(const OverlapAlgebra& alg, const std::vector<std::string>& labels);

// ------------------------- leading-order projections -------------------------

// Doubled system space on the basis (pp, pm, mp, mm) with the thermal vector
// on the diagonal sector span{pp, mm}.
struct SystemSpace {
    double beta = 1.0;
    double eps = 0.0;
    Eigen::Vector2cd gibbs;          // components on (pp, mm), unit norm
    Eigen::Matrix2cd p_gibbs;        // |gibbs><gibbs| on (pp, mm)
    Eigen::Matrix2cd p_gibbs_perp;   // complement within the diagonal sector

    static SystemSpace make(double beta, double eps);
};

// One dyad coeff * |sys_left (x) coh_left><sys_right (x) coh_right|.
struct ProjectorTerm {
    int sys_left = 0;
    int sys_right = 0;
    CoherentVector coh_left, coh_right;
    Complex coeff{1.0, 0.0};
};

struct LeadingProjections {
    std::vector<ProjectorTerm> stationary;  // |Omega_KMS^(0)><Omega_KMS^(0)|
    std::vector<ProjectorTerm> pi0;         // decaying piece of the e = 0 sector
    std::vector<ProjectorTerm> pi_plus;     // e = +eps
    std::vector<ProjectorTerm> pi_minus;    // e = -eps
    Eigen::Matrix2cd pi0_system_coeff;      // coefficient matrix on (pp, mm)
};

LeadingProjections projections_leading(const SpinBosonParams& p, const OverlapAlgebra& alg);

// Product vectors sum_k w_k |sys_k (x) coh_k| used for amplitudes.
struct ProductVector {
    struct Term {
        int sys = 0;
        CoherentVector coh;
        Complex weight{1.0, 0.0};
    };
    std::vector<Term> terms;
};

Complex project_amplitude(const OverlapAlgebra& alg, const ProductVector& phi,
                          const std::vector<ProjectorTerm>& projector, const ProductVector& psi);

// ------------------------------ dynamics curves ------------------------------

struct DynamicsCurve {
    std::vector<double> t_grid;
    std::vector<Complex> value;
    Complex equilibrium{0.0, 0.0};
    struct Term {
        Complex pole;
        Complex amplitude;
    };
    std::vector<Term> terms;        // the three decaying contributions
    double envelope_constant = 0.0; // fitted C in |curve - eq| <= C(e^{-d^2 t/2tau} + 1/t)
};

// omega_0(alpha^t(A)) at leading order for a system observable A and an
// initial product state rho0 (x) reservoir equilibrium, both 2x2 in the
// sigma_z basis of the transformed system.
DynamicsCurve dynamics_curve(const SpinBosonParams& p, const RelaxationData& relax,
                             const Eigen::Matrix2cd& observable, const Eigen::Matrix2cd& rho0,
                             const std::vector<double>& t_grid, const NumericConfig& cfg = {});

nlohmann::json relaxation_to_json(const RelaxationData& r, const SpinBosonParams& p);

} // namespace reskit::spinboson
