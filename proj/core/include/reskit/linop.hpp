// linop.hpp — dense complex linear algebra substrate: orthogonal projections,
// resolvents, non-Hermitian eigendecompositions, exact propagator amplitudes.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"

namespace reskit::linop {

// ------------------------------- projections --------------------------------

// Orthogonal projection P = B B^* stored with an orthonormal basis B of its
// range. P^2 = P and P = P^* hold to structural tolerance by construction.
class OrthProjection {
  public:
    OrthProjection() = default;

    // Basis columns are orthonormalized; rank = number of columns.
    static OrthProjection from_basis(const CMatrix& basis_columns);
    // Validate an explicit projection matrix and extract a range basis.
    static OrthProjection from_matrix(const CMatrix& P, double tol = 1e-12);
    // Projection onto a set of coordinate axes of an n-dimensional space.
    static OrthProjection onto_axes(const std::vector<int>& axes, int dim);
    // The zero projection on an n-dimensional space.
    static OrthProjection zero(int dim);

    int dim() const { return static_cast<int>(basis_.rows()); }
    int rank() const { return static_cast<int>(basis_.cols()); }
    const CMatrix& basis() const { return basis_; }

    CMatrix matrix() const { return basis_ * basis_.adjoint(); }
    CMatrix complement_matrix() const;
    // Orthonormal basis of Ran P^perp (n x (n-rank)).
    const CMatrix& complement_basis() const;

    // Compress a full-space operator onto Ran P: B^* H B.
    CMatrix compress(const CMatrix& H) const { return basis_.adjoint() * H * basis_; }
    // Embed an operator given on Ran P back into the full space.
    CMatrix embed(const CMatrix& M) const { return basis_ * M * basis_.adjoint(); }
    CVector embed_vector(const CVector& v) const { return basis_ * v; }

    // Coordinate-axis projections expose their index sets; complements and
    // compressions then reduce to row/column selection.
    const std::vector<int>* axes() const { return axes_.empty() ? nullptr : &axes_; }
    const std::vector<int>* complement_axes() const;

  private:
    CMatrix basis_;  // n x rank, orthonormal columns
    std::vector<int> axes_;  // nonempty only for onto_axes projections
    mutable std::shared_ptr<CMatrix> complement_;           // computed on demand
    mutable std::shared_ptr<std::vector<int>> caxes_;       // computed on demand
};

// ------------------------------- spectra -------------------------------------

struct Spectrum {
    std::vector<Complex> eigenvalues;  // sorted by (Re, Im)
    CMatrix right;                     // eigenvectors as columns, phase-fixed
    std::optional<CMatrix> left;       // rows biorthogonal to right (left[i]^* right[j] = delta)
    bool hermitian = false;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    CVector eigenvalue_vector() const;
};

// Dense eigendecomposition with deterministic ordering. Hermitian inputs are
// routed to the symmetric solver. Throws DefectiveMatrix when the eigenvector
// matrix is numerically singular (condition number above cfg.eig_defect_cond).
Spectrum eig(const CMatrix& H, bool want_left = false, const NumericConfig& cfg = {});

bool is_hermitian(const CMatrix& H, double tol = 1e-12);

// ------------------------------- resolvents ---------------------------------

// (H - z)^{-1}. Throws SingularShift when z sits on the spectrum to working
// precision (detected through the reciprocal condition of the LU factors).
CMatrix resolvent(const CMatrix& H, Complex z, const NumericConfig& cfg = {});

// Inverse of the compression of H to Ran Q^perp, kept in the orthonormal
// complement basis so it can act on full-space vectors or be re-embedded.
struct RestrictedResolvent {
    CMatrix basis;   // n x k complement basis
    CMatrix matrix;  // k x k inverse of (compressed H - z)

    CMatrix full() const { return basis * matrix * basis.adjoint(); }
    CVector apply(const CVector& v) const { return basis * (matrix * (basis.adjoint() * v)); }
};

RestrictedResolvent restricted_resolvent(const CMatrix& H, const OrthProjection& Q, Complex z,
                                         const NumericConfig& cfg = {});

// Repeated-shift resolvent evaluation for a fixed Hermitian matrix. Picks the
// cheapest exact strategy: diagonal, bordered-diagonal (Schur complement on
// the coupled rows), or a one-time dense eigendecomposition.
class ResolventEvaluator {
  public:
    explicit ResolventEvaluator(const CMatrix& M, const NumericConfig& cfg = {});

    int dim() const { return n_; }
    // (M - z)^{-1} B for a tall block B.
    CMatrix solve(Complex z, const CMatrix& B) const;
    // B^* (M - z)^{-1} C without forming the inverse.
    CMatrix sandwich(const CMatrix& B, Complex z, const CMatrix& C) const;
    // Distance from z to the spectrum of M (exact for diagonal/dense modes,
    // a cheap lower-bound estimate in bordered mode).
    double spectral_distance(Complex z) const;
    const std::string& strategy() const { return strategy_; }

  private:
    int n_ = 0;
    std::string strategy_;
    NumericConfig cfg_;
    // diagonal mode
    CVector diag_;
    // bordered mode: M = [[Mbb, Mbd], [Mdb, D]] with D diagonal
    std::vector<int> border_, interior_;
    CMatrix mbb_, mbd_, mdb_;
    CVector dinterior_;
    // dense mode
    CMatrix evecs_;
    RVector evals_;
    CMatrix dense_;  // kept for residual checks

    CMatrix solve_bordered(Complex z, const CMatrix& B) const;
};

// ------------------------------- propagator ---------------------------------

// <phi, e^{itH} psi> for self-adjoint H through the orthonormal eigenbasis.
Complex propagator_exact(const CMatrix& H, double t, const CVector& phi, const CVector& psi,
                         const NumericConfig& cfg = {});

// Same amplitude over a time grid with the eigendecomposition done once.
std::vector<Complex> propagator_exact_grid(const CMatrix& H, const std::vector<double>& t_grid,
                                           const CVector& phi, const CVector& psi,
                                           const NumericConfig& cfg = {});

// ------------------------------- serialization ------------------------------

// JSON schema {rows, cols, re[], im[]} (row-major).
nlohmann::json matrix_to_json(const CMatrix& M);
CMatrix matrix_from_json(const nlohmann::json& j);

} // namespace reskit::linop
