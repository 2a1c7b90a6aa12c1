// feshbach.hpp — Schur-complement reduction of shifted operators: the map
// itself, the block factorization of the resolvent it induces, nesting,
// eigenvector lifting, and determinant-based isospectrality reports.

#pragma once

#include <memory>
#include <vector>

#include <Eigen/LU>
#include <nlohmann/json_fwd.hpp>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"
#include "reskit/linop.hpp"

namespace reskit::feshbach {

using linop::OrthProjection;

// Reduction of H - z onto Ran Q. Carries the off-diagonal dressing blocks and
// the complement LU factors so downstream block assembly and eigenvector
// lifting reuse them without re-solving.
struct FeshbachResult {
    OrthProjection Q;
    Complex z{0.0, 0.0};
    CMatrix map;          // r x r, on Ran Q in Q.basis() coordinates
    CMatrix dress_left;   // r x k:  Q H Qp * R_z^Q   (k = dim - r)
    CMatrix dress_right;  // k x r:  R_z^Q * Qp H Q
    std::shared_ptr<Eigen::PartialPivLU<CMatrix>> complement_lu;  // factors of (compressed H - z)

    int rank() const { return static_cast<int>(map.rows()); }
    // det of the map via the scaled LU route; `scale` receives the product of
    // absolute diagonal pivots so callers can test |det| against it.
    Complex scaled_determinant(double* scale) const;
};

// F(H - z; Q) = Q(H - z - H Qp R_z^Q Qp H)Q. Throws SingularShift when z is
// an eigenvalue of the compressed complement (distance below cfg tolerance).
FeshbachResult feshbach_map(const CMatrix& H, const OrthProjection& Q, Complex z,
                            const NumericConfig& cfg = {});

// The four blocks of R_z expressed through the Feshbach data, plus the
// reassembled full-space matrix.
struct BlockResolvent {
    CMatrix QRQ;      // r x r
    CMatrix QRQp;     // r x k
    CMatrix QpRQ;     // k x r
    CMatrix QpRQp;    // k x k
    CMatrix full;     // n x n reassembly
};

BlockResolvent block_resolvent(const CMatrix& H, const OrthProjection& Q, Complex z,
                               const NumericConfig& cfg = {});
BlockResolvent block_resolvent(const CMatrix& H, const FeshbachResult& fr,
                               const NumericConfig& cfg = {});

// F(F(H - z; Q); Q') for nested projections Q'Q = Q' = QQ'. Throws NotNested
// if the compatibility fails at tolerance.
FeshbachResult iterate_feshbach(const CMatrix& H, const OrthProjection& Q,
                                const OrthProjection& Qprime, Complex z,
                                const NumericConfig& cfg = {});

// Lift phi in ker F(H - E; Q) to an eigenvector of H: phi -> phi (+) -R^Q_E Qp H Q phi.
CVector lift_eigenvector(const CMatrix& H, const OrthProjection& Q, Complex E, const CVector& phi,
                         const NumericConfig& cfg = {});
CVector lift_eigenvector(const FeshbachResult& fr, const CVector& phi,
                         const NumericConfig& cfg = {});

// Determinant scan: |det F_z| at declared eigenvalue samples (must be small)
// and at off-spectrum samples (must stay away from zero relative to scale).
struct IsospectralSample {
    Complex z;
    bool claimed_eigenvalue = false;
    double abs_det = 0.0;
    double pivot_scale = 1.0;  // product of |LU pivots|
    bool skipped = false;      // z too close to the complement spectrum
    bool pass = false;
};

struct IsospectralReport {
    std::vector<IsospectralSample> samples;
    double eigen_threshold = 0.0;
    double regular_floor = 0.0;
    bool all_pass = true;
};

IsospectralReport isospectral_check(const CMatrix& H, const OrthProjection& Q,
                                    const std::vector<Complex>& z_samples,
                                    const NumericConfig& cfg = {});

nlohmann::json report_to_json(const IsospectralReport& report);

} // namespace reskit::feshbach
