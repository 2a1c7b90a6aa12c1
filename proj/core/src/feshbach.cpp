#include "reskit/feshbach.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace reskit::feshbach {

namespace {

// Reject shifts sitting on the compressed complement spectrum. Theorem-level
// preconditions presume z away from sigma(H^Q); distances below the floor are
// rejected rather than regularized.
constexpr double kComplementFloor = 1e-8;

} // namespace

Complex FeshbachResult::scaled_determinant(double* scale) const {
    Eigen::PartialPivLU<CMatrix> lu(map);
    const CMatrix& u = lu.matrixLU();
    Complex det = lu.permutationP().determinant();
    for (Eigen::Index i = 0; i < u.rows(); ++i) det *= u(i, i);
    if (scale != nullptr) {
        // Magnitude reference: product of diagonal magnitudes of the map, so
        // the "zero" test measures cancellation instead of raw size.
        double sc = 1.0;
        for (Eigen::Index i = 0; i < map.rows(); ++i) sc *= std::max(std::abs(map(i, i)), 1e-300);
        *scale = sc;
    }
    return det;
}

FeshbachResult feshbach_map(const CMatrix& H, const OrthProjection& Q, Complex z,
                            const NumericConfig& cfg) {
    if (H.rows() != H.cols() || Q.dim() != H.rows())
        fail(ErrorCode::InvalidArgument, "feshbach_map: dimension mismatch");
    const int r = Q.rank();
    if (r == 0) fail(ErrorCode::InvalidArgument, "feshbach_map: zero-rank projection");
    const CMatrix& B = Q.basis();
    const CMatrix& C = Q.complement_basis();
    const int k = static_cast<int>(C.cols());

    FeshbachResult out;
    out.Q = Q;
    out.z = z;

    const CMatrix Hqq = B.adjoint() * H * B;  // r x r
    if (k == 0) {
        out.map = Hqq - z * CMatrix::Identity(r, r);
        out.dress_left = CMatrix::Zero(r, 0);
        out.dress_right = CMatrix::Zero(0, r);
        return out;
    }

    const CMatrix Hqc = B.adjoint() * H * C;  // r x k
    const CMatrix Hcq = C.adjoint() * H * B;  // k x r
    CMatrix Hcc = C.adjoint() * H * C;        // k x k
    Hcc -= z * CMatrix::Identity(k, k);

    auto lu = std::make_shared<Eigen::PartialPivLU<CMatrix>>(Hcc);
    if (!(lu->rcond() > cfg.singular_rcond))
        fail(ErrorCode::SingularShift, "shift z lies on the spectrum of the compressed complement");
    // Distance guard: rcond * ||Hcc||_1 estimates the gap to singularity.
    const double col_norm = Hcc.cwiseAbs().colwise().sum().maxCoeff();
    if (lu->rcond() * col_norm < kComplementFloor)
        fail(ErrorCode::SingularShift,
             "shift within " + format_double(kComplementFloor) + " of the complement spectrum");

    out.dress_right = lu->solve(Hcq);                    // R_z^Q Qp H Q
    out.dress_left = lu->solve(Hqc.adjoint()).adjoint(); // Q H Qp R_z^Q
    out.map = Hqq - z * CMatrix::Identity(r, r) - Hqc * out.dress_right;
    out.complement_lu = std::move(lu);
    return out;
}

BlockResolvent block_resolvent(const CMatrix& H, const OrthProjection& Q, Complex z,
                               const NumericConfig& cfg) {
    return block_resolvent(H, feshbach_map(H, Q, z, cfg), cfg);
}

BlockResolvent block_resolvent(const CMatrix& H, const FeshbachResult& fr,
                               const NumericConfig& cfg) {
    const OrthProjection& Q = fr.Q;
    const CMatrix& B = Q.basis();
    const CMatrix& C = Q.complement_basis();
    const int k = static_cast<int>(C.cols());
    const int r = fr.rank();

    Eigen::PartialPivLU<CMatrix> flu(fr.map);
    if (!(flu.rcond() > cfg.singular_rcond))
        fail(ErrorCode::SingularShift, "shift z lies on the spectrum of H (Feshbach map singular)");

    BlockResolvent out;
    out.QRQ = flu.inverse();
    if (k == 0) {
        out.QRQp = CMatrix::Zero(r, 0);
        out.QpRQ = CMatrix::Zero(0, r);
        out.QpRQp = CMatrix::Zero(0, 0);
        out.full = B * out.QRQ * B.adjoint();
        return out;
    }
    out.QRQp = -out.QRQ * fr.dress_left;
    out.QpRQ = -fr.dress_right * out.QRQ;
    const CMatrix rzq = fr.complement_lu->inverse();
    out.QpRQp = rzq + fr.dress_right * out.QRQ * fr.dress_left;
    out.full = B * out.QRQ * B.adjoint() + B * out.QRQp * C.adjoint() + C * out.QpRQ * B.adjoint() +
               C * out.QpRQp * C.adjoint();
    (void)H;
    return out;
}

FeshbachResult iterate_feshbach(const CMatrix& H, const OrthProjection& Q,
                                const OrthProjection& Qprime, Complex z,
                                const NumericConfig& cfg) {
    if (Q.dim() != Qprime.dim()) fail(ErrorCode::InvalidArgument, "iterate_feshbach: dim mismatch");
    const CMatrix Pq = Q.matrix();
    const CMatrix Pp = Qprime.matrix();
    const double scale = std::max(1.0, Pp.norm());
    if ((Pp * Pq - Pp).norm() > 1e-10 * scale || (Pq * Pp - Pp).norm() > 1e-10 * scale)
        fail(ErrorCode::NotNested, "projections fail Q'Q = Q' = QQ' at tolerance");

    FeshbachResult outer = feshbach_map(H, Q, z, cfg);

    // Express Q' on Ran Q and reduce the outer map once more. The inner map
    // carries no additional shift: the outer one already absorbed z.
    const CMatrix inner_basis = Q.basis().adjoint() * Qprime.basis();  // r x r'
    OrthProjection Qin = OrthProjection::from_basis(inner_basis);
    const CMatrix& Bi = Qin.basis();
    const CMatrix& Ci = Qin.complement_basis();
    const int ki = static_cast<int>(Ci.cols());
    const int ri = Qin.rank();

    FeshbachResult out;
    out.Q = Qprime;
    out.z = z;
    const CMatrix Mqq = Bi.adjoint() * outer.map * Bi;
    if (ki == 0) {
        out.map = Mqq;
        out.dress_left = CMatrix::Zero(ri, 0);
        out.dress_right = CMatrix::Zero(0, ri);
        return out;
    }
    const CMatrix Mqc = Bi.adjoint() * outer.map * Ci;
    const CMatrix Mcq = Ci.adjoint() * outer.map * Bi;
    const CMatrix Mcc = Ci.adjoint() * outer.map * Ci;
    Eigen::PartialPivLU<CMatrix> lu(Mcc);
    if (!(lu.rcond() > cfg.singular_rcond))
        fail(ErrorCode::SingularShift, "inner reduction hits the complement spectrum");
    out.dress_right = lu.solve(Mcq);
    out.dress_left = lu.solve(Mqc.adjoint()).adjoint();
    out.map = Mqq - Mqc * out.dress_right;
    return out;
}

CVector lift_eigenvector(const CMatrix& H, const OrthProjection& Q, Complex E, const CVector& phi,
                         const NumericConfig& cfg) {
    return lift_eigenvector(feshbach_map(H, Q, E, cfg), phi, cfg);
}

CVector lift_eigenvector(const FeshbachResult& fr, const CVector& phi, const NumericConfig& cfg) {
    if (phi.size() != fr.rank()) fail(ErrorCode::InvalidArgument, "lift: phi must live on Ran Q");
    const double coord_scale = std::max(1.0, fr.map.norm());
    const double kernel_residual = (fr.map * phi).norm();
    if (kernel_residual > 1e-6 * coord_scale * phi.norm())
        fail(ErrorCode::NotInKernel, "F(H-E;Q) phi residual " + format_double(kernel_residual) +
                                         " too large for a kernel vector");
    (void)cfg;
    const CMatrix& B = fr.Q.basis();
    const CMatrix& C = fr.Q.complement_basis();
    CVector psi = B * phi;
    if (C.cols() > 0) psi -= C * (fr.dress_right * phi);
    return psi;
}

IsospectralReport isospectral_check(const CMatrix& H, const OrthProjection& Q,
                                    const std::vector<Complex>& z_samples,
                                    const NumericConfig& cfg) {
    IsospectralReport report;
    report.eigen_threshold = 1e-8;
    report.regular_floor = 1e-6;

    linop::Spectrum spec = linop::eig(H, false, cfg);
    auto near_spectrum = [&](Complex z, double tol) {
        for (const Complex& ev : spec.eigenvalues)
            if (std::abs(ev - z) < tol) return true;
        return false;
    };

    std::vector<Complex> all = z_samples;
    for (const Complex& ev : spec.eigenvalues) all.push_back(ev);

    const double hscale = std::max(1.0, H.norm());
    for (std::size_t i = 0; i < all.size(); ++i) {
        IsospectralSample s;
        s.z = all[i];
        s.claimed_eigenvalue = i >= z_samples.size() || near_spectrum(all[i], 1e-12 * hscale);
        FeshbachResult fr;
        try {
            fr = feshbach_map(H, Q, s.z, cfg);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularShift) {
                s.skipped = true;
                s.pass = true;
                report.samples.push_back(s);
                continue;
            }
            throw;
        }
        const Complex det = fr.scaled_determinant(&s.pivot_scale);
        s.abs_det = std::abs(det);
        if (s.claimed_eigenvalue) {
            s.pass = s.abs_det <= report.eigen_threshold * std::max(s.pivot_scale, 1e-300);
        } else {
            s.pass = s.abs_det >= report.regular_floor * std::max(s.pivot_scale, 1e-300);
        }
        report.all_pass = report.all_pass && s.pass;
        report.samples.push_back(s);
    }
    return report;
}

nlohmann::json report_to_json(const IsospectralReport& report) {
    nlohmann::json j;
    j["eigen_threshold"] = report.eigen_threshold;
    j["regular_floor"] = report.regular_floor;
    j["all_pass"] = report.all_pass;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : report.samples) {
        rows.push_back({{"re_z", s.z.real()},
                        {"im_z", s.z.imag()},
                        {"claimed_eigenvalue", s.claimed_eigenvalue},
                        {"abs_det", s.abs_det},
                        {"pivot_scale", s.pivot_scale},
                        {"skipped", s.skipped},
                        {"pass", s.pass}});
    }
    j["samples"] = std::move(rows);
    return j;
}

} // namespace reskit::feshbach
