#include "reskit/linop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace reskit::linop {

namespace {

void check_square(const CMatrix& H, const char* who) {
    if (H.rows() != H.cols())
        fail(ErrorCode::InvalidArgument, std::string(who) + ": matrix must be square");
    if (H.rows() == 0) fail(ErrorCode::InvalidArgument, std::string(who) + ": empty matrix");
    if (!H.allFinite()) fail(ErrorCode::InvalidArgument, std::string(who) + ": non-finite entries");
}

// Fix the phase of each column: largest-magnitude component real positive.
void fix_phases(CMatrix& V) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        Eigen::Index imax = 0;
        double amax = -1.0;
        for (Eigen::Index i = 0; i < V.rows(); ++i) {
            const double a = std::abs(V(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (amax > 0.0) {
            const Complex ph = V(imax, j) / amax;
            V.col(j) /= ph;
        }
    }
}

} // namespace

// ------------------------------- OrthProjection ------------------------------

OrthProjection OrthProjection::from_basis(const CMatrix& basis_columns) {
    if (basis_columns.cols() == 0) {
        OrthProjection p;
        p.basis_ = CMatrix::Zero(basis_columns.rows(), 0);
        return p;
    }
    Eigen::HouseholderQR<CMatrix> qr(basis_columns);
    CMatrix q = qr.householderQ() * CMatrix::Identity(basis_columns.rows(), basis_columns.cols());
    OrthProjection p;
    p.basis_ = std::move(q);
    return p;
}

OrthProjection OrthProjection::from_matrix(const CMatrix& P, double tol) {
    check_square(P, "OrthProjection::from_matrix");
    const double scale = std::max(1.0, P.norm());
    if ((P * P - P).norm() > tol * scale)
        fail(ErrorCode::InvalidArgument, "projection candidate fails P^2 = P");
    if ((P - P.adjoint()).norm() > tol * scale)
        fail(ErrorCode::InvalidArgument, "projection candidate fails P = P^*");
    const int rank = static_cast<int>(std::lround(P.trace().real()));
    if (rank == 0) return zero(static_cast<int>(P.rows()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(P);
    // Eigenvalues ascend; the range basis sits in the last `rank` columns.
    OrthProjection p;
    p.basis_ = es.eigenvectors().rightCols(rank);
    return p;
}

OrthProjection OrthProjection::onto_axes(const std::vector<int>& axes, int dim) {
    CMatrix basis = CMatrix::Zero(dim, static_cast<Eigen::Index>(axes.size()));
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (axes[k] < 0 || axes[k] >= dim)
            fail(ErrorCode::InvalidArgument, "axis index out of range");
        basis(axes[k], static_cast<Eigen::Index>(k)) = 1.0;
    }
    OrthProjection p;
    p.basis_ = std::move(basis);
    p.axes_ = axes;
    return p;
}

const std::vector<int>* OrthProjection::complement_axes() const {
    if (axes_.empty()) return nullptr;
    if (!caxes_) {
        std::vector<char> taken(dim(), 0);
        for (int a : axes_) taken[a] = 1;
        auto rest = std::make_shared<std::vector<int>>();
        rest->reserve(dim() - rank());
        for (int i = 0; i < dim(); ++i)
            if (!taken[i]) rest->push_back(i);
        caxes_ = std::move(rest);
    }
    return caxes_.get();
}

OrthProjection OrthProjection::zero(int dim) {
    OrthProjection p;
    p.basis_ = CMatrix::Zero(dim, 0);
    return p;
}

CMatrix OrthProjection::complement_matrix() const {
    return CMatrix::Identity(dim(), dim()) - matrix();
}

const CMatrix& OrthProjection::complement_basis() const {
    if (!complement_) {
        const int n = dim();
        const int r = rank();
        if (r == 0) {
            complement_ = std::make_shared<CMatrix>(CMatrix::Identity(n, n));
        } else if (const auto* rest = complement_axes()) {
            CMatrix c = CMatrix::Zero(n, n - r);
            for (std::size_t k = 0; k < rest->size(); ++k)
                c((*rest)[k], static_cast<Eigen::Index>(k)) = 1.0;
            complement_ = std::make_shared<CMatrix>(std::move(c));
        } else {
            // Full QR of the basis; trailing columns span the complement.
            Eigen::HouseholderQR<CMatrix> qr(basis_);
            CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
            complement_ = std::make_shared<CMatrix>(q.rightCols(n - r));
        }
    }
    return *complement_;
}

// ----------------------------------- eig ------------------------------------

bool is_hermitian(const CMatrix& H, double tol) {
    const double scale = std::max(1.0, H.norm());
    return (H - H.adjoint()).norm() <= tol * scale;
}

CVector Spectrum::eigenvalue_vector() const {
    CVector v(static_cast<Eigen::Index>(eigenvalues.size()));
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) v(static_cast<Eigen::Index>(i)) = eigenvalues[i];
    return v;
}

Spectrum eig(const CMatrix& H, bool want_left, const NumericConfig& cfg) {
    check_square(H, "eig");
    Spectrum s;
    const Eigen::Index n = H.rows();

    if (is_hermitian(H, cfg.structural_tol)) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
        if (es.info() != Eigen::Success) fail(ErrorCode::DefectiveMatrix, "hermitian solver failed");
        s.hermitian = true;
        s.right = es.eigenvectors();
        s.eigenvalues.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) s.eigenvalues[i] = Complex(es.eigenvalues()(i), 0.0);
        fix_phases(s.right);
        if (want_left) s.left = s.right;  // orthonormal basis is its own biorthogonal
        return s;
    }

    Eigen::ComplexEigenSolver<CMatrix> es(H, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) fail(ErrorCode::DefectiveMatrix, "eigen solver failed");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
        return vals(a).imag() < vals(b).imag();
    });
    s.right.resize(n, n);
    s.eigenvalues.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        s.eigenvalues[i] = vals(order[i]);
        s.right.col(i) = es.eigenvectors().col(order[i]).normalized();
    }
    fix_phases(s.right);

    // Defectiveness test: condition of the eigenvector matrix.
    Eigen::JacobiSVD<CMatrix> svd(s.right);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0 || smax / smin > cfg.eig_defect_cond)
        fail(ErrorCode::DefectiveMatrix,
             "eigenvector condition " + format_double(smin > 0 ? smax / smin : 0.0) +
                 " exceeds limit (matrix not diagonalizable to working precision)");

    if (want_left) {
        // Rows of right^{-1}, returned column-wise so that left.col(i)^* is the
        // i-th left eigenvector functional.
        CMatrix inv = s.right.inverse();
        s.left = inv.adjoint();
    }
    return s;
}

// -------------------------------- resolvents --------------------------------

CMatrix resolvent(const CMatrix& H, Complex z, const NumericConfig& cfg) {
    check_square(H, "resolvent");
    const Eigen::Index n = H.rows();
    CMatrix shifted = H - z * CMatrix::Identity(n, n);
    Eigen::PartialPivLU<CMatrix> lu(shifted);
    const double rc = lu.rcond();
    if (!(rc > cfg.singular_rcond))
        fail(ErrorCode::SingularShift,
             "shift z = (" + format_double(z.real()) + ", " + format_double(z.imag()) +
                 ") lies on the spectrum to working precision (rcond = " + format_double(rc) + ")");
    return lu.inverse();
}

RestrictedResolvent restricted_resolvent(const CMatrix& H, const OrthProjection& Q, Complex z,
                                         const NumericConfig& cfg) {
    check_square(H, "restricted_resolvent");
    if (Q.dim() != H.rows()) fail(ErrorCode::InvalidArgument, "projection dimension mismatch");
    const CMatrix& C = Q.complement_basis();
    RestrictedResolvent r;
    r.basis = C;
    if (C.cols() == 0) {
        r.matrix = CMatrix::Zero(0, 0);
        return r;
    }
    CMatrix compressed = C.adjoint() * H * C;
    r.matrix = resolvent(compressed, z, cfg);
    return r;
}

// ----------------------------- ResolventEvaluator ---------------------------

ResolventEvaluator::ResolventEvaluator(const CMatrix& M, const NumericConfig& cfg)
    : n_(static_cast<int>(M.rows())), cfg_(cfg) {
    check_square(M, "ResolventEvaluator");
    if (!is_hermitian(M, cfg.structural_tol))
        fail(ErrorCode::NotSelfAdjoint, "ResolventEvaluator expects a Hermitian matrix");

    // Collect rows carrying any off-diagonal weight.
    std::vector<int> border;
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (i != j && M(i, j) != Complex(0.0, 0.0)) {
                border.push_back(i);
                break;
            }
        }
    }

    if (border.empty()) {
        strategy_ = "diagonal";
        diag_ = M.diagonal();
        return;
    }
    const int max_border = 64;
    if (static_cast<int>(border.size()) <= max_border && n_ > 4 * static_cast<int>(border.size())) {
        // Off-diagonal structure confined to a small border over a diagonal
        // bulk: is the bulk-bulk block really diagonal?
        std::vector<char> is_border(n_, 0);
        for (int b : border) is_border[b] = 1;
        bool bulk_diagonal = true;
        for (int i = 0; i < n_ && bulk_diagonal; ++i) {
            if (is_border[i]) continue;
            for (int j = 0; j < n_; ++j) {
                if (i != j && !is_border[j] && M(i, j) != Complex(0.0, 0.0)) {
                    bulk_diagonal = false;
                    break;
                }
            }
        }
        if (bulk_diagonal) {
            strategy_ = "bordered";
            border_ = border;
            interior_.reserve(n_ - border.size());
            for (int i = 0; i < n_; ++i)
                if (!is_border[i]) interior_.push_back(i);
            const int b = static_cast<int>(border_.size());
            const int d = static_cast<int>(interior_.size());
            mbb_.resize(b, b);
            mbd_.resize(b, d);
            dinterior_.resize(d);
            for (int i = 0; i < b; ++i) {
                for (int j = 0; j < b; ++j) mbb_(i, j) = M(border_[i], border_[j]);
                for (int j = 0; j < d; ++j) mbd_(i, j) = M(border_[i], interior_[j]);
            }
            for (int j = 0; j < d; ++j) dinterior_(j) = M(interior_[j], interior_[j]).real();
            mdb_ = mbd_.adjoint();
            return;
        }
    }

    strategy_ = "dense";
    Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
    if (es.info() != Eigen::Success) fail(ErrorCode::DefectiveMatrix, "dense resolvent eig failed");
    evecs_ = es.eigenvectors();
    evals_ = es.eigenvalues();
    dense_ = M;
}

CMatrix ResolventEvaluator::solve(Complex z, const CMatrix& B) const {
    if (B.rows() != n_) fail(ErrorCode::InvalidArgument, "ResolventEvaluator: block shape mismatch");
    const double dist = spectral_distance(z);
    if (dist <= cfg_.singular_rcond * std::max(1.0, z == Complex(0) ? 1.0 : std::abs(z)))
        fail(ErrorCode::SingularShift, "shift on the spectrum of the compressed block");

    if (strategy_ == "diagonal") {
        CMatrix out(n_, B.cols());
        for (int i = 0; i < n_; ++i) out.row(i) = B.row(i) / (diag_(i) - z);
        return out;
    }
    if (strategy_ == "bordered") return solve_bordered(z, B);
    // dense: V (D - z)^{-1} V^* B
    CMatrix tmp = evecs_.adjoint() * B;
    for (int i = 0; i < n_; ++i) tmp.row(i) /= (Complex(evals_(i), 0.0) - z);
    return evecs_ * tmp;
}

CMatrix ResolventEvaluator::solve_bordered(Complex z, const CMatrix& B) const {
    const int b = static_cast<int>(border_.size());
    const int d = static_cast<int>(interior_.size());
    const int m = static_cast<int>(B.cols());
    // Split the right-hand side.
    CMatrix Bb(b, m), Bd(d, m);
    for (int i = 0; i < b; ++i) Bb.row(i) = B.row(border_[i]);
    for (int i = 0; i < d; ++i) Bd.row(i) = B.row(interior_[i]);
    // (D - z)^{-1} applied to interior pieces.
    CMatrix DinvBd = Bd;
    CMatrix DinvMdb = mdb_;
    for (int i = 0; i < d; ++i) {
        const Complex g = 1.0 / (Complex(dinterior_(i), 0.0) - z);
        DinvBd.row(i) *= g;
        DinvMdb.row(i) *= g;
    }
    // Schur complement on the border block.
    CMatrix S = mbb_ - z * CMatrix::Identity(b, b) - mbd_ * DinvMdb;
    Eigen::PartialPivLU<CMatrix> lu(S);
    if (!(lu.rcond() > cfg_.singular_rcond))
        fail(ErrorCode::SingularShift, "shift hits an eigenvalue of the bordered block");
    CMatrix xb = lu.solve(Bb - mbd_ * DinvBd);
    CMatrix xd = DinvBd - DinvMdb * xb;
    CMatrix out(n_, m);
    for (int i = 0; i < b; ++i) out.row(border_[i]) = xb.row(i);
    for (int i = 0; i < d; ++i) out.row(interior_[i]) = xd.row(i);
    return out;
}

CMatrix ResolventEvaluator::sandwich(const CMatrix& B, Complex z, const CMatrix& C) const {
    return B.adjoint() * solve(z, C);
}

double ResolventEvaluator::spectral_distance(Complex z) const {
    if (strategy_ == "diagonal") {
        double dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) dist = std::min(dist, std::abs(diag_(i) - z));
        return dist;
    }
    if (strategy_ == "dense") {
        double dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_; ++i) dist = std::min(dist, std::abs(Complex(evals_(i), 0.0) - z));
        return dist;
    }
    // bordered: |Im z| is an exact lower bound for a Hermitian matrix; for
    // real shifts fall back to the interior diagonal (the border adds at most
    // b eigenvalues whose positions the Schur LU will flag via SingularShift).
    if (z.imag() != 0.0) return std::abs(z.imag());
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(interior_.size()); ++i)
        dist = std::min(dist, std::abs(Complex(dinterior_(i), 0.0) - z));
    return dist;
}

// -------------------------------- propagator --------------------------------

Complex propagator_exact(const CMatrix& H, double t, const CVector& phi, const CVector& psi,
                         const NumericConfig& cfg) {
    return propagator_exact_grid(H, {t}, phi, psi, cfg)[0];
}

std::vector<Complex> propagator_exact_grid(const CMatrix& H, const std::vector<double>& t_grid,
                                           const CVector& phi, const CVector& psi,
                                           const NumericConfig& cfg) {
    check_square(H, "propagator_exact");
    if (!is_hermitian(H, cfg.structural_tol))
        fail(ErrorCode::NotSelfAdjoint, "propagator_exact expects a self-adjoint generator");
    if (phi.size() != H.rows() || psi.size() != H.rows())
        fail(ErrorCode::InvalidArgument, "propagator_exact: vector dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    if (es.info() != Eigen::Success) fail(ErrorCode::DefectiveMatrix, "propagator eig failed");
    const CVector a = es.eigenvectors().adjoint() * phi;
    const CVector b = es.eigenvectors().adjoint() * psi;
    std::vector<Complex> out(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i)
            acc += std::conj(a(i)) * b(i) * std::exp(kI * t_grid[k] * es.eigenvalues()(i));
        out[k] = acc;
    }
    return out;
}

// ------------------------------ serialization -------------------------------

nlohmann::json matrix_to_json(const CMatrix& M) {
    nlohmann::json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    std::vector<double> re, im;
    re.reserve(M.size());
    im.reserve(M.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index k = 0; k < M.cols(); ++k) {
            re.push_back(M(i, k).real());
            im.push_back(M(i, k).imag());
        }
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
        fail(ErrorCode::IoError, "matrix json: re/im length mismatch");
    CMatrix M(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index k = 0; k < cols; ++k, ++idx) M(i, k) = Complex(re[idx], im[idx]);
    return M;
}

} // namespace reskit::linop

namespace reskit {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularShift: return "SingularShift";
        case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
        case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
        case ErrorCode::NotNested: return "NotNested";
        case ErrorCode::NotInKernel: return "NotInKernel";
        case ErrorCode::A1Violated: return "A1Violated";
        case ErrorCode::A4Violated: return "A4Violated";
        case ErrorCode::DegenerateLevelShift: return "DegenerateLevelShift";
        case ErrorCode::LimitNotConverged: return "LimitNotConverged";
        case ErrorCode::OutsideWindow: return "OutsideWindow";
        case ErrorCode::CircleTouchesSpectrum: return "CircleTouchesSpectrum";
        case ErrorCode::NotSeparating: return "NotSeparating";
        case ErrorCode::PairingAmbiguous: return "PairingAmbiguous";
        case ErrorCode::FixedPointDiverged: return "FixedPointDiverged";
        case ErrorCode::EmptyResonanceSet: return "EmptyResonanceSet";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::NotPartiallyStable: return "NotPartiallyStable";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::WindowTooNarrow: return "WindowTooNarrow";
        case ErrorCode::ClusterOutsideContinuum: return "ClusterOutsideContinuum";
        case ErrorCode::UnsupportedCoupling: return "UnsupportedCoupling";
        case ErrorCode::NonIntegrableDensity: return "NonIntegrableDensity";
        case ErrorCode::IntegralNotDamped: return "IntegralNotDamped";
        case ErrorCode::LabelNotInClosedSet: return "LabelNotInClosedSet";
        case ErrorCode::InfraredDivergent: return "InfraredDivergent";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace reskit
