#include "reskit/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "reskit/quadrature.hpp"

namespace reskit::resonance {

namespace {

CMatrix select(const CMatrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    CMatrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = M(rows[i], cols[j]);
    return out;
}

CVector select(const CVector& v, const std::vector<int>& rows) {
    CVector out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out(i) = v(rows[i]);
    return out;
}

// Sort eigenpairs canonically: the real eigenvalue first when the cluster is
// partially stable, the rest lexicographic by (Re, Im).
struct EigenPair {
    Complex value;
    CMatrix projection;
    bool real = false;
};

} // namespace

const char* to_string(Stability s) {
    return s == Stability::PartiallyStable ? "partially-stable" : "unstable";
}

// ------------------------------ ClusterResolvent ----------------------------

ClusterResolvent::ClusterResolvent(const Model& model, int cluster_index, bool include_coupling,
                                   const NumericConfig& cfg)
    : cfg_(cfg) {
    if (cluster_index < 0 || cluster_index >= static_cast<int>(model.clusters.size()))
        fail(ErrorCode::InvalidArgument, "cluster index out of range");
    const auto& cluster = model.clusters[cluster_index];
    m_ = cluster.multiplicity;
    e_ = cluster.e;
    cluster_axes_ = cluster.indices;

    auto P = cluster.projection(model.dim());
    complement_axes_ = *P.complement_axes();

    // Compressed complement of the generator: L0 for the unperturbed limit,
    // L0 + delta I for resonance data.
    CMatrix compressed = select(model.L0, complement_axes_, complement_axes_);
    if (include_coupling && model.delta != 0.0)
        compressed += model.delta * select(model.I, complement_axes_, complement_axes_);
    eval_ = std::make_shared<linop::ResolventEvaluator>(compressed, cfg);
    coupling_ = select(model.I, complement_axes_, cluster_axes_);

    // Regularization depths: stay above the quasi-continuum level spacing and
    // inside the analyticity radius set by the other clusters and the window
    // edges.
    double radius = cfg.extrap_eps_max;
    for (const auto& other : model.clusters)
        if (std::abs(other.e - e_) > 0.0) radius = std::min(radius, 0.3 * std::abs(other.e - e_));
    if (model.grid.window_max > model.grid.window_min) {
        radius = std::min(radius, 0.3 * std::abs(model.grid.window_max - e_));
        radius = std::min(radius, 0.3 * std::abs(e_ - model.grid.window_min));
    }
    eps_max_ = radius;
    eps_min_ = model.grid.spacing > 0.0
                   ? cfg.extrap_spacing_factor * model.grid.spacing
                   : eps_max_ * std::pow(cfg.extrap_ratio, 2 * cfg.extrap_min_samples);
    const double floor_needed = eps_max_ * std::pow(cfg.extrap_ratio, cfg.extrap_min_samples - 1);
    if (eps_min_ > floor_needed)
        fail(ErrorCode::LimitNotConverged,
             "grid spacing too coarse for the boundary-value limit (eps_min " +
                 format_double(eps_min_) + " > " + format_double(floor_needed) + ")");
}

CMatrix ClusterResolvent::a(Complex z) const {
    if (z.imag() >= 0.0)
        fail(ErrorCode::InvalidArgument, "A_z requires Im z < 0 (use a_boundary on the axis)");
    return -(coupling_.adjoint() * eval_->solve(z, coupling_));
}

CMatrix ClusterResolvent::extrapolate(const std::function<CMatrix(double)>& f,
                                      double* spread) const {
    double local_spread = 0.0;
    std::vector<double> eps;
    std::vector<CMatrix> samples;
    double e = eps_max_;
    CMatrix value;
    while (true) {
        eps.push_back(e);
        samples.push_back(f(e));
        if (static_cast<int>(eps.size()) >= cfg_.extrap_min_samples) {
            value = quad::richardson(eps, samples, &local_spread);
            const double scale = std::max(1.0, value.norm());
            if (local_spread <= cfg_.extrap_tol * scale) break;
        }
        const double next = e * cfg_.extrap_ratio;
        if (next < eps_min_ * (1.0 - 1e-12)) {
            value = quad::richardson(eps, samples, &local_spread);
            const double scale = std::max(1.0, value.norm());
            if (local_spread > cfg_.extrap_tol * scale)
                fail(ErrorCode::LimitNotConverged,
                     "extrapolation spread " + format_double(local_spread) +
                         " above tolerance at the level-spacing floor");
            break;
        }
        e = next;
    }
    if (spread != nullptr) *spread = local_spread;
    return value;
}

CMatrix ClusterResolvent::a_boundary(double x, double* spread) const {
    return extrapolate(
        [&](double eps) {
            const Complex z(x, -eps);
            return (-(coupling_.adjoint() * eval_->solve(z, coupling_))).eval();
        },
        spread);
}

CMatrix ClusterResolvent::boundary_coupling_right(double x) const {
    return extrapolate(
        [&](double eps) { return eval_->solve(Complex(x, -eps), coupling_); }, nullptr);
}

CMatrix ClusterResolvent::boundary_coupling_left(double x) const {
    // Pe I R_{x-i0} = (R_{x+i0} I Pe)^*.
    return extrapolate(
        [&](double eps) {
            return (eval_->solve(Complex(x, eps), coupling_)).adjoint().eval();
        },
        nullptr);
}

// -------------------------------- level shift -------------------------------

namespace {

std::vector<EigenPair> classify_spectrum(const CMatrix& lambda, double* gap_out,
                                          Stability* stab_out, const NumericConfig& cfg) {
    const int m = static_cast<int>(lambda.rows());
    linop::Spectrum spec = linop::eig(lambda, true, cfg);
    const double scale = std::max(lambda.norm(), 1e-30);

    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            gap = std::min(gap, std::abs(spec.eigenvalues[i] - spec.eigenvalues[j]));
    if (m > 1 && gap < cfg.simplicity_tol * scale)
        fail(ErrorCode::DegenerateLevelShift,
             "level-shift eigenvalue spacing " + format_double(gap) +
                 " below the simplicity threshold (violates the golden-rule condition)");

    std::vector<EigenPair> pairs(m);
    int real_count = 0;
    for (int i = 0; i < m; ++i) {
        EigenPair p;
        p.value = spec.eigenvalues[i];
        // P_j = v_j l_j^* with <l_j, v_j> = 1.
        const CVector v = spec.right.col(i);
        const CVector l = spec.left->col(i);
        p.projection = (v * l.adjoint()) / (l.adjoint() * v)(0, 0);
        p.real = std::abs(p.value.imag()) <= cfg.class_real_tol * scale;
        if (!p.real && p.value.imag() < 0.0)
            fail(ErrorCode::A4Violated, "level-shift eigenvalue with negative imaginary part " +
                                            format_double(p.value.imag()));
        real_count += p.real ? 1 : 0;
        pairs[i] = std::move(p);
    }
    if (real_count > 1)
        fail(ErrorCode::A4Violated,
             std::to_string(real_count) + " real level-shift eigenvalues (at most one allowed)");

    std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
        if (a.real != b.real) return a.real;  // the real eigenvalue leads
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    if (gap_out != nullptr) *gap_out = gap;
    if (stab_out != nullptr)
        *stab_out = real_count == 1 ? Stability::PartiallyStable : Stability::Unstable;
    return pairs;
}

} // namespace

LevelShiftData level_shift(const Model& model, int cluster_index, const NumericConfig& cfg) {
    const double a1 = model.a1_residual();
    if (a1 > cfg.structural_tol * std::max(1.0, model.I.norm()))
        fail(ErrorCode::A1Violated, "Pe I Pe residual " + format_double(a1));

    ClusterResolvent red(model, cluster_index, /*include_coupling=*/false, cfg);
    LevelShiftData out;
    out.cluster_index = cluster_index;
    out.e = red.cluster_energy();
    out.lambda_matrix = red.a_boundary(out.e, &out.extrapolation_spread);

    auto pairs = classify_spectrum(out.lambda_matrix, &out.gap, &out.classification, cfg);
    for (auto& p : pairs) {
        out.eigenvalues.push_back(p.value);
        out.projections.push_back(std::move(p.projection));
    }
    return out;
}

// ------------------------------ Riesz projection -----------------------------

CMatrix riesz_projection(const CMatrix& A, Complex center, double radius, int n_nodes,
                         const NumericConfig& cfg) {
    if (A.rows() != A.cols()) fail(ErrorCode::InvalidArgument, "riesz: square matrix required");
    if (n_nodes < 16) fail(ErrorCode::InvalidArgument, "riesz: need at least 16 nodes");
    if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "riesz: radius must be positive");

    linop::Spectrum spec = linop::eig(A, false, cfg);
    int inside = 0;
    for (const Complex& ev : spec.eigenvalues) {
        const double d = std::abs(ev - center);
        if (std::abs(d - radius) < 0.02 * radius)
            fail(ErrorCode::CircleTouchesSpectrum,
                 "eigenvalue at distance " + format_double(d) + " from center, radius " +
                     format_double(radius));
        if (d < radius) ++inside;
    }
    if (inside == 0)
        fail(ErrorCode::NotSeparating, "no eigenvalue enclosed by the requested circle");

    const int n = static_cast<int>(A.rows());
    CMatrix acc = CMatrix::Zero(n, n);
    const CMatrix id = CMatrix::Identity(n, n);
    for (int k = 0; k < n_nodes; ++k) {
        const double theta = 2.0 * M_PI * (k + 0.5) / n_nodes;
        const Complex phase = std::exp(kI * theta);
        const Complex zeta = center + radius * phase;
        acc -= radius * phase * (A - zeta * id).partialPivLu().solve(id);
    }
    CMatrix q = acc / static_cast<double>(n_nodes);

    const double idem = (q * q - q).norm();
    if (idem > cfg.riesz_idem_tol * std::max(1.0, q.norm()))
        fail(ErrorCode::QuadratureNotConverged,
             "Riesz projection idempotency residual " + format_double(idem));
    const double tr = q.trace().real();
    if (std::lround(tr) != inside)
        fail(ErrorCode::NotSeparating, "trace " + format_double(tr) + " does not match " +
                                           std::to_string(inside) + " enclosed eigenvalues");
    return q;
}

// ------------------------------- resonance data -----------------------------

namespace {

// Eigen-data of an m x m reduced operator paired against reference
// eigenvalues: returns per-reference (a_j, Q_j).
struct PairedSpectrum {
    std::vector<Complex> a;
    std::vector<CMatrix> q;
};

PairedSpectrum paired_spectrum(const CMatrix& A, const std::vector<Complex>& refs,
                               double pairing_radius, int riesz_nodes, const NumericConfig& cfg) {
    const int m = static_cast<int>(A.rows());
    PairedSpectrum out;
    if (m == 1) {
        out.a = {A(0, 0)};
        out.q = {CMatrix::Identity(1, 1)};
        if (std::abs(out.a[0] - refs[0]) >= pairing_radius && pairing_radius > 0.0)
            fail(ErrorCode::PairingAmbiguous,
                 "reduced eigenvalue drifted outside the pairing radius");
        return out;
    }
    linop::Spectrum spec = linop::eig(A, false, cfg);
    for (const Complex& ref : refs) {
        int hits = 0;
        for (const Complex& ev : spec.eigenvalues)
            if (std::abs(ev - ref) < pairing_radius) ++hits;
        if (hits != 1)
            fail(ErrorCode::PairingAmbiguous,
                 std::to_string(hits) + " reduced eigenvalues within the pairing radius of (" +
                     format_double(ref.real()) + ", " + format_double(ref.imag()) + ")");
        out.q.push_back(riesz_projection(A, ref, pairing_radius, riesz_nodes, cfg));
        out.a.push_back((A * out.q.back()).trace());
    }
    return out;
}

} // namespace

ResonanceData resonance_data(const Model& model, int cluster_index, const LevelShiftData& lsd,
                             double window_halfwidth, const NumericConfig& cfg) {
    if (std::abs(model.delta) > cfg.small_delta_guard)
        fail(ErrorCode::InvalidArgument,
             "delta " + format_double(model.delta) + " exceeds the small-coupling guard " +
                 format_double(cfg.small_delta_guard) + " (--force bypasses the guard)");

    ResonanceData out;
    out.cluster_index = cluster_index;
    out.e = lsd.e;
    out.delta = model.delta;
    out.level_shift = lsd;
    out.partially_stable = lsd.classification == Stability::PartiallyStable;

    ClusterResolvent red(model, cluster_index, /*include_coupling=*/true, cfg);
    out.cluster_axes = red.cluster_axes();
    out.complement_axes = red.complement_axes();
    const int m = red.multiplicity();

    // Pairing radius: half the within-cluster eigenvalue separation (the
    // guaranteed uniqueness radius); m = 1 clusters have no pairing issue.
    const double pairing_radius =
        std::isfinite(lsd.gap) ? 0.5 * lsd.gap
                               : std::max({1.0, std::abs(lsd.eigenvalues[0])});

    const CMatrix a_e = red.a_boundary(out.e, nullptr);
    out.deviation_constant =
        (a_e - lsd.lambda_matrix).norm() / std::max(std::abs(model.delta), 1e-30);

    PairedSpectrum ps = paired_spectrum(a_e, lsd.eigenvalues, pairing_radius, cfg.riesz_nodes, cfg);

    // Boundary derivatives by a five-point stencil inside the window.
    const double hw = std::isfinite(window_halfwidth) ? window_halfwidth : pairing_radius;
    const double h = cfg.derivative_step_factor * hw;
    std::vector<double> xs = {out.e - 2 * h, out.e - h, out.e + h, out.e + 2 * h};
    std::vector<PairedSpectrum> stencil;
    for (double x : xs)
        stencil.push_back(
            paired_spectrum(red.a_boundary(x, nullptr), lsd.eigenvalues, pairing_radius,
                            cfg.riesz_nodes, cfg));

    for (int j = 0; j < m; ++j) {
        ResonanceMode mode;
        mode.lambda = lsd.eigenvalues[j];
        mode.a = ps.a[j];
        mode.riesz = ps.q[j];
        mode.a_prime = (stencil[0].a[j] - 8.0 * stencil[1].a[j] + 8.0 * stencil[2].a[j] -
                        stencil[3].a[j]) /
                       (12.0 * h);
        out.modes.push_back(std::move(mode));
    }

    out.coupling_right_e = red.boundary_coupling_right(out.e);
    out.coupling_left_e = red.boundary_coupling_left(out.e);

    if (out.partially_stable) {
        // Damped Picard iteration for e - E + delta^2 a_0(E) = 0. The real
        // eigenvalue leads the ordering, so a_0 pairs against eigenvalues[0].
        const double d2 = model.delta * model.delta;
        auto a0_at = [&](double x) {
            return paired_spectrum(red.a_boundary(x, nullptr), lsd.eigenvalues, pairing_radius,
                                   cfg.riesz_nodes, cfg);
        };
        double E = out.e;
        bool converged = false;
        for (int it = 0; it < cfg.fixed_point_max_iter; ++it) {
            const double target = out.e + d2 * a0_at(E).a[0].real();
            const double next = E + cfg.fixed_point_damping * (target - E);
            const bool settled = std::abs(target - next) < 0.25 * cfg.fixed_point_tol;
            E = next;
            if (settled) {
                E = out.e + d2 * a0_at(E).a[0].real();  // undamped polish
                converged = true;
                break;
            }
        }
        if (!converged)
            fail(ErrorCode::FixedPointDiverged,
                 "perturbed-eigenvalue iteration did not converge in " +
                     std::to_string(cfg.fixed_point_max_iter) + " steps");
        PairedSpectrum pfinal = a0_at(E);
        out.E = E;
        out.fixed_point_residual = std::abs(Complex(out.e - E, 0.0) + d2 * pfinal.a[0]);
        out.q0_E = pfinal.q[0];
        if (out.fixed_point_residual > cfg.fixed_point_tol)
            fail(ErrorCode::FixedPointDiverged,
                 "fixed-point residual " + format_double(out.fixed_point_residual));

        // a_0'(E) by the same stencil centered at E.
        std::vector<double> xe = {out.E - 2 * h, out.E - h, out.E + h, out.E + 2 * h};
        std::vector<Complex> a0s;
        for (double x : xe) {
            PairedSpectrum p =
                paired_spectrum(red.a_boundary(x, nullptr), lsd.eigenvalues, pairing_radius,
                                cfg.riesz_nodes, cfg);
            a0s.push_back(p.a[0]);
        }
        out.a0_prime_E = (a0s[0] - 8.0 * a0s[1] + 8.0 * a0s[2] - a0s[3]) / (12.0 * h);
        out.coupling_right_E = red.boundary_coupling_right(out.E);
        out.coupling_left_E = red.boundary_coupling_left(out.E);
    }
    return out;
}

Complex ResonanceData::decay_amplitude(int j, const CVector& phi, const CVector& psi) const {
    const CVector phic = select(phi, cluster_axes);
    const CVector phik = select(phi, complement_axes);
    const CVector psic = select(psi, cluster_axes);
    const CVector psik = select(psi, complement_axes);
    const CMatrix& q = modes[j].riesz;

    Complex amp = (phic.adjoint() * q * psic)(0, 0);
    const CVector npsi = coupling_left_e * psik;   // N psi_k, m
    const CVector mphi = coupling_right_e.adjoint() * phik;  // (M^* phi_k), m
    Complex corr = -(phic.adjoint() * q * npsi)(0, 0) - (mphi.adjoint() * q * psic)(0, 0) +
                   delta * (mphi.adjoint() * q * npsi)(0, 0);
    return amp + delta * corr;
}

CMatrix ResonanceData::decay_operator(int j) const {
    const int n = static_cast<int>(cluster_axes.size() + complement_axes.size());
    CMatrix out = CMatrix::Zero(n, n);
    const CMatrix& q = modes[j].riesz;
    const CMatrix qn = q * coupling_left_e;              // m x k
    const CMatrix mq = coupling_right_e * q;             // k x m
    const CMatrix mqn = coupling_right_e * qn;           // k x k

    const auto& ca = cluster_axes;
    const auto& ka = complement_axes;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t jj = 0; jj < ca.size(); ++jj) out(ca[i], ca[jj]) += q(i, jj);
        for (std::size_t jj = 0; jj < ka.size(); ++jj) out(ca[i], ka[jj]) += -delta * qn(i, jj);
    }
    for (std::size_t i = 0; i < ka.size(); ++i) {
        for (std::size_t jj = 0; jj < ca.size(); ++jj) out(ka[i], ca[jj]) += -delta * mq(i, jj);
        for (std::size_t jj = 0; jj < ka.size(); ++jj)
            out(ka[i], ka[jj]) += delta * delta * mqn(i, jj);
    }
    return out;
}

// ---------------------------------- gaps ------------------------------------

GapData gaps(const std::vector<LevelShiftData>& all, double c_constant, const NumericConfig& cfg) {
    if (all.empty()) fail(ErrorCode::EmptyResonanceSet, "no clusters provided");
    GapData out;
    out.c = c_constant;

    double delta_gap = std::numeric_limits<double>::infinity();
    for (const auto& lsd : all) delta_gap = std::min(delta_gap, lsd.gap);
    out.delta_gap = delta_gap;

    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            g = std::min(g, std::abs(all[i].e - all[j].e));
    out.g = g;

    double min_im = std::numeric_limits<double>::infinity();
    for (const auto& lsd : all) {
        const double scale = std::max(lsd.lambda_matrix.norm(), 1e-30);
        for (const Complex& ev : lsd.eigenvalues)
            if (ev.imag() > cfg.class_real_tol * scale) min_im = std::min(min_im, ev.imag());
    }
    out.gamma = std::isfinite(min_im) ? min_im : 0.0;

    std::vector<double> candidates;
    if (std::isfinite(delta_gap)) candidates.push_back(c_constant * delta_gap);
    if (std::isfinite(g)) candidates.push_back(g);
    if (std::isfinite(min_im)) candidates.push_back(min_im);
    if (candidates.empty())
        fail(ErrorCode::EmptyResonanceSet,
             "no finite gap candidates (single stationary cluster?)");
    out.alpha = 0.5 * *std::min_element(candidates.begin(), candidates.end());
    return out;
}

// --------------------------------- reports ----------------------------------

void export_resonance_csv(std::ostream& os, const std::vector<ResonanceData>& data) {
    os << "cluster_e,j,re_a,im_a,re_lambda,im_lambda,classification\n";
    for (const auto& rd : data) {
        for (std::size_t j = 0; j < rd.modes.size(); ++j) {
            const auto& mode = rd.modes[j];
            os << format_double(rd.e) << ',' << j << ',' << format_double(mode.a.real()) << ','
               << format_double(mode.a.imag()) << ',' << format_double(mode.lambda.real()) << ','
               << format_double(mode.lambda.imag()) << ','
               << to_string(rd.level_shift.classification) << '\n';
        }
    }
}

void export_levelshift_csv(std::ostream& os, const std::vector<LevelShiftData>& data) {
    os << "cluster_e,j,re_lambda,im_lambda,classification\n";
    for (const auto& lsd : data) {
        for (std::size_t j = 0; j < lsd.eigenvalues.size(); ++j) {
            os << format_double(lsd.e) << ',' << j << ','
               << format_double(lsd.eigenvalues[j].real()) << ','
               << format_double(lsd.eigenvalues[j].imag()) << ','
               << to_string(lsd.classification) << '\n';
        }
    }
}

// ------------------------------- standalone a_z -----------------------------

CMatrix a_z(const Model& model, int cluster_index, Complex z, double window_halfwidth,
            const NumericConfig& cfg) {
    if (cluster_index < 0 || cluster_index >= static_cast<int>(model.clusters.size()))
        fail(ErrorCode::InvalidArgument, "cluster index out of range");
    const double e = model.clusters[cluster_index].e;
    if (z.imag() > 0.0) fail(ErrorCode::InvalidArgument, "A_z defined for Im z <= 0");
    if (std::isfinite(window_halfwidth) && std::abs(z.real() - e) > window_halfwidth)
        fail(ErrorCode::OutsideWindow, "Re z - e = " + format_double(z.real() - e) +
                                           " outside the window half-width " +
                                           format_double(window_halfwidth));
    ClusterResolvent red(model, cluster_index, /*include_coupling=*/true, cfg);
    if (z.imag() < 0.0) return red.a(z);
    return red.a_boundary(z.real(), nullptr);
}

} // namespace reskit::resonance
