#include "reskit/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "reskit/quadrature.hpp"

namespace reskit::propagator {

namespace {

CVector select(const CVector& v, const std::vector<int>& rows) {
    CVector out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out(i) = v(rows[i]);
    return out;
}

} // namespace

// --------------------------- stationary projection --------------------------

CMatrix stationary_projection(const Model& model, const ResonanceData& rd,
                              const NumericConfig& cfg) {
    if (!rd.partially_stable)
        fail(ErrorCode::NotPartiallyStable,
             "stationary projection requested for an unstable cluster");
    (void)cfg;
    const Complex scale = 1.0 / (1.0 - model.delta * model.delta * rd.a0_prime_E);
    const int n = model.dim();
    CMatrix out = CMatrix::Zero(n, n);
    const CMatrix& q = rd.q0_E;
    const CMatrix qn = q * rd.coupling_left_E;          // m x k
    const CMatrix mq = rd.coupling_right_E * q;         // k x m
    const CMatrix mqn = rd.coupling_right_E * qn;       // k x k
    const auto& ca = rd.cluster_axes;
    const auto& ka = rd.complement_axes;
    const double d = model.delta;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t j = 0; j < ca.size(); ++j) out(ca[i], ca[j]) += q(i, j);
        for (std::size_t j = 0; j < ka.size(); ++j) out(ca[i], ka[j]) += -d * qn(i, j);
    }
    for (std::size_t i = 0; i < ka.size(); ++i) {
        for (std::size_t j = 0; j < ca.size(); ++j) out(ka[i], ca[j]) += -d * mq(i, j);
        for (std::size_t j = 0; j < ka.size(); ++j) out(ka[i], ka[j]) += d * d * mqn(i, j);
    }
    return scale * out;
}

Complex stationary_amplitude(const ResonanceData& rd, const CVector& phi, const CVector& psi) {
    if (!rd.partially_stable)
        fail(ErrorCode::NotPartiallyStable, "stationary amplitude of an unstable cluster");
    const CVector phic = select(phi, rd.cluster_axes);
    const CVector phik = select(phi, rd.complement_axes);
    const CVector psic = select(psi, rd.cluster_axes);
    const CVector psik = select(psi, rd.complement_axes);
    const CMatrix& q = rd.q0_E;
    const double d = rd.delta;
    const CVector npsi = rd.coupling_left_E * psik;
    const CVector mphi = rd.coupling_right_E.adjoint() * phik;
    Complex amp = (phic.adjoint() * q * psic)(0, 0);
    amp += d * (-(phic.adjoint() * q * npsi)(0, 0) - (mphi.adjoint() * q * psic)(0, 0) +
                d * (mphi.adjoint() * q * npsi)(0, 0));
    return amp / (1.0 - d * d * rd.a0_prime_E);
}

// --------------------------------- expand -----------------------------------

ExpansionResult expand(const Model& model, const CVector& phi, const CVector& psi,
                       const std::vector<double>& t_grid,
                       const std::vector<ResonanceData>& resonances, const NumericConfig& cfg) {
    ExpansionResult out;
    out.t_grid = t_grid;
    out.overlap = (phi.adjoint() * psi)(0, 0);

    const double d2 = model.delta * model.delta;
    for (const auto& rd : resonances) {
        const std::size_t j0 = rd.partially_stable ? 1 : 0;
        if (rd.partially_stable) {
            StationaryTerm st;
            st.cluster_index = rd.cluster_index;
            st.E = rd.E;
            st.amplitude = stationary_amplitude(rd, phi, psi);
            out.stationary.push_back(st);
        }
        for (std::size_t j = j0; j < rd.modes.size(); ++j) {
            DecayingTerm dt;
            dt.cluster_index = rd.cluster_index;
            dt.j = static_cast<int>(j);
            dt.pole = Complex(rd.e, 0.0) + d2 * rd.modes[j].a;
            dt.amplitude = rd.decay_amplitude(static_cast<int>(j), phi, psi);
            if (model.delta != 0.0 && dt.pole.imag() < -1e-10 * std::max(1.0, std::abs(dt.pole)))
                fail(ErrorCode::A4Violated, "decaying pole with negative imaginary part");
            out.decaying.push_back(dt);
        }
    }

    out.exact = linop::propagator_exact_grid(model.full(), t_grid, phi, psi, cfg);
    out.expansion.resize(t_grid.size());
    out.remainder.resize(t_grid.size());
    double max_value = 0.0;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        Complex v = 0.0;
        for (const auto& st : out.stationary) v += std::exp(kI * t * st.E) * st.amplitude;
        for (const auto& dt : out.decaying) v += std::exp(kI * t * dt.pole) * dt.amplitude;
        out.expansion[k] = v;
        out.remainder[k] = out.exact[k] - v;
        max_value = std::max(max_value, std::abs(v));
    }
    const double scale = phi.norm() * psi.norm();
    out.kappa = model.delta != 0.0 && scale > 0.0
                    ? std::max(0.0, (max_value / scale - 1.0) / std::abs(model.delta))
                    : 0.0;
    return out;
}

// ------------------------------ contour route --------------------------------

ContourConfig ContourConfig::from_gaps(const Model& model, const GapData& gaps,
                                       const NumericConfig& cfg) {
    ContourConfig c;
    c.w = cfg.contour_w_factor * gaps.alpha;
    c.tail_tol = cfg.contour_tail_tol;
    c.quad_tol = cfg.contour_tail_tol;
    for (const auto& cl : model.clusters) c.windows.push_back({cl.e, gaps.alpha});
    return c;
}

ContourResult contour_amplitude(const Model& model, const CVector& phi, const CVector& psi,
                                double t, const ContourConfig& config, const NumericConfig& cfg) {
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "contour route requires t > 0");
    if (!(config.w > 0.0) || config.w >= 1.0)
        fail(ErrorCode::InvalidArgument, "line offset must satisfy 0 < w < 1");

    // One-time spectral data; every integrand evaluation is then O(dim).
    Eigen::SelfAdjointEigenSolver<CMatrix> es(model.full());
    if (es.info() != Eigen::Success) fail(ErrorCode::DefectiveMatrix, "contour: eig failed");
    const RVector& lam = es.eigenvalues();
    const Eigen::Index n = lam.size();
    const CVector aphi = es.eigenvectors().adjoint() * phi;
    const CVector bpsi = es.eigenvectors().adjoint() * psi;

    // Spectral coefficients for psi and for psi_tilde = (L + i)^2 psi.
    CVector c_plain(n), c_tilde(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex ci = std::conj(aphi(i)) * bpsi(i);
        c_plain(i) = ci;
        const Complex lp = Complex(lam(i), 1.0);  // lambda + i
        c_tilde(i) = ci * lp * lp;
    }
    const Complex phi_psi = (phi.adjoint() * psi)(0, 0);
    const Complex phi_lpsi = [&] {
        Complex acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += c_plain(i) * Complex(lam(i), 1.0);
        return acc;  // <phi, (L + i) psi>
    }();

    const double w = config.w;
    auto resolvent_sums = [&](double x, const CVector& c, Complex& r1, Complex& r2) {
        const Complex z(x, -w);
        r1 = 0.0;
        r2 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex g = 1.0 / (Complex(lam(i), 0.0) - z);
            r1 += c(i) * g;
            r2 += c(i) * g * g;
        }
    };
    auto phase = [&](double x) { return std::exp(kI * t * Complex(x, -w)); };

    // d/dz <phi, R_z psi> directly (used on the compact windows).
    auto f_window = [&](double x) {
        Complex r1, r2;
        resolvent_sums(x, c_plain, r1, r2);
        return phase(x) * r2;
    };
    // Regularized far integrand f - poly with the (z + i)^{-2,-3} helpers.
    auto f_far = [&](double x) {
        Complex r1, r2;
        resolvent_sums(x, c_tilde, r1, r2);
        const Complex zp = Complex(x, -w) + kI;  // z + i
        const Complex zp2 = zp * zp;
        return phase(x) * (-2.0 * r1 / (zp2 * zp) + r2 / zp2);
    };
    // The polynomial piece integrates to zero over the full line (no poles
    // above the contour); its window portions are subtracted from the far sum.
    auto f_poly = [&](double x) {
        const Complex zp = Complex(x, -w) + kI;
        const Complex zp2 = zp * zp;
        return phase(x) * (phi_psi / zp2 + 2.0 * phi_lpsi / (zp2 * zp));
    };

    // Far cutoff from the |z|^{-4} decay of the regularized integrand.
    const double rho = std::max(std::abs(lam(0)), std::abs(lam(n - 1)));
    const double tilde_scale = c_tilde.cwiseAbs().sum() + std::abs(phi_psi) + std::abs(phi_lpsi);
    const double ewt = std::exp(w * t);
    double X = std::max(2.0 * rho + 1.0,
                        std::cbrt(tilde_scale * ewt / std::max(config.tail_tol, 1e-14)));
    X = std::max(X, config.truncation_min);

    // Sorted, disjoint windows clipped to [-X, X].
    std::vector<ContourWindow> windows = config.windows;
    std::sort(windows.begin(), windows.end(),
              [](const ContourWindow& a, const ContourWindow& b) { return a.center < b.center; });
    for (std::size_t i = 0; i + 1 < windows.size(); ++i)
        if (windows[i].center + windows[i].halfwidth >
            windows[i + 1].center - windows[i + 1].halfwidth)
            fail(ErrorCode::InvalidArgument, "contour windows overlap");

    const double max_panel = M_PI / std::max(t, 1.0);
    const Complex norm = 1.0 / (kI * t * 2.0 * M_PI * kI);
    const double region_tol = std::max(config.quad_tol, 1e-13) * 2.0 * M_PI * t / 4.0;

    ContourResult out;
    out.truncation = X;
    for (const auto& win : windows) {
        auto piece = quad::integrate(f_window, win.center - win.halfwidth,
                                     win.center + win.halfwidth, region_tol,
                                     std::min(max_panel, win.halfwidth / 2.0), cfg.quad_max_depth);
        out.window_contributions.push_back(norm * piece.value);
        out.quad_error += piece.error_estimate;
        out.evaluations += piece.evaluations;
    }

    // Far region: complement of the windows inside [-X, X] for the
    // regularized integrand, minus the windows' polynomial portions.
    Complex far = 0.0;
    double edge = -X;
    for (const auto& win : windows) {
        const double lo = win.center - win.halfwidth;
        const double hi = win.center + win.halfwidth;
        if (lo > edge) {
            auto piece = quad::integrate(f_far, edge, lo, region_tol, max_panel, cfg.quad_max_depth);
            far += piece.value;
            out.quad_error += piece.error_estimate;
            out.evaluations += piece.evaluations;
        }
        auto poly_piece = quad::integrate(f_poly, lo, hi, region_tol,
                                          std::min(max_panel, win.halfwidth / 2.0),
                                          cfg.quad_max_depth);
        far -= poly_piece.value;
        out.quad_error += poly_piece.error_estimate;
        out.evaluations += poly_piece.evaluations;
        edge = hi;
    }
    if (edge < X) {
        auto piece = quad::integrate(f_far, edge, X, region_tol, max_panel, cfg.quad_max_depth);
        far += piece.value;
        out.quad_error += piece.error_estimate;
        out.evaluations += piece.evaluations;
    }
    out.far_contribution = norm * far;

    out.total = out.far_contribution;
    for (const Complex& c : out.window_contributions) out.total += c;
    out.quad_error = out.quad_error / (2.0 * M_PI * t);
    if (out.quad_error > 10.0 * std::max(config.quad_tol, 1e-12))
        fail(ErrorCode::QuadratureNotConverged,
             "contour quadrature error estimate " + format_double(out.quad_error));
    return out;
}

// ------------------------------ remainder fits -------------------------------

LogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorCode::InvalidArgument, "loglog_fit: need matched samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(x.size());
    LogFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

LogFit exp_rate_fit(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2)
        fail(ErrorCode::InvalidArgument, "exp_rate_fit: need matched samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double ly = std::log(y[i]);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
    }
    const double m = static_cast<double>(t.size());
    LogFit fit;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.slope = slope;  // = -rate
    fit.intercept = (sy - slope * sx) / m;
    return fit;
}

RemainderFit remainder_fit(const ExpansionResult& result, double t_min, double t_max) {
    std::vector<double> ts, rs;
    double scale = 0.0;
    for (const Complex& r : result.remainder) scale = std::max(scale, std::abs(r));
    RemainderFit fit;
    if (scale < 1e-13 * std::max(1.0, std::abs(result.overlap))) {
        fit.skipped = true;
        return fit;
    }
    for (std::size_t k = 0; k < result.t_grid.size(); ++k) {
        const double t = result.t_grid[k];
        const double r = std::abs(result.remainder[k]);
        if (t >= t_min && t <= t_max && t > 0.0 && r > 1e-14 * scale) {
            ts.push_back(t);
            rs.push_back(r);
        }
    }
    if (ts.size() < 20)
        fail(ErrorCode::WindowTooSmall, "remainder fit needs >= 20 samples in the window, got " +
                                            std::to_string(ts.size()));
    LogFit lf = loglog_fit(ts, rs);
    fit.amplitude = std::exp(lf.intercept);
    fit.exponent = lf.slope;
    fit.samples_used = static_cast<int>(ts.size());
    return fit;
}

// ---------------------------- regularity diagnostics -------------------------

std::array<double, 4> lap_diagnostics(const Model& model, int cluster_index, const CVector& phi,
                                      const CVector& psi, double window_halfwidth,
                                      double probe_depth, int n_samples, const NumericConfig& cfg) {
    resonance::ClusterResolvent red(model, cluster_index, /*include_coupling=*/true, cfg);
    const auto& ka = red.complement_axes();
    const CVector phik = select(phi, ka);
    const CVector psik = select(psi, ka);
    const double e = red.cluster_energy();
    std::array<double, 4> sup{0.0, 0.0, 0.0, 0.0};
    double factorial = 1.0;
    for (int k = 0; k < 4; ++k) {
        factorial *= std::max(1, k);
        for (int s = 0; s < n_samples; ++s) {
            const double x =
                e - window_halfwidth + 2.0 * window_halfwidth * s / std::max(1, n_samples - 1);
            const Complex z(x, -probe_depth);
            CMatrix rhs = psik;
            for (int rep = 0; rep <= k; ++rep) rhs = red.evaluator().solve(z, rhs);
            const Complex val = (phik.adjoint() * rhs)(0, 0);
            sup[k] = std::max(sup[k], factorial * std::abs(val));
        }
    }
    return sup;
}

} // namespace reskit::propagator
