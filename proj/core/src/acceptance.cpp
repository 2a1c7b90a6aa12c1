#include "reskit/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reskit/bath.hpp"
#include "reskit/feshbach.hpp"
#include "reskit/linop.hpp"
#include "reskit/propagator.hpp"
#include "reskit/quadrature.hpp"
#include "reskit/resonance.hpp"
#include "reskit/spinboson.hpp"

namespace reskit::acceptance {

namespace {

using linop::OrthProjection;

std::string fmt(double x) { return format_double(x); }

CMatrix random_complex(std::mt19937_64& rng, int n, int m) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CMatrix out(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) out(i, j) = Complex(dist(rng), dist(rng));
    return out;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

// ----------------------------- criterion 1 ----------------------------------
// Feshbach identity suite on 100 seeded random 8x8 matrices with rank-2
// projections: isospectrality, block reconstruction, nesting, lifting.

CriterionResult criterion1(double residual_bias) {
    CriterionResult r;
    r.id = 1;
    r.name = "feshbach-identity-suite";
    std::mt19937_64 rng(20240811);
    NumericConfig cfg;

    double worst_det = 0.0, worst_block = 0.0, worst_iter = 0.0, worst_lift = 0.0;
    int det_checks = 0, lift_checks = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const CMatrix H = random_complex(rng, 8, 8);
        const OrthProjection Q = OrthProjection::from_basis(random_complex(rng, 8, 2));
        const CMatrix comp = Q.complement_basis().adjoint() * H * Q.complement_basis();
        const auto comp_spec = linop::eig(comp, false, cfg).eigenvalues;
        const auto full_spec = linop::eig(H, false, cfg).eigenvalues;
        auto comp_distance = [&](Complex z) {
            double d = std::numeric_limits<double>::infinity();
            for (const Complex& ev : comp_spec) d = std::min(d, std::abs(ev - z));
            return d;
        };

        // Isospectrality at the true eigenvalues.
        for (const Complex& ev : full_spec) {
            if (comp_distance(ev) <= 0.1) continue;
            auto fr = feshbach::feshbach_map(H, Q, ev, cfg);
            double scale = 1.0;
            const Complex det = fr.scaled_determinant(&scale);
            worst_det = std::max(worst_det, (std::abs(det) + residual_bias) / scale);
            ++det_checks;
        }

        // Block reconstruction at an off-spectrum shift.
        const Complex z(0.3, -0.4);
        if (comp_distance(z) > 0.1) {
            auto blocks = feshbach::block_resolvent(H, Q, z, cfg);
            const CMatrix direct = linop::resolvent(H, z, cfg);
            worst_block =
                std::max(worst_block, (blocks.full - direct).norm() / direct.norm());
        }

        // Iterated map against the direct rank-1 reduction.
        const CMatrix inner = Q.basis() * random_complex(rng, 2, 1);
        const OrthProjection Qp = OrthProjection::from_basis(inner);
        if (comp_distance(z) > 0.1) {
            auto iter = feshbach::iterate_feshbach(H, Q, Qp, z, cfg);
            auto direct = feshbach::feshbach_map(H, Qp, z, cfg);
            worst_iter = std::max(worst_iter, (iter.map - direct.map).norm() /
                                                  std::max(1.0, direct.map.norm()));
        }

        // Eigenvector lift at the best-separated eigenvalue.
        Complex best_ev = full_spec[0];
        double best_d = -1.0;
        for (const Complex& ev : full_spec) {
            const double d = comp_distance(ev);
            if (d > best_d) {
                best_d = d;
                best_ev = ev;
            }
        }
        if (best_d > 0.1) {
            auto fr = feshbach::feshbach_map(H, Q, best_ev, cfg);
            Eigen::JacobiSVD<CMatrix> svd(fr.map, Eigen::ComputeFullV);
            const CVector phi = svd.matrixV().col(fr.rank() - 1);
            const CVector psi = feshbach::lift_eigenvector(fr, phi, cfg);
            const double resid = (H * psi - best_ev * psi).norm() / (H.norm() * psi.norm());
            worst_lift = std::max(worst_lift, resid);
            ++lift_checks;
        }
    }

    std::ostringstream os;
    os << "det/scale " << fmt(worst_det) << " (limit 1e-8, " << det_checks << " checks)"
       << ", block " << fmt(worst_block) << " (1e-10)"
       << ", nested " << fmt(worst_iter) << " (1e-10)"
       << ", lift " << fmt(worst_lift) << " (1e-8, " << lift_checks << " checks)";
    r.pass = worst_det < 1e-8 && worst_block < 1e-10 && worst_iter < 1e-10 && worst_lift < 1e-8 &&
             det_checks > 300 && lift_checks > 80;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 2 ----------------------------------
// Contour representation vs the spectral oracle on three regression models,
// five times each, and w-independence across {0.05, 0.1} alpha.

struct PipelineData {
    Model model;
    std::vector<resonance::LevelShiftData> shifts;
    resonance::GapData gap;
    std::vector<resonance::ResonanceData> resdata;
};

PipelineData run_pipeline(Model model, const NumericConfig& cfg) {
    PipelineData out;
    out.model = std::move(model);
    for (int c = 0; c < static_cast<int>(out.model.clusters.size()); ++c)
        out.shifts.push_back(resonance::level_shift(out.model, c, cfg));
    out.gap = resonance::gaps(out.shifts, cfg.c_constant, cfg);
    for (int c = 0; c < static_cast<int>(out.model.clusters.size()); ++c)
        out.resdata.push_back(
            resonance::resonance_data(out.model, c, out.shifts[c], out.gap.alpha, cfg));
    return out;
}

CVector bound_state_vector(const Model& m, int cluster, int member) {
    CVector v = CVector::Zero(m.dim());
    v(m.clusters[cluster].indices[member]) = 1.0;
    return v;
}

CriterionResult criterion2() {
    CriterionResult r;
    r.id = 2;
    r.name = "contour-representation";
    NumericConfig cfg;

    std::vector<Model> models;
    models.push_back(bath::build_friedrichs(
        {{0.0, {[](double) { return 0.8; }}}}, bath::uniform_grid(-1.0, 1.0, 160), 0.1));
    models.push_back(bath::build_friedrichs(
        {{-0.4, {[](double) { return 0.5; }}}, {0.4, {[](double) { return 0.7; }}}},
        bath::uniform_grid(-1.2, 1.2, 180), 0.05));
    models.push_back(bath::build_friedrichs(
        {{0.0,
          {[](double w) { return std::exp(-w * w / 0.5); },
           [](double w) { return std::exp(-(w - 0.3) * (w - 0.3) / 0.32); }}}},
        bath::uniform_grid(-1.0, 1.0, 160), 0.08));

    const std::vector<double> times = {0.5, 1.0, 2.0, 5.0, 10.0};
    double worst_exact = 0.0, worst_windep = 0.0;
    for (auto& model : models) {
        std::vector<resonance::LevelShiftData> shifts;
        for (int c = 0; c < static_cast<int>(model.clusters.size()); ++c)
            shifts.push_back(resonance::level_shift(model, c, cfg));
        auto gap = resonance::gaps(shifts, cfg.c_constant, cfg);
        auto config_lo = propagator::ContourConfig::from_gaps(model, gap, cfg);
        auto config_hi = config_lo;
        config_lo.w = 0.05 * gap.alpha;
        config_hi.w = 0.10 * gap.alpha;
        config_lo.quad_tol = config_hi.quad_tol = 2e-8;
        config_lo.tail_tol = config_hi.tail_tol = 2e-8;

        int nbound = 0;
        for (const auto& cl : model.clusters) nbound += cl.multiplicity;
        CVector phi = CVector::Zero(model.dim());
        phi(model.clusters[0].indices[0]) = 1.0;
        // A localized continuum component keeps the test vectors in the
        // regular class rather than purely bound.
        for (int k = 0; k < model.dim() - nbound; ++k)
            phi(k) += 0.05 * std::exp(-20.0 * model.L0(k, k).real() * model.L0(k, k).real());
        phi.normalize();
        const CVector psi = phi;

        const auto exact = linop::propagator_exact_grid(model.full(), times, phi, psi, cfg);
        for (std::size_t i = 0; i < times.size(); ++i) {
            const auto lo = propagator::contour_amplitude(model, phi, psi, times[i], config_lo, cfg);
            const auto hi = propagator::contour_amplitude(model, phi, psi, times[i], config_hi, cfg);
            worst_exact = std::max(worst_exact, std::abs(hi.total - exact[i]));
            worst_exact = std::max(worst_exact, std::abs(lo.total - exact[i]));
            worst_windep = std::max(worst_windep, std::abs(hi.total - lo.total));
        }
    }
    std::ostringstream os;
    os << "max |contour - exact| " << fmt(worst_exact) << " (limit 1e-6), w-independence "
       << fmt(worst_windep) << " (1e-6)";
    r.pass = worst_exact < 1e-6 && worst_windep < 1e-6;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 3 ----------------------------------
// Resonance-expansion accuracy on the N = 2000 single-unstable-cluster
// surrogate at delta = 0.02.

CriterionResult criterion3() {
    CriterionResult r;
    r.id = 3;
    r.name = "resonance-expansion-accuracy";
    NumericConfig cfg;

    Model model = bath::build_friedrichs({{0.0, {[](double) { return 1.0; }}}},
                                         bath::uniform_grid(-1.0, 1.0, 2000), 0.02);
    auto data = run_pipeline(std::move(model), cfg);
    const auto& rd = data.resdata[0];
    const double gamma = rd.modes[0].a.imag();
    const double d2 = data.model.delta * data.model.delta;
    const double t0 = 10.0;
    const double t1 = 0.5 / (gamma * d2);

    const CVector phi = bound_state_vector(data.model, 0, 0);
    auto t_grid = linspace(t0, t1, 96);
    auto exp_result = propagator::expand(data.model, phi, phi, t_grid, data.resdata, cfg);

    double worst_err = 0.0;
    std::vector<double> surv;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        worst_err = std::max(worst_err, std::abs(exp_result.remainder[i]));
        surv.push_back(std::abs(exp_result.exact[i]));
    }
    const double initial = std::abs(exp_result.overlap);

    auto rate_fit = propagator::exp_rate_fit(t_grid, surv);
    const double fitted_rate = -rate_fit.slope;
    const double predicted_rate = d2 * gamma;
    const double rate_rel = std::abs(fitted_rate - predicted_rate) / predicted_rate;

    auto rem_fit = propagator::remainder_fit(exp_result, t0, t1);

    std::ostringstream os;
    os << "max|exact-expansion| " << fmt(worst_err) << " (limit " << fmt(0.005 * initial)
       << "), rate " << fmt(fitted_rate) << " vs " << fmt(predicted_rate) << " (rel "
       << fmt(rate_rel) << ", limit 0.05), remainder exponent " << fmt(rem_fit.exponent)
       << " (limit -0.8)";
    r.pass = worst_err <= 0.005 * initial && rate_rel <= 0.05 && rem_fit.exponent <= -0.8;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 4 ----------------------------------
// Partial stability: m = 2 cluster with one real level-shift eigenvalue;
// stationary projection vs the spectral oracle, decay of the orthogonal
// direction at delta^2 Im lambda_{0,1}.

CriterionResult criterion4() {
    CriterionResult r;
    r.id = 4;
    r.name = "partial-stability-structure";
    NumericConfig cfg;

    // Member 0 couples far from e = 0 (real shift only), member 1 close to it
    // (golden-rule decay); gaussian profiles keep the boundary values smooth.
    auto c0 = [](double w) { return std::exp(-std::pow((w - 0.8) / 0.30, 2)); };
    auto c1 = [](double w) { return std::exp(-std::pow((w + 0.45) / 0.45, 2)); };
    Model model = bath::build_friedrichs({{0.0, {c0, c1}}}, bath::uniform_grid(-2.0, 2.0, 3000),
                                         0.06);
    auto data = run_pipeline(std::move(model), cfg);
    const auto& rd = data.resdata[0];
    if (!rd.partially_stable) {
        r.pass = false;
        r.details = "cluster not classified partially stable";
        return r;
    }

    // Feshbach-side stationary projection vs the spectral projection of L.
    const CMatrix pi_fesh = propagator::stationary_projection(data.model, rd, cfg);
    const CMatrix L = data.model.full();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(L);
    int best = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i) - rd.E) < std::abs(es.eigenvalues()(best) - rd.E))
            best = i;
    const CVector v = es.eigenvectors().col(best);
    const CMatrix pi_eig = v * v.adjoint();
    const double proj_err = (pi_fesh - pi_eig).norm();

    // Decay of the orthogonal (unstable) direction.
    const double im1 = data.shifts[0].eigenvalues[1].imag();
    const double d2 = data.model.delta * data.model.delta;
    const double rate_pred = d2 * im1;
    const CVector psi1 = bound_state_vector(data.model, 0, 1);
    auto t_grid = linspace(20.0, std::min(2.0 / rate_pred, 1500.0), 64);
    auto curve = linop::propagator_exact_grid(L, t_grid, psi1, psi1, cfg);
    std::vector<double> mag;
    for (const auto& cvl : curve) mag.push_back(std::abs(cvl));
    auto fit = propagator::exp_rate_fit(t_grid, mag);
    const double rate_rel = std::abs(-fit.slope - rate_pred) / rate_pred;

    std::ostringstream os;
    os << "||Pi_feshbach - Pi_eig|| " << fmt(proj_err) << " (limit 1e-6), decay rate "
       << fmt(-fit.slope) << " vs " << fmt(rate_pred) << " (rel " << fmt(rate_rel)
       << ", limit 0.05)";
    r.pass = proj_err < 1e-6 && rate_rel < 0.05;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 5 ----------------------------------
// First-order convergence of the reduced spectral data to the level-shift
// data over a delta grid.

CriterionResult criterion5() {
    CriterionResult r;
    r.id = 5;
    r.name = "first-order-convergence-law";
    NumericConfig cfg;

    auto c0 = [](double w) { return std::exp(-w * w / 0.5); };
    auto c1 = [](double w) { return 0.9 * std::exp(-std::pow((w - 0.3), 2) / 0.4); };
    const std::vector<double> deltas = {0.01, 0.02, 0.04, 0.08};
    std::vector<double> dev_a, dev_q;
    for (double d : deltas) {
        Model model =
            bath::build_friedrichs({{0.0, {c0, c1}}}, bath::uniform_grid(-1.0, 1.0, 1200), d);
        auto lsd = resonance::level_shift(model, 0, cfg);
        auto rd = resonance::resonance_data(model, 0, lsd, 0.25 * lsd.gap, cfg);
        double da = 0.0, dq = 0.0;
        for (std::size_t j = 0; j < rd.modes.size(); ++j) {
            da = std::max(da, std::abs(rd.modes[j].a - lsd.eigenvalues[j]));
            dq = std::max(dq, (rd.modes[j].riesz - lsd.projections[j]).norm());
        }
        dev_a.push_back(da);
        dev_q.push_back(dq);
    }
    auto fit_a = propagator::loglog_fit(deltas, dev_a);
    auto fit_q = propagator::loglog_fit(deltas, dev_q);
    std::ostringstream os;
    os << "exponent(a) " << fmt(fit_a.slope) << ", exponent(Q) " << fmt(fit_q.slope)
       << " (limits >= 0.9)";
    r.pass = fit_a.slope >= 0.9 && fit_q.slope >= 0.9;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 6 ----------------------------------
// Spin-boson analytics: closed forms, the relaxation integral against a
// double-exponential oracle, the resonance table structure, and the thermal
// kernel of the decaying e = 0 projection.

// Test-side double-exponential (exp-sinh) quadrature over (0, infinity).
double de_quadrature(const std::function<double(double)>& f, double tol) {
    double prev = 0.0;
    for (int level = 3; level <= 9; ++level) {
        const double h = 1.0 / (1 << level);
        double acc = 0.0;
        const int kmax = static_cast<int>(6.0 / h);
        for (int k = -kmax; k <= kmax; ++k) {
            const double u = k * h;
            const double t = std::exp(0.5 * M_PI * std::sinh(u));
            const double w = 0.5 * M_PI * std::cosh(u) * t;
            if (!std::isfinite(t) || !std::isfinite(w) || t > 1e12) continue;
            acc += f(t) * w;
        }
        acc *= h;
        if (level > 3 && std::abs(acc - prev) < tol) return acc;
        prev = acc;
    }
    return prev;
}

CriterionResult criterion6() {
    CriterionResult r;
    r.id = 6;
    r.name = "spinboson-analytics";
    NumericConfig cfg;

    // Closed forms for the ohmic family.
    const double A = 0.8, wc = 2.0;
    auto J1 = bath::SpectralDensity::ohmic(A, 1.0, wc);
    double worst_q1 = 0.0, worst_q2 = 0.0;
    for (double t : {0.3, 1.0, 5.0, 20.0}) {
        worst_q1 = std::max(worst_q1,
                            std::abs(spinboson::q1(J1, t, nullptr, cfg) - A * std::atan(wc * t)));
        const double zero_t = spinboson::q2(J1, std::numeric_limits<double>::infinity(), t,
                                            nullptr, cfg);
        worst_q2 = std::max(worst_q2,
                            std::abs(zero_t - 0.5 * A * std::log(1.0 + wc * wc * t * t)));
    }

    // Relaxation integral vs the double-exponential oracle.
    spinboson::SpinBosonParams p;
    p.delta = 0.1;
    p.eps = 0.5;
    p.q0 = 1.0;
    p.beta = 2.0;
    p.J = bath::SpectralDensity::ohmic(1.0, 1.0, 1.0);
    auto relax = spinboson::relaxation_data(p, 101, cfg);
    const double c = p.q0 * p.q0 / M_PI;
    auto kernel = [&](double t) {
        return std::cos(p.eps * t) * std::cos(c * spinboson::q1(p.J, t, nullptr, cfg)) *
               std::exp(-c * spinboson::q2(p.J, p.beta, t, nullptr, cfg));
    };
    const double tau_oracle = de_quadrature(kernel, 1e-9);
    const double tau_err = std::abs(relax.tau_inv - tau_oracle);

    // Resonance table structure.
    bool table_ok = relax.resonances.size() == 4;
    if (table_ok) {
        table_ok = relax.resonances[0].lambda == Complex(0.0, 0.0) &&
                   relax.resonances[1].lambda == Complex(0.0, relax.tau_inv) &&
                   relax.resonances[2].lambda == Complex(relax.x, 0.5 * relax.tau_inv) &&
                   relax.resonances[3].lambda == Complex(-relax.x, 0.5 * relax.tau_inv);
    }

    // The decaying e = 0 projection annihilates the thermal vector: both the
    // coefficient matrix and the dressed vector-level contraction.
    spinboson::SpinBosonParams pr = p;
    pr.J = bath::SpectralDensity::ohmic(0.5, 3.0, 1.0);  // infrared-regular for overlaps
    spinboson::OverlapAlgebra alg(pr.J, pr.beta, pr.q0, cfg);
    auto proj = spinboson::projections_leading(pr, alg);
    auto sys = spinboson::SystemSpace::make(pr.beta, pr.eps);
    const double kernel_matrix = (proj.pi0_system_coeff * sys.gibbs).norm();
    spinboson::ProductVector gibbs_dressed;
    gibbs_dressed.terms.push_back({0, spinboson::coherent_label(alg, "X0*"), sys.gibbs(0)});
    gibbs_dressed.terms.push_back({3, spinboson::coherent_label(alg, "X0"), sys.gibbs(1)});
    const Complex vec_level =
        spinboson::project_amplitude(alg, gibbs_dressed, proj.pi0, gibbs_dressed);
    const double kernel_vec = std::abs(vec_level);

    std::ostringstream os;
    os << "Q1 closed form " << fmt(worst_q1) << ", Q2 zero-T " << fmt(worst_q2)
       << " (1e-8), tau vs oracle " << fmt(tau_err) << " (1e-6), table "
       << (table_ok ? "exact" : "BROKEN") << ", thermal kernel " << fmt(kernel_matrix) << "/"
       << fmt(kernel_vec) << " (1e-10)";
    r.pass = worst_q1 < 1e-8 && worst_q2 < 1e-8 && tau_err < 1e-6 && table_ok &&
             kernel_matrix < 1e-10 && kernel_vec < 1e-10;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 7 ----------------------------------
// Return-to-equilibrium envelope on the weak-coupling doubled surrogate:
// deviation-from-stationary bounded by C(e^{-d^2 t / 2 tau_s} + 1/t) with C
// stable across delta.

CriterionResult criterion7() {
    CriterionResult r;
    r.id = 7;
    r.name = "return-to-equilibrium-envelope";
    NumericConfig cfg;
    // Surrogate resolution: boundary limits only need to pin the level-shift
    // data to a fraction of its own scale here, so the contract tolerances
    // are relaxed in proportion to the coarser grid.
    cfg.extrap_tol = 5e-5;
    cfg.extrap_spacing_factor = 2.5;
    cfg.fixed_point_tol = 1e-5;
    cfg.class_real_tol = 2e-3;

    auto J = bath::SpectralDensity::ohmic(10.0, 1.0, 0.5);
    const double beta = 2.0;
    auto grid = bath::discretize(J, beta, 600, 4.0);

    double c_fit[2] = {0.0, 0.0};
    double tau_s = 0.0;
    const double deltas[2] = {0.02, 0.04};
    for (int which = 0; which < 2; ++which) {
        bath::LiouvilleSurrogateParams params;
        params.eps = 1.0;
        params.delta = deltas[which];
        params.g_scale = 3.0;
        Model model = bath::build_spinboson_liouvillean_surrogate(params, grid, beta);
        auto data = run_pipeline(std::move(model), cfg);
        tau_s = 1.0 / data.shifts[0].eigenvalues[1].imag();

        CVector phi = CVector::Zero(data.model.dim());
        phi(data.model.clusters[0].indices[0]) = 0.6;  // pp (x) vac
        phi(data.model.clusters[0].indices[1]) = 0.5;  // mm (x) vac
        phi(data.model.clusters[1].indices[0]) = 0.624;  // pm (x) vac
        phi.normalize();

        auto t_grid = linspace(5.0, 200.0, 60);
        auto res = propagator::expand(data.model, phi, phi, t_grid, data.resdata, cfg);
        Complex stat = 0.0;
        for (const auto& st : res.stationary) stat += st.amplitude;
        const double d2 = deltas[which] * deltas[which];
        double cmax = 0.0;
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double t = t_grid[i];
            const double env = std::exp(-d2 * t / (2.0 * tau_s)) + 1.0 / t;
            cmax = std::max(cmax, std::abs(res.exact[i] - stat) / env);
        }
        c_fit[which] = cmax;
    }
    const double spread = std::abs(c_fit[0] - c_fit[1]) / std::max(c_fit[0], c_fit[1]);
    std::ostringstream os;
    os << "C(0.02) " << fmt(c_fit[0]) << ", C(0.04) " << fmt(c_fit[1]) << ", relative spread "
       << fmt(spread) << " (limit 0.10), tau_s " << fmt(tau_s);
    r.pass = spread <= 0.10 && c_fit[0] > 0.0 && c_fit[1] > 0.0;
    r.details = os.str();
    return r;
}

// ----------------------------- criterion 8 ----------------------------------
// Coherent-overlap Gram matrix PSD and CCR reduction vs the normal-ordered
// Gaussian moment route.

CriterionResult criterion8() {
    CriterionResult r;
    r.id = 8;
    r.name = "coherent-overlap-gram";
    NumericConfig cfg;
    auto J = bath::SpectralDensity::ohmic(0.5, 3.0, 1.0);
    spinboson::OverlapAlgebra alg(J, 2.0, 1.2, cfg);

    const auto labels = spinboson::coherent_label_set();
    const CMatrix gram = spinboson::gram_matrix(alg, labels);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    const double min_eig = es.eigenvalues().minCoeff();

    // CCR route vs Gaussian moments for every pair of labels.
    const Eigen::Vector2cd a(1.0, 0.0), b(0.0, 1.0);
    struct Factors {
        std::vector<Eigen::Vector2cd> list;
    };
    auto factors_for = [&](const std::string& label) {
        Factors f;
        if (label == "Omega") return f;
        if (label == "X0") f.list = {a, b};
        if (label == "X0*") f.list = {Eigen::Vector2cd(-a), Eigen::Vector2cd(-b)};
        if (label == "X+") f.list = {Eigen::Vector2cd(-a), b};
        if (label == "X-") f.list = {a, Eigen::Vector2cd(-b)};
        return f;
    };
    double worst = 0.0;
    for (const auto& left : labels) {
        for (const auto& right : labels) {
            const Complex ccr = spinboson::weyl_overlap(alg, spinboson::coherent_label(alg, left),
                                                        spinboson::coherent_label(alg, right));
            // <prod_i W(F_i) Omega, prod_j W(G_j) Omega>
            //   = <Omega, W(-F_p)...W(-F_1) W(G_1)...W(G_q) Omega>.
            auto fl = factors_for(left).list;
            auto gl = factors_for(right).list;
            std::vector<Eigen::Vector2cd> all;
            for (auto it = fl.rbegin(); it != fl.rend(); ++it) all.push_back(-*it);
            for (const auto& g : gl) all.push_back(g);
            const Complex oracle = spinboson::gaussian_moment(alg, all);
            worst = std::max(worst, std::abs(ccr - oracle));
        }
    }
    std::ostringstream os;
    os << "min Gram eigenvalue " << fmt(min_eig) << " (limit -1e-9), CCR vs Gaussian "
       << fmt(worst) << " (1e-9)";
    r.pass = min_eig >= -1e-9 && worst < 1e-9;
    r.details = os.str();
    return r;
}

} // namespace

std::vector<CriterionResult> run(const Options& options) {
    std::vector<CriterionResult> out;
    auto want = [&](int id) {
        return options.only.empty() ||
               std::find(options.only.begin(), options.only.end(), id) != options.only.end();
    };
    auto timed = [&](auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res = fn();
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(std::move(res));
    };
    if (want(1)) timed([&] { return criterion1(options.residual_bias); });
    if (want(2)) timed([&] { return criterion2(); });
    if (want(3)) timed([&] { return criterion3(); });
    if (want(4)) timed([&] { return criterion4(); });
    if (want(5)) timed([&] { return criterion5(); });
    if (want(6)) timed([&] { return criterion6(); });
    if (want(7)) timed([&] { return criterion7(); });
    if (want(8)) timed([&] { return criterion8(); });
    return out;
}

nlohmann::json results_to_json(const std::vector<CriterionResult>& results) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : results)
        j.push_back({{"id", r.id},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"details", r.details},
                     {"seconds", r.seconds}});
    return j;
}

} // namespace reskit::acceptance
