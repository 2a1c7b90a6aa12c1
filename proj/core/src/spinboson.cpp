#include "reskit/spinboson.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "reskit/quadrature.hpp"

namespace reskit::spinboson {

namespace {

double omega_horizon(const bath::SpectralDensity& J) {
    // Envelope cutoff for the frequency integrals.
    if (J.family == bath::SpectralDensity::Family::OhmicExp)
        return J.cutoff * (45.0 + 5.0 * std::max(0.0, J.exponent));
    return J.table_omega.empty() ? 1.0 : J.table_omega.back();
}

double coth_half(double beta, double w) {
    if (std::isinf(beta)) return 1.0;
    return 1.0 / std::tanh(0.5 * beta * w);
}

} // namespace

// ------------------------------- bath kernels -------------------------------

double q1(const bath::SpectralDensity& J, double t, double* error_estimate,
          const NumericConfig& cfg) {
    if (t < 0.0) fail(ErrorCode::InvalidArgument, "q1: t >= 0 required");
    if (J.family == bath::SpectralDensity::Family::OhmicExp && J.exponent <= 0.0)
        fail(ErrorCode::NonIntegrableDensity, "q1 requires J(w) = o(1) near 0 (exponent > 0)");
    if (t == 0.0) {
        if (error_estimate != nullptr) *error_estimate = 0.0;
        return 0.0;
    }
    const double wmax = omega_horizon(J);
    const double panel = M_PI / std::max(t, 1.0 / wmax);
    auto f = [&](double w) { return Complex(J(w) / (w * w) * std::sin(w * t), 0.0); };
    auto res = quad::integrate(f, 0.0, wmax, 1e-11, panel, cfg.quad_max_depth);
    if (error_estimate != nullptr) *error_estimate = res.error_estimate;
    if (res.error_estimate > 1e-9)
        fail(ErrorCode::QuadratureNotConverged, "q1 error estimate " +
                                                    format_double(res.error_estimate));
    return res.value.real();
}

double q2(const bath::SpectralDensity& J, double beta, double t, double* error_estimate,
          const NumericConfig& cfg) {
    if (t < 0.0) fail(ErrorCode::InvalidArgument, "q2: t >= 0 required");
    if (J.family == bath::SpectralDensity::Family::OhmicExp && J.exponent < 1.0)
        fail(ErrorCode::NonIntegrableDensity,
             "q2 requires at least linear low-frequency behavior of J (thermal factor)");
    if (t == 0.0) {
        if (error_estimate != nullptr) *error_estimate = 0.0;
        return 0.0;
    }
    const double wmax = omega_horizon(J);
    const double panel = M_PI / std::max(t, 1.0 / wmax);
    auto f = [&](double w) {
        const double osc = 1.0 - std::cos(w * t);
        return Complex(J(w) / (w * w) * osc * coth_half(beta, w), 0.0);
    };
    auto res = quad::integrate(f, 0.0, wmax, 1e-11, panel, cfg.quad_max_depth);
    if (error_estimate != nullptr) *error_estimate = res.error_estimate;
    if (res.error_estimate > 1e-9)
        fail(ErrorCode::QuadratureNotConverged, "q2 error estimate " +
                                                    format_double(res.error_estimate));
    return res.value.real();
}

// ------------------------------ relaxation time ------------------------------

namespace {

// Shared machinery for the cosine (tau) and sine (x) transforms of the
// damped kernel cos[(q0^2/pi) Q1] e^{-(q0^2/pi) Q2}.
double damped_transform(const SpinBosonParams& p, bool cosine, HorizonInfo* info,
                        const NumericConfig& cfg) {
    const double c = p.q0 * p.q0 / M_PI;
    auto envelope = [&](double t) { return std::exp(-c * q2(p.J, p.beta, t, nullptr, cfg)); };
    auto f = [&](double t) -> Complex {
        const double phase = p.eps * t;
        const double trig = cosine ? std::cos(phase) : std::sin(phase);
        const double kern = std::cos(c * q1(p.J, t, nullptr, cfg)) * envelope(t);
        return Complex(trig * kern, 0.0);
    };
    const double step = M_PI / std::max({p.eps, p.J.cutoff, 0.1});
    const double t_cap = 1e4;
    // Cheap pre-check: the envelope must be negligible at the cap, otherwise
    // the horizon march would burn through the budget before failing.
    if (envelope(t_cap) >= 1e-12)
        fail(ErrorCode::IntegralNotDamped,
             "kernel envelope " + format_double(envelope(t_cap)) + " at t = " +
                 format_double(t_cap) + " (damping too weak for the transform)");
    auto stop = [&](double t) { return envelope(t) < 1e-12; };
    auto tail = [&](double t) {
        const double h = 0.05 * step;
        const double rate = c * (q2(p.J, p.beta, t, nullptr, cfg) -
                                 q2(p.J, p.beta, t - h, nullptr, cfg)) / h;
        return rate > 0.0 ? envelope(t) / rate : std::numeric_limits<double>::infinity();
    };
    auto res = quad::integrate_to_horizon(f, 0.0, step, 1e-10, stop, tail, t_cap);
    if (info != nullptr) {
        info->horizon = res.horizon;
        info->tail_bound = res.tail_bound;
        info->error_estimate = res.error_estimate;
    }
    return res.value.real();
}

} // namespace

double tau_inverse(const SpinBosonParams& p, HorizonInfo* info, const NumericConfig& cfg) {
    return damped_transform(p, /*cosine=*/true, info, cfg);
}

double lamb_shift_x(const SpinBosonParams& p, HorizonInfo* info, const NumericConfig& cfg) {
    return damped_transform(p, /*cosine=*/false, info, cfg);
}

RelaxationData relaxation_data(const SpinBosonParams& p, int n_kernel_samples,
                               const NumericConfig& cfg) {
    RelaxationData out;
    out.tau_inv = tau_inverse(p, &out.tau_info, cfg);
    out.x = lamb_shift_x(p, &out.x_info, cfg);

    const double t_end = std::max(1.0, out.tau_info.horizon);
    out.t_samples.resize(n_kernel_samples);
    out.q1_samples.resize(n_kernel_samples);
    out.q2_samples.resize(n_kernel_samples);
    for (int i = 0; i < n_kernel_samples; ++i) {
        const double t = t_end * i / (n_kernel_samples - 1);
        out.t_samples[i] = t;
        out.q1_samples[i] = q1(p.J, t, nullptr, cfg);
        out.q2_samples[i] = q2(p.J, p.beta, t, nullptr, cfg);
    }

    out.resonances = {{0.0, 0, Complex(0.0, 0.0)},
                      {0.0, 1, Complex(0.0, out.tau_inv)},
                      {p.eps, 0, Complex(out.x, 0.5 * out.tau_inv)},
                      {-p.eps, 0, Complex(-out.x, 0.5 * out.tau_inv)}};
    return out;
}

// ---------------------------- coherent overlap algebra -----------------------

OverlapAlgebra::OverlapAlgebra(const bath::SpectralDensity& J, double beta, double q0,
                               const NumericConfig& cfg) {
    if (!(beta > 0.0) || std::isinf(beta))
        fail(ErrorCode::InvalidArgument, "overlap algebra requires finite beta > 0");
    if (J.family == bath::SpectralDensity::Family::OhmicExp && J.exponent <= 2.0)
        fail(ErrorCode::InfraredDivergent,
             "<f, coth(beta|u|/2) f> diverges for J ~ w^s with s <= 2 "
             "(infrared-regular form factor required)");
    const double wmax = omega_horizon(J);
    const double pref = q0 * q0 / (2.0 * M_PI);
    auto res_aa = quad::integrate(
        [&](double w) { return Complex(pref * J(w) * coth_half(beta, w) / (w * w), 0.0); }, 0.0,
        wmax, 1e-12, wmax / 64.0, cfg.quad_max_depth);
    auto res_ab = quad::integrate(
        [&](double w) {
            return Complex(-pref * J(w) / (w * w * std::sinh(0.5 * beta * w)), 0.0);
        },
        0.0, wmax, 1e-12, wmax / 64.0, cfg.quad_max_depth);
    caa_ = res_aa.value.real();
    cab_ = res_ab.value.real();
    if (!std::isfinite(caa_) || !std::isfinite(cab_) || res_aa.error_estimate > 1e-8)
        fail(ErrorCode::InfraredDivergent, "coherent quadratic forms did not converge");
}

Complex OverlapAlgebra::inner(const Eigen::Vector2cd& f, const Eigen::Vector2cd& g) const {
    Eigen::Matrix2cd gram;
    gram << caa_, cab_, cab_, caa_;
    return (f.adjoint() * gram * g)(0, 0);
}

std::vector<std::string> coherent_label_set() { return {"Omega", "X0", "X0*", "X+", "X-"}; }

CoherentVector coherent_label(const OverlapAlgebra& alg, const std::string& label) {
    // All labels are products of two Weyl factors acting on the vacuum, with
    // signs (sa, sb) on the basis elements a = f_beta and b = (f_beta)^J.
    auto build = [&](double sa, double sb, const std::string& name) {
        CoherentVector v;
        v.label = "Omega";
        v.amplitude = 1.0;
        v.coeff.setZero();
        v = weyl_apply(alg, Eigen::Vector2cd(0.0, sb), v);
        v = weyl_apply(alg, Eigen::Vector2cd(sa, 0.0), v);
        v.label = name;
        return v;
    };
    if (label == "Omega") {
        CoherentVector v;
        v.label = "Omega";
        return v;
    }
    if (label == "X0") return build(1.0, 1.0, "X0");
    if (label == "X0*") return build(-1.0, -1.0, "X0*");
    if (label == "X+") return build(-1.0, 1.0, "X+");
    if (label == "X-") return build(1.0, -1.0, "X-");
    fail(ErrorCode::LabelNotInClosedSet, "unknown coherent label '" + label + "'");
}

CoherentVector weyl_apply(const OverlapAlgebra& alg, const Eigen::Vector2cd& factor,
                          const CoherentVector& v) {
    CoherentVector out;
    out.label = v.label.empty() ? "product" : "W*" + v.label;
    // W(F) W(G) = e^{-(i/2) Im<F,G>} W(F + G).
    const Complex phase = std::exp(Complex(0.0, -0.5) * alg.inner(factor, v.coeff).imag());
    out.amplitude = v.amplitude * phase;
    out.coeff = factor + v.coeff;
    return out;
}

Complex weyl_overlap(const OverlapAlgebra& alg, const CoherentVector& left,
                     const CoherentVector& right) {
    // <amp_l W(F) Omega, amp_r W(G) Omega>
    //   = conj(amp_l) amp_r e^{(i/2) Im<F,G>} e^{-1/4 |G - F|^2}.
    const Complex cross = alg.inner(left.coeff, right.coeff);
    const Eigen::Vector2cd diff = right.coeff - left.coeff;
    const Complex norm2 = alg.inner(diff, diff);
    return std::conj(left.amplitude) * right.amplitude *
           std::exp(Complex(0.0, 0.5) * cross.imag()) * std::exp(-0.25 * norm2.real());
}

Complex gaussian_moment(const OverlapAlgebra& alg, const std::vector<Eigen::Vector2cd>& factors) {
    Complex exponent = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        exponent += -0.25 * alg.inner(factors[i], factors[i]);
        for (std::size_t j = i + 1; j < factors.size(); ++j)
            exponent += -0.5 * alg.inner(factors[i], factors[j]);
    }
    return std::exp(exponent);
}

CMatrix gram_matrix(const OverlapAlgebra& alg, const std::vector<std::string>& labels) {
    std::vector<CoherentVector> vecs;
    for (const auto& l : labels) vecs.push_back(coherent_label(alg, l));
    CMatrix g(labels.size(), labels.size());
    for (std::size_t i = 0; i < vecs.size(); ++i)
        for (std::size_t j = 0; j < vecs.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                weyl_overlap(alg, vecs[i], vecs[j]);
    return g;
}

// ------------------------- leading-order projections -------------------------

SystemSpace SystemSpace::make(double beta, double eps) {
    SystemSpace s;
    s.beta = beta;
    s.eps = eps;
    const double zp = std::exp(0.25 * beta * eps);   // e^{beta eps / 4}
    const double zm = std::exp(-0.25 * beta * eps);
    const double norm = std::sqrt(zp * zp + zm * zm);
    s.gibbs << zm / norm, zp / norm;  // components on (pp, mm)
    s.p_gibbs = s.gibbs * s.gibbs.adjoint();
    s.p_gibbs_perp = Eigen::Matrix2cd::Identity() - s.p_gibbs;
    return s;
}

LeadingProjections projections_leading(const SpinBosonParams& p, const OverlapAlgebra& alg) {
    LeadingProjections out;
    const SystemSpace sys = SystemSpace::make(p.beta, p.eps);

    const CoherentVector x0 = coherent_label(alg, "X0");
    const CoherentVector x0s = coherent_label(alg, "X0*");
    const CoherentVector xp = coherent_label(alg, "X+");
    const CoherentVector xm = coherent_label(alg, "X-");

    // System basis order (pp, pm, mp, mm); the diagonal sector is {0, 3}.
    // Each diagonal state pp / mm is dressed by X0* / X0 respectively.
    const int kPP = 0, kPM = 1, kMP = 2, kMM = 3;
    const std::array<int, 2> diag_idx = {kPP, kMM};
    const std::array<CoherentVector, 2> dress = {x0s, x0};

    // Stationary piece: rank one onto the dressed thermal vector.
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ProjectorTerm t;
            t.sys_left = diag_idx[i];
            t.sys_right = diag_idx[j];
            t.coh_left = dress[i];
            t.coh_right = dress[j];
            t.coeff = sys.gibbs(i) * std::conj(sys.gibbs(j));
            out.stationary.push_back(t);
        }
    }
    // Decaying e = 0 piece: the complement pattern with the same dressing.
    out.pi0_system_coeff = sys.p_gibbs_perp;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ProjectorTerm t;
            t.sys_left = diag_idx[i];
            t.sys_right = diag_idx[j];
            t.coh_left = dress[i];
            t.coh_right = dress[j];
            t.coeff = sys.p_gibbs_perp(i, j);
            out.pi0.push_back(t);
        }
    }
    // e = +/- eps: rank one on the dressed coherences.
    ProjectorTerm plus;
    plus.sys_left = plus.sys_right = kPM;
    plus.coh_left = plus.coh_right = xp;
    out.pi_plus.push_back(plus);
    ProjectorTerm minus;
    minus.sys_left = minus.sys_right = kMP;
    minus.coh_left = minus.coh_right = xm;
    out.pi_minus.push_back(minus);
    return out;
}

Complex project_amplitude(const OverlapAlgebra& alg, const ProductVector& phi,
                          const std::vector<ProjectorTerm>& projector, const ProductVector& psi) {
    Complex acc = 0.0;
    for (const auto& term : projector) {
        Complex left = 0.0;
        for (const auto& pt : phi.terms)
            if (pt.sys == term.sys_left)
                left += std::conj(pt.weight) * weyl_overlap(alg, pt.coh, term.coh_left);
        if (left == Complex(0.0, 0.0)) continue;
        Complex right = 0.0;
        for (const auto& qt : psi.terms)
            if (qt.sys == term.sys_right)
                right += qt.weight * weyl_overlap(alg, term.coh_right, qt.coh);
        acc += term.coeff * left * right;
    }
    return acc;
}

// ------------------------------ dynamics curves ------------------------------

DynamicsCurve dynamics_curve(const SpinBosonParams& p, const RelaxationData& relax,
                             const Eigen::Matrix2cd& observable, const Eigen::Matrix2cd& rho0,
                             const std::vector<double>& t_grid, const NumericConfig& cfg) {
    OverlapAlgebra alg(p.J, p.beta, p.q0, cfg);
    const SystemSpace sys = SystemSpace::make(p.beta, p.eps);
    LeadingProjections proj = projections_leading(p, alg);

    const CoherentVector x0 = coherent_label(alg, "X0");
    const CoherentVector x0s = coherent_label(alg, "X0*");
    // c_s with s = +/- on the diagonal pair (pp, mm): gibbs components.
    const std::array<Complex, 2> c = {sys.gibbs(0), sys.gibbs(1)};
    const std::array<CoherentVector, 2> dress = {x0s, x0};
    auto sys_index = [](int u, int s) { return 2 * u + s; };

    // phi_L = sum_{u,s} rho0(u, s) / c_s |phi_us (x) X0^{(s)}>.
    ProductVector phi;
    for (int u = 0; u < 2; ++u) {
        for (int s = 0; s < 2; ++s) {
            if (rho0(u, s) == Complex(0.0, 0.0)) continue;
            ProductVector::Term t;
            t.sys = sys_index(u, s);
            t.coh = dress[s];
            t.weight = rho0(u, s) / c[s];
            phi.terms.push_back(t);
        }
    }
    // psi_R = sum_{u,s} A(u, s) c_s |phi_us (x) X0^{(s)}>.
    ProductVector psi;
    for (int u = 0; u < 2; ++u) {
        for (int s = 0; s < 2; ++s) {
            if (observable(u, s) == Complex(0.0, 0.0)) continue;
            ProductVector::Term t;
            t.sys = sys_index(u, s);
            t.coh = dress[s];
            t.weight = observable(u, s) * c[s];
            psi.terms.push_back(t);
        }
    }

    DynamicsCurve out;
    out.t_grid = t_grid;
    out.equilibrium = project_amplitude(alg, phi, proj.stationary, psi);

    const double d2 = p.delta * p.delta;
    const Complex a0(0.0, relax.tau_inv);
    const Complex aplus(relax.x, 0.5 * relax.tau_inv);
    const Complex aminus(-relax.x, 0.5 * relax.tau_inv);
    out.terms = {{d2 * a0, project_amplitude(alg, phi, proj.pi0, psi)},
                 {Complex(p.eps, 0.0) + d2 * aplus, project_amplitude(alg, phi, proj.pi_plus, psi)},
                 {Complex(-p.eps, 0.0) + d2 * aminus,
                  project_amplitude(alg, phi, proj.pi_minus, psi)}};

    out.value.resize(t_grid.size());
    double cmax = 0.0;
    const double rate = p.delta == 0.0 ? 0.0 : 0.5 * d2 * relax.tau_inv;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        Complex v = out.equilibrium;
        for (const auto& term : out.terms) v += std::exp(kI * t * term.pole) * term.amplitude;
        out.value[k] = v;
        if (t > 0.0) {
            const double env = std::exp(-rate * t) + 1.0 / t;
            cmax = std::max(cmax, std::abs(v - out.equilibrium) / env);
        }
    }
    out.envelope_constant = cmax;
    return out;
}

nlohmann::json relaxation_to_json(const RelaxationData& r, const SpinBosonParams& p) {
    nlohmann::json j;
    j["tau_inverse"] = r.tau_inv;
    j["tau"] = r.tau_inv > 0.0 ? 1.0 / r.tau_inv : std::numeric_limits<double>::infinity();
    j["x"] = r.x;
    j["x_definition"] = x_definition_note();
    j["horizon"] = r.tau_info.horizon;
    j["tail_bound"] = r.tau_info.tail_bound;
    j["quadrature_error"] = r.tau_info.error_estimate;
    j["params"] = {{"delta", p.delta}, {"eps", p.eps}, {"q0", p.q0}, {"beta", p.beta}};
    nlohmann::json res = nlohmann::json::array();
    for (const auto& sr : r.resonances)
        res.push_back({{"e", sr.e},
                       {"j", sr.j},
                       {"re_lambda", sr.lambda.real()},
                       {"im_lambda", sr.lambda.imag()}});
    j["resonances"] = std::move(res);
    return j;
}

} // namespace reskit::spinboson
