// reskit — configuration-driven front end: model construction, level-shift
// and resonance tables, expansion/oracle comparison, contour checks,
// spin-boson analytics, and the validation suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "reskit/acceptance.hpp"
#include "reskit/bath.hpp"
#include "reskit/linop.hpp"
#include "reskit/model.hpp"
#include "reskit/propagator.hpp"
#include "reskit/resonance.hpp"
#include "reskit/spinboson.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reskit;

namespace {

// Exit-code contract: 0 ok, 1 config/io, 2 assumption violation (A1/A4),
// 3 numerical non-convergence, 4 infrared divergence, 5 validation failure.
int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::A1Violated:
        case ErrorCode::A4Violated:
        case ErrorCode::DegenerateLevelShift:
            return 2;
        case ErrorCode::LimitNotConverged:
        case ErrorCode::FixedPointDiverged:
        case ErrorCode::QuadratureNotConverged:
        case ErrorCode::PairingAmbiguous:
        case ErrorCode::IntegralNotDamped:
        case ErrorCode::NonIntegrableDensity:
            return 3;
        case ErrorCode::InfraredDivergent:
            return 4;
        default:
            return 1;
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config file '" + path + "'");
    json j;
    in >> j;
    return j;
}

NumericConfig parse_tolerances(const json& cfg, int threads) {
    NumericConfig nc;
    nc.threads = threads;
    if (!cfg.contains("tolerances")) return nc;
    const json& t = cfg["tolerances"];
    auto get = [&](const char* key, double& slot) { if (t.contains(key)) slot = t[key].get<double>(); };
    get("structural_tol", nc.structural_tol);
    get("solve_tol", nc.solve_tol);
    get("extrap_tol", nc.extrap_tol);
    get("extrap_eps_max", nc.extrap_eps_max);
    get("extrap_spacing_factor", nc.extrap_spacing_factor);
    get("extrap_ratio", nc.extrap_ratio);
    get("riesz_idem_tol", nc.riesz_idem_tol);
    get("fixed_point_tol", nc.fixed_point_tol);
    get("fixed_point_damping", nc.fixed_point_damping);
    get("c_constant", nc.c_constant);
    get("class_real_tol", nc.class_real_tol);
    get("simplicity_tol", nc.simplicity_tol);
    get("derivative_step_factor", nc.derivative_step_factor);
    get("small_delta_guard", nc.small_delta_guard);
    get("quad_tol", nc.quad_tol);
    get("contour_w_factor", nc.contour_w_factor);
    get("contour_tail_tol", nc.contour_tail_tol);
    if (t.contains("riesz_nodes")) nc.riesz_nodes = t["riesz_nodes"].get<int>();
    if (t.contains("fixed_point_max_iter")) nc.fixed_point_max_iter = t["fixed_point_max_iter"].get<int>();
    return nc;
}

json tolerances_to_json(const NumericConfig& nc) {
    return json{{"structural_tol", nc.structural_tol},
                {"solve_tol", nc.solve_tol},
                {"singular_rcond", nc.singular_rcond},
                {"eig_defect_cond", nc.eig_defect_cond},
                {"extrap_tol", nc.extrap_tol},
                {"extrap_eps_max", nc.extrap_eps_max},
                {"extrap_spacing_factor", nc.extrap_spacing_factor},
                {"extrap_ratio", nc.extrap_ratio},
                {"extrap_min_samples", nc.extrap_min_samples},
                {"riesz_idem_tol", nc.riesz_idem_tol},
                {"circle_touch_tol", nc.circle_touch_tol},
                {"riesz_nodes", nc.riesz_nodes},
                {"fixed_point_tol", nc.fixed_point_tol},
                {"fixed_point_damping", nc.fixed_point_damping},
                {"fixed_point_max_iter", nc.fixed_point_max_iter},
                {"c_constant", nc.c_constant},
                {"class_real_tol", nc.class_real_tol},
                {"simplicity_tol", nc.simplicity_tol},
                {"derivative_step_factor", nc.derivative_step_factor},
                {"small_delta_guard", nc.small_delta_guard},
                {"quad_tol", nc.quad_tol},
                {"quad_max_depth", nc.quad_max_depth},
                {"contour_w_factor", nc.contour_w_factor},
                {"contour_tail_tol", nc.contour_tail_tol},
                {"threads", nc.threads}};
}

std::function<double(double)> parse_profile(const json& p, std::mt19937_64& rng,
                                            const std::vector<double>& grid_omegas) {
    const std::string kind = p.value("profile", "flat");
    const double amp = p.value("amplitude", 1.0);
    if (kind == "zero") return nullptr;
    if (kind == "flat") return [amp](double) { return amp; };
    if (kind == "gaussian") {
        const double center = p.value("center", 0.0);
        const double width = p.value("width", 0.3);
        return [amp, center, width](double w) {
            const double u = (w - center) / width;
            return amp * std::exp(-u * u);
        };
    }
    if (kind == "random") {
        // Mode-wise amplitudes drawn once; reproducible through the run seed.
        auto values = std::make_shared<std::vector<std::pair<double, double>>>();
        std::uniform_real_distribution<double> dist(0.5, 1.5);
        for (double w : grid_omegas) values->emplace_back(w, amp * dist(rng));
        return [values](double w) {
            for (const auto& kv : *values)
                if (kv.first == w) return kv.second;
            return 0.0;
        };
    }
    fail(ErrorCode::InvalidArgument, "unknown coupling profile '" + kind + "'");
}

bath::SpectralDensity parse_density(const json& j) {
    bath::SpectralDensity J;
    const std::string family = j.value("family", "ohmic");
    if (family == "ohmic" || family == "ohmic-exponential") {
        J.family = bath::SpectralDensity::Family::OhmicExp;
        J.amplitude = j.value("A", 1.0);
        J.exponent = j.value("s", 1.0);
        J.cutoff = j.value("omega_c", 1.0);
    } else if (family == "table") {
        J.family = bath::SpectralDensity::Family::Table;
        J.table_omega = j.at("omega").get<std::vector<double>>();
        J.table_value = j.at("value").get<std::vector<double>>();
    } else {
        fail(ErrorCode::InvalidArgument, "unknown spectral density family '" + family + "'");
    }
    return J;
}

Model build_model(const json& cfg, std::uint64_t seed) {
    if (!cfg.contains("model")) fail(ErrorCode::InvalidArgument, "config lacks a 'model' block");
    const json& m = cfg["model"];
    std::mt19937_64 rng(seed);

    if (m.contains("file")) {
        Model model = model_from_json(load_json(m["file"].get<std::string>()));
        model.validate();
        return model;
    }
    if (m.contains("custom")) {
        const json& c = m["custom"];
        Model model;
        model.L0 = linop::matrix_from_json(c.at("L0"));
        model.I = linop::matrix_from_json(c.at("I"));
        model.delta = c.value("delta", 0.0);
        for (const auto& cl : c.at("clusters")) {
            EigenvalueCluster ec;
            ec.e = cl.at("e").get<double>();
            ec.indices = cl.at("indices").get<std::vector<int>>();
            ec.multiplicity = cl.value("m", static_cast<int>(ec.indices.size()));
            model.clusters.push_back(std::move(ec));
        }
        if (c.contains("grid")) {
            model.grid.spacing = c["grid"].value("spacing", 0.0);
            model.grid.window_min = c["grid"].value("window_min", 0.0);
            model.grid.window_max = c["grid"].value("window_max", 0.0);
        }
        model.seed = seed;
        model.validate();
        return model;
    }
    if (m.contains("friedrichs")) {
        const json& f = m["friedrichs"];
        const json& g = f.at("grid");
        auto grid = bath::uniform_grid(g.value("min", -1.0), g.value("max", 1.0),
                                       g.value("n", 1000));
        std::vector<bath::FriedrichsCluster> clusters;
        for (const auto& cl : f.at("clusters")) {
            bath::FriedrichsCluster fc;
            fc.e = cl.at("e").get<double>();
            for (const auto& cp : cl.at("couplings"))
                fc.member_profiles.push_back(parse_profile(cp, rng, grid.omega));
            clusters.push_back(std::move(fc));
        }
        Model model = bath::build_friedrichs(clusters, grid, f.value("delta", 0.0));
        model.seed = seed;
        return model;
    }
    if (m.contains("spinboson_surrogate")) {
        const json& s = m["spinboson_surrogate"];
        auto J = parse_density(s.at("J"));
        const json& g = s.at("grid");
        auto grid = bath::discretize(J, s.value("beta", 1.0), g.value("n", 600),
                                     g.value("window", 4.0), g.value("scheme", "uniform"));
        bath::LiouvilleSurrogateParams params;
        params.eps = s.value("eps", 1.0);
        params.delta = s.value("delta", 0.0);
        params.g_scale = s.value("g_scale", 1.0);
        Model model =
            bath::build_spinboson_liouvillean_surrogate(params, grid, s.value("beta", 1.0));
        model.seed = seed;
        return model;
    }
    fail(ErrorCode::InvalidArgument,
         "model block needs one of: friedrichs, spinboson_surrogate, custom, file");
}

void guard_delta(const Model& model, const NumericConfig& nc, bool force) {
    if (!force && std::abs(model.delta) > nc.small_delta_guard)
        fail(ErrorCode::InvalidArgument,
             "delta " + format_double(model.delta) + " exceeds the small-coupling guard " +
                 format_double(nc.small_delta_guard) + "; rerun with --force to proceed");
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    bool force = false;
    int threads = 1;
};

json manifest_base(const std::string& command, const CommonArgs& args, const json& cfg,
                   const NumericConfig& nc) {
    json j;
    j["command"] = command;
    j["config"] = cfg;
    j["seed"] = args.seed;
    j["force"] = args.force;
    j["tolerances"] = tolerances_to_json(nc);
    j["decisions"] = {{"x_definition", spinboson::x_definition_note()},
                      {"c_constant", nc.c_constant},
                      {"contour_w_factor", nc.contour_w_factor}};
    return j;
}

// Build phi/psi from an expand/contour vector spec.
CVector parse_vector(const json& spec, const Model& model) {
    CVector v = CVector::Zero(model.dim());
    if (spec.contains("cluster")) {
        const int c = spec["cluster"].get<int>();
        const int member = spec.value("member", 0);
        v(model.clusters.at(c).indices.at(member)) = 1.0;
    }
    if (spec.contains("bump")) {
        const json& b = spec["bump"];
        const double center = b.value("center", 0.0);
        const double width = b.value("width", 0.1);
        const double amp = b.value("amplitude", 0.05);
        int nbound = 0;
        for (const auto& cl : model.clusters) nbound += cl.multiplicity;
        for (int k = 0; k < model.dim() - nbound; ++k) {
            const double w = model.L0(k, k).real();
            const double u = (w - center) / width;
            v(k) += amp * std::exp(-u * u);
        }
    }
    if (v.norm() == 0.0) fail(ErrorCode::InvalidArgument, "vector spec produced the zero vector");
    v.normalize();
    return v;
}

// ------------------------------- subcommands --------------------------------

int cmd_levelshift(const CommonArgs& args, bool resonances_too) {
    const json cfg = load_json(args.config_path);
    NumericConfig nc = parse_tolerances(cfg, args.threads);
    Model model = build_model(cfg, args.seed);
    guard_delta(model, nc, args.force);

    std::vector<resonance::LevelShiftData> shifts;
    for (int c = 0; c < static_cast<int>(model.clusters.size()); ++c)
        shifts.push_back(resonance::level_shift(model, c, nc));

    fs::create_directories(args.out_dir);
    {
        std::ostringstream os;
        resonance::export_levelshift_csv(os, shifts);
        write_text(fs::path(args.out_dir) / "levelshift.csv", os.str());
    }

    json manifest = manifest_base(resonances_too ? "resonances" : "levelshift", args, cfg, nc);
    json per_cluster = json::array();

    if (resonances_too) {
        auto gap = resonance::gaps(shifts, nc.c_constant, nc);
        std::vector<resonance::ResonanceData> rds;
        for (int c = 0; c < static_cast<int>(model.clusters.size()); ++c)
            rds.push_back(resonance::resonance_data(model, c, shifts[c], gap.alpha, nc));
        std::ostringstream os;
        resonance::export_resonance_csv(os, rds);
        write_text(fs::path(args.out_dir) / "resonances.csv", os.str());
        manifest["gaps"] = {{"delta_gap", gap.delta_gap},
                            {"g", gap.g},
                            {"alpha", gap.alpha},
                            {"gamma", gap.gamma},
                            {"c", gap.c}};
        for (const auto& rd : rds) {
            json c = {{"e", rd.e},
                      {"classification", to_string(rd.level_shift.classification)},
                      {"deviation_constant", rd.deviation_constant}};
            if (rd.partially_stable) {
                c["E"] = rd.E;
                c["fixed_point_residual"] = rd.fixed_point_residual;
            }
            per_cluster.push_back(std::move(c));
        }
    } else {
        for (const auto& lsd : shifts)
            per_cluster.push_back({{"e", lsd.e},
                                   {"classification", to_string(lsd.classification)},
                                   {"extrapolation_spread", lsd.extrapolation_spread}});
    }
    manifest["clusters"] = std::move(per_cluster);
    write_json(fs::path(args.out_dir) / "manifest.json", manifest);
    return 0;
}

int cmd_expand(const CommonArgs& args) {
    const json cfg = load_json(args.config_path);
    NumericConfig nc = parse_tolerances(cfg, args.threads);
    Model model = build_model(cfg, args.seed);
    guard_delta(model, nc, args.force);
    const json e = cfg.value("expand", json::object());

    std::vector<resonance::LevelShiftData> shifts;
    for (int c = 0; c < static_cast<int>(model.clusters.size()); ++c)
        shifts.push_back(resonance::level_shift(model, c, nc));
    auto gap = resonance::gaps(shifts, nc.c_constant, nc);
    std::vector<resonance::ResonanceData> rds;
    for (int c = 0; c < static_cast<int>(model.clusters.size()); ++c)
        rds.push_back(resonance::resonance_data(model, c, shifts[c], gap.alpha, nc));

    const double t_min = e.value("t_min", 10.0);
    const double t_max = e.value("t_max", 0.5 / std::max(gap.gamma * model.delta * model.delta,
                                                          1e-12));
    const int n_t = e.value("n_t", 96);
    std::vector<double> t_grid(n_t);
    for (int i = 0; i < n_t; ++i) t_grid[i] = t_min + (t_max - t_min) * i / (n_t - 1);

    const CVector phi = parse_vector(e.value("phi", json{{"cluster", 0}}), model);
    const CVector psi = e.contains("psi") ? parse_vector(e["psi"], model) : phi;

    auto result = propagator::expand(model, phi, psi, t_grid, rds, nc);

    std::ostringstream os;
    os << "t,re_exact,im_exact,re_expansion,im_expansion,abs_r,t_abs_r\n";
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double ar = std::abs(result.remainder[i]);
        os << format_double(t_grid[i]) << ',' << format_double(result.exact[i].real()) << ','
           << format_double(result.exact[i].imag()) << ','
           << format_double(result.expansion[i].real()) << ','
           << format_double(result.expansion[i].imag()) << ',' << format_double(ar) << ','
           << format_double(t_grid[i] * ar) << '\n';
    }
    fs::create_directories(args.out_dir);
    write_text(fs::path(args.out_dir) / "expansion.csv", os.str());

    json manifest = manifest_base("expand", args, cfg, nc);
    manifest["gaps"] = {{"alpha", gap.alpha}, {"gamma", gap.gamma}};
    manifest["kappa"] = result.kappa;
    try {
        auto fit = propagator::remainder_fit(result, t_min, t_max);
        manifest["remainder_fit"] = {{"amplitude", fit.amplitude},
                                     {"exponent", fit.exponent},
                                     {"samples", fit.samples_used},
                                     {"skipped", fit.skipped}};
    } catch (const Error& err) {
        manifest["remainder_fit"] = {{"error", err.what()}};
    }
    auto diag = propagator::lap_diagnostics(model, 0, phi, psi, gap.alpha, 0.1 * gap.alpha, 11, nc);
    manifest["lap_diagnostics"] = {diag[0], diag[1], diag[2], diag[3]};
    write_json(fs::path(args.out_dir) / "manifest.json", manifest);
    return 0;
}

int cmd_contour(const CommonArgs& args) {
    const json cfg = load_json(args.config_path);
    NumericConfig nc = parse_tolerances(cfg, args.threads);
    Model model = build_model(cfg, args.seed);
    guard_delta(model, nc, args.force);
    const json c = cfg.value("contour", json::object());

    std::vector<resonance::LevelShiftData> shifts;
    for (int cl = 0; cl < static_cast<int>(model.clusters.size()); ++cl)
        shifts.push_back(resonance::level_shift(model, cl, nc));
    auto gap = resonance::gaps(shifts, nc.c_constant, nc);
    auto config = propagator::ContourConfig::from_gaps(model, gap, nc);
    if (c.contains("w_factor")) config.w = c["w_factor"].get<double>() * gap.alpha;

    std::vector<double> times = c.value("times", std::vector<double>{0.5, 1.0, 2.0, 5.0});
    const CVector phi = parse_vector(c.value("phi", json{{"cluster", 0}}), model);
    const CVector psi = phi;
    auto exact = linop::propagator_exact_grid(model.full(), times, phi, psi, nc);

    std::vector<propagator::ContourResult> results(times.size());
    parallel_for(times.size(), nc.threads, [&](std::size_t i) {
        results[i] = propagator::contour_amplitude(model, phi, psi, times[i], config, nc);
    });

    std::ostringstream os;
    os << "t,re_contour,im_contour,re_exact,im_exact,abs_diff\n";
    json windows = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_double(times[i]) << ',' << format_double(results[i].total.real()) << ','
           << format_double(results[i].total.imag()) << ',' << format_double(exact[i].real())
           << ',' << format_double(exact[i].imag()) << ','
           << format_double(std::abs(results[i].total - exact[i])) << '\n';
        json wc = json::array();
        for (const auto& w : results[i].window_contributions)
            wc.push_back({{"re", w.real()}, {"im", w.imag()}});
        windows.push_back({{"t", times[i]},
                           {"windows", wc},
                           {"far", {{"re", results[i].far_contribution.real()},
                                    {"im", results[i].far_contribution.imag()}}},
                           {"truncation", results[i].truncation},
                           {"evaluations", results[i].evaluations}});
    }
    fs::create_directories(args.out_dir);
    write_text(fs::path(args.out_dir) / "contour.csv", os.str());
    json manifest = manifest_base("contour", args, cfg, nc);
    manifest["w"] = config.w;
    manifest["alpha"] = gap.alpha;
    manifest["contributions"] = std::move(windows);
    write_json(fs::path(args.out_dir) / "manifest.json", manifest);
    return 0;
}

int cmd_spinboson(const CommonArgs& args) {
    const json cfg = load_json(args.config_path);
    NumericConfig nc = parse_tolerances(cfg, args.threads);
    const json& s = cfg.contains("spinboson") ? cfg["spinboson"] : cfg;

    spinboson::SpinBosonParams p;
    p.beta = s.value("beta", 1.0);
    p.eps = s.value("eps", 0.0);
    p.delta = s.value("delta", 0.1);
    p.q0 = s.value("q0", 1.0);
    p.J = parse_density(s.at("J"));

    auto relax = spinboson::relaxation_data(p, s.value("n_kernel_samples", 201), nc);

    fs::create_directories(args.out_dir);
    write_json(fs::path(args.out_dir) / "tau.json", spinboson::relaxation_to_json(relax, p));

    {
        std::ostringstream os;
        os << "e,j,re_lambda,im_lambda,classification\n";
        for (const auto& sr : relax.resonances)
            os << format_double(sr.e) << ',' << sr.j << ',' << format_double(sr.lambda.real())
               << ',' << format_double(sr.lambda.imag()) << ','
               << (sr.e == 0.0 ? "partially-stable" : "unstable") << '\n';
        write_text(fs::path(args.out_dir) / "sbresonances.csv", os.str());
    }

    json manifest = manifest_base("spinboson", args, cfg, nc);
    manifest["tau_inverse"] = relax.tau_inv;
    manifest["x"] = relax.x;

    if (s.contains("dynamics")) {
        const json& d = s["dynamics"];
        auto named_matrix = [](const std::string& name) -> Eigen::Matrix2cd {
            Eigen::Matrix2cd m;
            if (name == "sigma_z") m << 1, 0, 0, -1;
            else if (name == "sigma_x") m << 0, 1, 1, 0;
            else if (name == "sigma_y") m << 0, Complex(0, -1), Complex(0, 1), 0;
            else if (name == "up") m << 1, 0, 0, 0;
            else if (name == "down") m << 0, 0, 0, 1;
            else if (name == "mixed") m << 0.5, 0, 0, 0.5;
            else if (name == "plus") m << 0.5, 0.5, 0.5, 0.5;
            else fail(ErrorCode::InvalidArgument, "unknown named 2x2 matrix '" + name + "'");
            return m;
        };
        const Eigen::Matrix2cd obs = named_matrix(d.value("observable", "sigma_z"));
        const Eigen::Matrix2cd rho0 = named_matrix(d.value("initial", "up"));
        const int n_t = d.value("n_t", 200);
        const double t0 = d.value("t_min", 0.5);
        const double t1 = d.value("t_max", 100.0);
        std::vector<double> t_grid(n_t);
        for (int i = 0; i < n_t; ++i) t_grid[i] = t0 + (t1 - t0) * i / (n_t - 1);

        auto curve = spinboson::dynamics_curve(p, relax, obs, rho0, t_grid, nc);
        std::ostringstream os;
        os << "t,re,im,envelope,equilibrium\n";
        const double rate = 0.5 * p.delta * p.delta * relax.tau_inv;
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double env = std::exp(-rate * t_grid[i]) + 1.0 / std::max(t_grid[i], 1e-12);
            os << format_double(t_grid[i]) << ',' << format_double(curve.value[i].real()) << ','
               << format_double(curve.value[i].imag()) << ',' << format_double(env) << ','
               << format_double(curve.equilibrium.real()) << '\n';
        }
        write_text(fs::path(args.out_dir) / "dynamics.csv", os.str());
        manifest["dynamics"] = {{"equilibrium_re", curve.equilibrium.real()},
                                {"equilibrium_im", curve.equilibrium.imag()},
                                {"envelope_constant", curve.envelope_constant}};
    }
    write_json(fs::path(args.out_dir) / "manifest.json", manifest);
    return 0;
}

int cmd_validate(const CommonArgs& args) {
    json cfg = json::object();
    if (!args.config_path.empty()) cfg = load_json(args.config_path);
    const json v = cfg.value("validate", json::object());
    acceptance::Options opts;
    opts.threads = args.threads;
    if (v.contains("only")) opts.only = v["only"].get<std::vector<int>>();
    if (v.value("inject_error", false)) opts.residual_bias = 1e-3;

    auto results = acceptance::run(opts);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " (" << r.name
                  << "): " << r.details << " [" << format_double(r.seconds) << " s]\n";
        all = all && r.pass;
    }
    fs::create_directories(args.out_dir);
    json report;
    report["results"] = acceptance::results_to_json(results);
    report["all_pass"] = all;
    write_json(fs::path(args.out_dir) / "validate.json", report);
    return all ? 0 : 5;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"resonance expansions of quantum propagators: level shifts, Feshbach "
                 "reductions, contour checks and spin-boson analytics"};
    app.require_subcommand(1);

    CommonArgs args;
    if (const char* env = std::getenv("RESKIT_THREADS")) args.threads = std::atoi(env);

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", args.config_path, "JSON config file");
        if (config_required) opt->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--seed", args.seed, "RNG seed for randomized couplings");
        sub->add_flag("--force", args.force, "bypass the small-coupling guard");
        sub->add_option("--threads", args.threads, "worker threads for parallel sweeps");
    };

    auto* c_ls = app.add_subcommand("levelshift", "level-shift spectra and classification");
    add_common(c_ls, true);
    auto* c_rs = app.add_subcommand("resonances", "reduced spectral data and resonance table");
    add_common(c_rs, true);
    auto* c_ex = app.add_subcommand("expand", "resonance expansion vs the spectral oracle");
    add_common(c_ex, true);
    auto* c_ct = app.add_subcommand("contour", "contour-integral amplitude check");
    add_common(c_ct, true);
    auto* c_sb = app.add_subcommand("spinboson", "spin-boson relaxation and dynamics");
    add_common(c_sb, true);
    auto* c_va = app.add_subcommand("validate", "run the verification suite");
    add_common(c_va, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_ls->parsed()) return cmd_levelshift(args, false);
        if (c_rs->parsed()) return cmd_levelshift(args, true);
        if (c_ex->parsed()) return cmd_expand(args);
        if (c_ct->parsed()) return cmd_contour(args);
        if (c_sb->parsed()) return cmd_spinboson(args);
        if (c_va->parsed()) return cmd_validate(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
