#include "reskit/model.hpp"

#include <nlohmann/json.hpp>

namespace reskit {

double Model::a1_residual() const {
    double worst = 0.0;
    for (const auto& c : clusters) {
        double block = 0.0;
        for (int i : c.indices)
            for (int j : c.indices) block = std::max(block, std::abs(I(i, j)));
        worst = std::max(worst, block);
    }
    return worst;
}

void Model::validate(const NumericConfig& cfg) const {
    if (L0.rows() != L0.cols() || I.rows() != I.cols() || L0.rows() != I.rows())
        fail(ErrorCode::InvalidArgument, "model: L0 and I must be square and matched");
    const double scale_l = std::max(1.0, L0.norm());
    const double scale_i = std::max(1.0, I.norm());
    if (!linop::is_hermitian(L0, cfg.structural_tol) || !linop::is_hermitian(I, cfg.structural_tol))
        fail(ErrorCode::NotSelfAdjoint, "model: L0 and I must be self-adjoint");
    for (const auto& c : clusters) {
        if (static_cast<int>(c.indices.size()) != c.multiplicity)
            fail(ErrorCode::InvalidArgument, "model: cluster multiplicity/index mismatch");
        for (int idx : c.indices) {
            if (idx < 0 || idx >= dim()) fail(ErrorCode::InvalidArgument, "model: cluster index range");
            // Cluster states must be exact eigenvectors of L0 at energy e.
            for (int r = 0; r < dim(); ++r) {
                const Complex expected = (r == idx) ? Complex(c.e, 0.0) : Complex(0.0, 0.0);
                if (std::abs(L0(r, idx) - expected) > cfg.structural_tol * scale_l)
                    fail(ErrorCode::InvalidArgument,
                         "model: cluster state " + std::to_string(idx) +
                             " is not an L0 eigenvector at e = " + format_double(c.e));
            }
        }
    }
    if (a1_residual() > cfg.structural_tol * scale_i)
        fail(ErrorCode::A1Violated, "Pe I Pe != 0: residual " + format_double(a1_residual()));
}

nlohmann::json model_to_json(const Model& m) {
    nlohmann::json j;
    j["L0"] = linop::matrix_to_json(m.L0);
    j["I"] = linop::matrix_to_json(m.I);
    j["delta"] = m.delta;
    j["seed"] = m.seed;
    j["grid"] = {{"spacing", m.grid.spacing},
                 {"window_min", m.grid.window_min},
                 {"window_max", m.grid.window_max}};
    nlohmann::json cl = nlohmann::json::array();
    for (const auto& c : m.clusters)
        cl.push_back({{"e", c.e}, {"m", c.multiplicity}, {"indices", c.indices}});
    j["clusters"] = std::move(cl);
    return j;
}

Model model_from_json(const nlohmann::json& j) {
    Model m;
    m.L0 = linop::matrix_from_json(j.at("L0"));
    m.I = linop::matrix_from_json(j.at("I"));
    m.delta = j.at("delta").get<double>();
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("grid")) {
        m.grid.spacing = j["grid"].value("spacing", 0.0);
        m.grid.window_min = j["grid"].value("window_min", 0.0);
        m.grid.window_max = j["grid"].value("window_max", 0.0);
    }
    for (const auto& c : j.at("clusters")) {
        EigenvalueCluster cl;
        cl.e = c.at("e").get<double>();
        cl.multiplicity = c.at("m").get<int>();
        cl.indices = c.at("indices").get<std::vector<int>>();
        m.clusters.push_back(std::move(cl));
    }
    return m;
}

} // namespace reskit
