// model.hpp — finite surrogate of (L0, I, delta) with declared embedded
// eigenvalue clusters and quasi-continuum grid metadata.

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "reskit/common.hpp"
#include "reskit/errors.hpp"
#include "reskit/linop.hpp"

namespace reskit {

// Embedded eigenvalue e of L0 with multiplicity m and spectral projection.
struct EigenvalueCluster {
    double e = 0.0;
    int multiplicity = 1;
    std::vector<int> indices;  // coordinates of the cluster states in the model space

    linop::OrthProjection projection(int dim) const {
        return linop::OrthProjection::onto_axes(indices, dim);
    }
};

struct GridInfo {
    double spacing = 0.0;       // characteristic level spacing of the quasi-continuum
    double window_min = 0.0;
    double window_max = 0.0;
};

struct Model {
    CMatrix L0;
    CMatrix I;
    double delta = 0.0;
    std::vector<EigenvalueCluster> clusters;
    GridInfo grid;
    std::uint64_t seed = 0;  // RNG seed when couplings were randomized

    int dim() const { return static_cast<int>(L0.rows()); }
    CMatrix full() const { return L0 + delta * I; }

    // (A1): Pe I Pe = 0 for every declared cluster; also checks that the
    // cluster states really are eigenvectors of L0 at energy e.
    void validate(const NumericConfig& cfg = {}) const;
    double a1_residual() const;
};

nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);

} // namespace reskit
