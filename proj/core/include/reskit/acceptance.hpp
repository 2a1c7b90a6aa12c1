// acceptance.hpp — the end-to-end verification suite behind `reskit validate`
// and the acceptance test binary: one entry per shipped guarantee, each with
// its tolerance pinned in code.

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace reskit::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct Options {
    std::vector<int> only;      // empty = run all criteria
    double residual_bias = 0.0; // harness self-check: nonzero injects a fault into #1
    int threads = 1;
};

std::vector<CriterionResult> run(const Options& options = {});

nlohmann::json results_to_json(const std::vector<CriterionResult>& results);

} // namespace reskit::acceptance
