// Acceptance runner: one pass/fail line per shipped criterion; nonzero exit
// when any criterion fails.

#include <cstdio>
#include <string>
#include <vector>

#include "reskit/acceptance.hpp"

int main(int argc, char** argv) {
    reskit::acceptance::Options opts;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            opts.only.push_back(std::atoi(argv[++i]));
        }
    }
    auto results = reskit::acceptance::run(opts);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %d (%s): %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.details.c_str(), r.seconds);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
