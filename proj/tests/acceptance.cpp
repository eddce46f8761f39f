// Acceptance battery: one line per criterion, nonzero exit when a gating criterion fails.
//
//   acceptance [profile] [root_seed]    profile defaults to "desk", seed to 1

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "bsphere/runner.hpp"

int main(int argc, char** argv) {
    const std::string profile = argc > 1 ? argv[1] : "desk";
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());

    std::cout << "acceptance profile " << profile << ", root seed " << seed << ", workers " << workers << "\n";
    const bsphere::SuiteOutcome outcome = bsphere::run_suite(bsphere::suite_profile(profile), seed, workers, std::cout);

    std::size_t gating = 0, gating_failed = 0, info = 0;
    for (const auto& c : outcome.criteria) {
        if (!c.gating) {
            ++info;
            continue;
        }
        ++gating;
        gating_failed += c.passed ? 0 : 1;
    }
    std::ofstream("acceptance_" + profile + ".csv") << outcome.artifacts.at("suite.csv");
    std::cout << "summary: " << gating - gating_failed << "/" << gating << " gating criteria passed, " << info
              << " informational\n";
    return gating_failed == 0 ? 0 : 1;
}
