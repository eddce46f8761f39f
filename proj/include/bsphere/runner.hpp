#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bsphere/config.hpp"

namespace bsphere {

/// Process exit codes of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUnknownCommand = 1,
    kExitConfigError = 2,
    kExitAcceptanceFailure = 3,
    kExitResourceError = 4,
    kExitCorruptFile = 5,
    kExitOutputError = 6,
};

/// Files produced by a command, keyed by file name, written only after the
/// command completed.
using Artifacts = std::map<std::string, std::string>;

struct CriterionResult {
    std::string id;
    std::string name;
    bool gating = true;
    bool passed = false;
    std::string measured;
    std::string requirement;
};

/// Replica counts and grids of the acceptance battery.
struct SuiteProfile {
    std::string name;
    std::size_t c1_replicas, c1_strata, c1_coarse;
    double c1_window_a, c1_window_b;
    std::size_t c23_replicas, c23_strata, c23_coarse;
    double c23_window_a, c23_window_b, c23_cells_per_unit;
    std::size_t c4_replicas, c4_atom_n;
    double c4_dt, c4_sigma_cut;
    std::size_t c5_replicas;
    double c5_dt;
    std::size_t c6_trajectories, c6_n, c6_star_targets, c6_random_pairs;
    std::vector<std::size_t> c6_ladder;
    std::size_t c7_replicas, c7_coarse;
    std::size_t c8_replicas, c8_n;
    std::size_t c9_replicas, c9_n;
    std::size_t c10_replicas, c10_n;
    std::size_t c11_replicas;
    std::vector<std::size_t> c11_ladder;
    std::size_t c12_lil_replicas, c12_tail_replicas;
    bool determinism_check;
};

/// "desk" (the acceptance battery) or "quick" (small smoke run).
SuiteProfile suite_profile(std::string_view name);

struct SuiteOutcome {
    std::vector<CriterionResult> criteria;
    Artifacts artifacts;
};

/// Runs every criterion of the profile; `progress` receives one line per criterion.
SuiteOutcome run_suite(const SuiteProfile& profile, std::uint64_t root_seed, unsigned workers,
                       std::ostream& progress);

/// suite.csv body for a list of criteria.
std::string suite_csv(const std::vector<CriterionResult>& criteria);

/// One human-readable line per criterion: "[PASS] C1 ...".
std::string format_criterion(const CriterionResult& c);

const std::vector<std::string>& command_names();

/// Runs a command, writes its artifacts and a JSON-lines record into the
/// output directory and returns the exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Computes the artifacts of a command without touching the file system.
/// Throws the library errors; acceptance_failed is set when a gating criterion fails.
Artifacts compute(const RunConfig& config, std::ostream& progress, bool& acceptance_failed);

/// Output directory: config value, else $BSPHERE_OUTPUT_DIR, else "bsphere-out".
std::string resolve_output_dir(const RunConfig& config);

} // namespace bsphere
