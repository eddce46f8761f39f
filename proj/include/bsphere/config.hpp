#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bsphere {

/// Flat run configuration. Every field except `workers` and `output_dir`
/// enters the canonical text and therefore the config hash; numeric fields at
/// 0 mean "command default".
struct RunConfig {
    std::string command;
    std::string profile = "desk";
    std::uint64_t root_seed = 1;
    std::size_t replicas = 0;
    std::size_t grid_n = 0;
    double x = 1.0;
    std::vector<double> eps_list;
    std::vector<int> p_list;
    double lambda = 2.0;
    double window_a = 1e-3;
    double window_b = 500.0;
    std::size_t strata = 20;
    double sigma_cut = 1e-4;
    double ident_tol = 0.0;
    std::size_t anchors = 1024;
    std::vector<std::size_t> m_ladder;
    std::vector<std::size_t> n_ladder;
    double dt = 1e-3;
    double t = 1.0;
    double s_fixed = 0.3;
    std::string functional = "min-below";
    double level = 0.0;
    std::vector<std::string> input;  ///< trajectory files read by metric-validate

    unsigned workers = 1;
    std::string output_dir;
};

/// Sorted key=value lines, reals at 17 significant digits, lists comma separated.
std::string canonical_text(const RunConfig& c);

/// FNV-1a 64 of canonical_text as 16 lowercase hex digits.
std::string config_hash(const RunConfig& c);

/// Applies one key=value assignment (keys as in canonical_text, dashes or
/// underscores). Throws ParameterError on unknown keys or malformed values.
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);

/// Applies every non-empty, non-comment line of a key=value file body.
void apply_config_text(RunConfig& c, std::string_view text);

std::vector<double> parse_real_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

} // namespace bsphere
