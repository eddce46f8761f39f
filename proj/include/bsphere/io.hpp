#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bsphere/snake.hpp"
#include "bsphere/stats.hpp"

namespace bsphere {

/// Real printed with 17 significant digits ("%.17g").
std::string format_real(double v);

class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::initializer_list<std::string> header);
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    void row(std::initializer_list<std::string> cells) { row(std::vector<std::string>(cells)); }

private:
    std::ostream* os_;
    std::size_t columns_;
};

/// Header: name,estimate,std_error,ci_low,ci_high,replicas,seed,window_tail_mass,
/// sigma_cut,dropped_rate_bound,dropped_bias_bound,config_hash
std::vector<std::string> estimate_csv_header();
std::vector<std::string> estimate_csv_cells(const EstimateReport& r);

// Trajectory files
//
//   offset  size  field
//   0       4     magic "BSNK"
//   4       2     format version (u16)
//   6       8     n_steps (u64)
//   14      8     duration (f64)
//   22      8     origin (f64)
//   30      8(n+1) zeta
//   ...     8(n+1) tip
//   end-4   4     CRC-32 of every preceding byte
//
// All fields little-endian.

inline constexpr std::uint16_t kTrajectoryFormatVersion = 1;

std::uint32_t crc32(std::span<const unsigned char> bytes) noexcept;

std::vector<unsigned char> encode_trajectory(const SnakeTrajectory& w);
SnakeTrajectory decode_trajectory(std::span<const unsigned char> bytes);

void write_trajectory(const SnakeTrajectory& w, const std::filesystem::path& path);
SnakeTrajectory read_trajectory(const std::filesystem::path& path);

/// Writes `content` to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace bsphere
