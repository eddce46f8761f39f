#include "bsphere/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

#include "bsphere/errors.hpp"

namespace bsphere {

static_assert(std::endian::native == std::endian::little,
              "trajectory encoding assumes a little-endian host");

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string> header)
    : CsvWriter(os, std::vector<std::string>(header)) {}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(&os), columns_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw ContractError("CsvWriter: row width differs from header");
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) *os_ << ',';
        *os_ << cells[k];
    }
    *os_ << '\n';
}

std::vector<std::string> estimate_csv_header() {
    return {"name",           "estimate",  "std_error",          "ci_low",
            "ci_high",        "replicas",  "seed",               "window_tail_mass",
            "sigma_cut",      "dropped_rate_bound", "dropped_bias_bound", "config_hash"};
}

std::vector<std::string> estimate_csv_cells(const EstimateReport& r) {
    const TruncationReport t = r.truncation.value_or(TruncationReport{});
    return {r.name,
            format_real(r.estimate),
            format_real(r.std_error),
            format_real(r.ci95.first),
            format_real(r.ci95.second),
            std::to_string(r.replicas),
            std::to_string(r.seed),
            format_real(r.window_tail_mass),
            format_real(t.sigma_cut),
            format_real(t.dropped_rate_bound),
            format_real(t.dropped_functional_bias_bound),
            r.config_hash};
}

std::uint32_t crc32(std::span<const unsigned char> bytes) noexcept {
    uLong c = ::crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
        c = ::crc32(c, bytes.data() + off, chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(c);
}

namespace {

constexpr std::size_t kHeaderSize = 30;

template <class T>
std::size_t put(std::vector<unsigned char>& out, std::size_t off, T v) {
    std::memcpy(out.data() + off, &v, sizeof(T));
    return off + sizeof(T);
}

template <class T>
T get(std::span<const unsigned char> in, std::size_t off) {
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    return v;
}

} // namespace

std::vector<unsigned char> encode_trajectory(const SnakeTrajectory& w) {
    const std::size_t n = w.n_steps();
    if (w.zeta.size() != n + 1 || w.tip.size() != n + 1)
        throw ContractError("encode_trajectory: zeta and tip sizes differ");
    std::vector<unsigned char> out(kHeaderSize + 16 * (n + 1) + 4);
    std::memcpy(out.data(), "BSNK", 4);
    std::size_t off = put<std::uint16_t>(out, 4, kTrajectoryFormatVersion);
    off = put<std::uint64_t>(out, off, n);
    off = put<double>(out, off, w.duration);
    off = put<double>(out, off, w.origin);
    std::memcpy(out.data() + off, w.zeta.data(), 8 * (n + 1));
    std::memcpy(out.data() + off + 8 * (n + 1), w.tip.data(), 8 * (n + 1));
    const std::size_t body = out.size() - 4;
    put<std::uint32_t>(out, body, crc32(std::span<const unsigned char>(out.data(), body)));
    return out;
}

SnakeTrajectory decode_trajectory(std::span<const unsigned char> in) {
    if (in.size() < kHeaderSize + 4) throw CorruptFileError("trajectory file truncated (header)");
    const std::size_t body = in.size() - 4;
    if (crc32(in.first(body)) != get<std::uint32_t>(in, body))
        throw CorruptFileError("trajectory file checksum mismatch");
    if (std::memcmp(in.data(), "BSNK", 4) != 0) throw CorruptFileError("not a trajectory file (magic)");
    const auto version = get<std::uint16_t>(in, 4);
    if (version == 0 || version > kTrajectoryFormatVersion)
        throw UnsupportedVersionError("trajectory format version " + std::to_string(version) +
                                      " is not supported (newest known: " +
                                      std::to_string(kTrajectoryFormatVersion) + ")");
    const auto n = get<std::uint64_t>(in, 6);
    if (n == 0 || n > (body - kHeaderSize) / 16 || body != kHeaderSize + 16 * (n + 1))
        throw CorruptFileError("trajectory file size does not match n_steps");
    SnakeTrajectory w;
    w.duration = get<double>(in, 14);
    w.origin = get<double>(in, 22);
    w.zeta.resize(n + 1);
    w.tip.resize(n + 1);
    std::memcpy(w.zeta.data(), in.data() + kHeaderSize, 8 * (n + 1));
    std::memcpy(w.tip.data(), in.data() + kHeaderSize + 8 * (n + 1), 8 * (n + 1));
    return w;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw OutputError("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw OutputError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw OutputError("cannot rename onto " + path.string() + ": " + ec.message());
}

void write_trajectory(const SnakeTrajectory& w, const std::filesystem::path& path) {
    const auto bytes = encode_trajectory(w);
    write_file_atomic(path, std::string(bytes.begin(), bytes.end()));
}

SnakeTrajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CorruptFileError("cannot open trajectory file " + path.string());
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                           std::istreambuf_iterator<char>());
    return decode_trajectory(bytes);
}

} // namespace bsphere
