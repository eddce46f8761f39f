#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"
#include "bsphere/io.hpp"

using namespace bsphere;
namespace fs = std::filesystem;

namespace {

SnakeTrajectory sample(std::size_t n) {
    RandomStream rng(70, n);
    return sample_normalized_snake(rng, n);
}

void put_u16(std::vector<unsigned char>& b, std::size_t at, std::uint16_t v) {
    b[at] = static_cast<unsigned char>(v & 0xff);
    b[at + 1] = static_cast<unsigned char>(v >> 8);
}

void reseal(std::vector<unsigned char>& b) {
    const std::uint32_t c = crc32(std::span<const unsigned char>(b.data(), b.size() - 4));
    for (int k = 0; k < 4; ++k) b[b.size() - 4 + k] = static_cast<unsigned char>(c >> (8 * k));
}

fs::path temp_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / (std::string("bsphere_io_") + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST(Crc32, StandardCheckValue) {
    const char* s = "123456789";
    EXPECT_EQ(crc32(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s), 9)), 0xCBF43926u);
}

TEST(Trajectory, RoundTripIsBitExact) {
    SnakeTrajectory w = sample(257);
    w.origin = -0.0;
    w.tip[3] = std::numeric_limits<double>::denorm_min();
    const auto bytes = encode_trajectory(w);
    EXPECT_EQ(bytes.size(), 30 + 16 * 258 + 4u);
    EXPECT_EQ(std::memcmp(bytes.data(), "BSNK", 4), 0);
    const SnakeTrajectory r = decode_trajectory(bytes);
    EXPECT_EQ(std::memcmp(r.tip.data(), w.tip.data(), w.tip.size() * 8), 0);
    EXPECT_EQ(std::memcmp(r.zeta.data(), w.zeta.data(), w.zeta.size() * 8), 0);
    EXPECT_TRUE(std::signbit(r.origin));
    EXPECT_EQ(r.duration, w.duration);
}

TEST(Trajectory, FileRoundTrip) {
    const fs::path dir = temp_dir("roundtrip");
    const SnakeTrajectory w = sample(64);
    write_trajectory(w, dir / "w.bsnk");
    EXPECT_EQ(read_trajectory(dir / "w.bsnk"), w);
    fs::remove_all(dir);
}

TEST(Trajectory, TruncationAndBitFlipsAreCorruption) {
    const auto bytes = encode_trajectory(sample(32));
    for (std::size_t keep : {std::size_t{0}, std::size_t{3}, std::size_t{29}, bytes.size() - 1}) {
        std::vector<unsigned char> b(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(keep));
        EXPECT_THROW(decode_trajectory(b), CorruptFileError) << keep;
    }
    for (std::size_t at : {std::size_t{0}, std::size_t{5}, std::size_t{100}, bytes.size() - 2}) {
        auto b = bytes;
        b[at] ^= 0x10;
        EXPECT_THROW(decode_trajectory(b), CorruptFileError) << at;
    }
}

TEST(Trajectory, SealedButInconsistentSizeIsCorruption) {
    auto b = encode_trajectory(sample(32));
    b[6] = 40;  // n_steps
    reseal(b);
    EXPECT_THROW(decode_trajectory(b), CorruptFileError);
}

TEST(Trajectory, UnknownVersionIsReported) {
    auto b = encode_trajectory(sample(16));
    put_u16(b, 4, 2);
    reseal(b);
    EXPECT_THROW(decode_trajectory(b), UnsupportedVersionError);
    put_u16(b, 4, 0);
    reseal(b);
    EXPECT_THROW(decode_trajectory(b), UnsupportedVersionError);
}

TEST(Trajectory, HandBuiltVersionOneFileReads) {
    // n = 1, duration 2, origin 0.5, zeta {0, 0}, tip {0.5, 0.25}
    std::vector<unsigned char> b{'B', 'S', 'N', 'K', 1, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    auto put_f64 = [&](double v) {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        for (int k = 0; k < 8; ++k) b.push_back(static_cast<unsigned char>(u >> (8 * k)));
    };
    for (double v : {2.0, 0.5, 0.0, 0.0, 0.5, 0.25}) put_f64(v);
    b.resize(b.size() + 4);
    reseal(b);
    const SnakeTrajectory w = decode_trajectory(b);
    EXPECT_EQ(w.duration, 2.0);
    EXPECT_EQ(w.origin, 0.5);
    EXPECT_EQ(w.tip, (std::vector<double>{0.5, 0.25}));
}

TEST(Trajectory, MissingFile) {
    EXPECT_THROW(read_trajectory("/nonexistent/dir/w.bsnk"), CorruptFileError);
}

TEST(Csv, RealsRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308, 5e-324}) {
        const std::string s = format_real(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
}

TEST(Csv, WriterChecksRowWidth) {
    std::ostringstream os;
    CsvWriter csv(os, {"a", "b"});
    csv.row({"1", "2"});
    EXPECT_EQ(os.str(), "a,b\n1,2\n");
    EXPECT_THROW(csv.row({"1"}), ContractError);
}

TEST(Csv, EstimateCells) {
    EstimateReport r = make_report("x", 1.5, 0.1, 10, 3);
    r.config_hash = "abc";
    const auto cells = estimate_csv_cells(r);
    ASSERT_EQ(cells.size(), estimate_csv_header().size());
    EXPECT_EQ(cells.front(), "x");
    EXPECT_EQ(cells.back(), "abc");
}

TEST(AtomicWrite, WritesAndReportsFailure) {
    const fs::path dir = temp_dir("atomic");
    write_file_atomic(dir / "sub" / "a.txt", "hello");
    std::ifstream is(dir / "sub" / "a.txt");
    std::string s;
    std::getline(is, s);
    EXPECT_EQ(s, "hello");
    std::ofstream(dir / "blocker") << "x";
    EXPECT_THROW(write_file_atomic(dir / "blocker" / "a.txt", "x"), OutputError);
    fs::remove_all(dir);
}
