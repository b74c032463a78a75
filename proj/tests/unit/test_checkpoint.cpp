#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "mhdlab/checkpoint.hpp"
#include "mhdlab/error.hpp"

using namespace mhdlab;

namespace {

StateField random_state(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  StateField u(g, 7.25);
  for (int c = 0; c < kNumComponents; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) u[c](i, j) = N(rng) * std::pow(10.0, static_cast<double>(rng() % 40) - 20.0);
  return u;
}

std::string serialize(const StateField& u, const Grid& g, double t = 0.125) {
  std::ostringstream os(std::ios::binary);
  write_checkpoint(u, g, t, "exp", os);
  return os.str();
}

}  // namespace

TEST(Checkpoint, ZeroStatePayloadSize) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  const std::string bytes = serialize(StateField(g, 1.0), g);
  std::istringstream in(bytes, std::ios::binary);
  const Checkpoint ck = read_checkpoint(in);
  EXPECT_EQ(ck.header.payload_bytes, 4032u);
  EXPECT_EQ(bytes.size() - 4032u, bytes.find(std::string(4032, '\0'), bytes.size() - 4032u));
}

TEST(Checkpoint, RoundTripIsBitwise) {
  const Grid g = build_grid(17, 12, 1.0, 2.0);
  const StateField u = random_state(g, 3);
  const std::string bytes = serialize(u, g, 0.3);
  std::istringstream in(bytes, std::ios::binary);
  const Checkpoint ck = read_checkpoint(in);
  EXPECT_EQ(ck.header.time, 0.3);
  EXPECT_EQ(ck.state.lambda, 7.25);
  EXPECT_EQ(ck.header.eos_tag, "exp");
  EXPECT_EQ(ck.grid.n1, 17);
  EXPECT_EQ(ck.grid.L2, 2.0);
  for (int c = 0; c < kNumComponents; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        const double a = u[c](i, j), b = ck.state[c](i, j);
        EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
      }
  EXPECT_EQ(serialize(ck.state, ck.grid, 0.3), bytes);
}

TEST(Checkpoint, FixedLittleEndianLayout) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  const std::string bytes = serialize(StateField(g, 1.0), g);
  EXPECT_EQ(bytes.substr(0, 8), std::string("MHDCKPT\0", 8));
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);  // version, low byte first
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 9u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 8u);
}

TEST(Checkpoint, CorruptedMagicRejected) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  std::string bytes = serialize(StateField(g, 1.0), g);
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_checkpoint(in), IoError);
}

TEST(Checkpoint, TruncatedPayloadRejected) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  std::string bytes = serialize(random_state(g, 1), g);
  bytes.resize(bytes.size() - 8);
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_checkpoint(in), IoError);
}

TEST(Checkpoint, NonFiniteValuesFlagged) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  StateField u(g, 1.0);
  u[kV2](3, 3) = std::nan("");
  std::istringstream in(serialize(u, g), std::ios::binary);
  EXPECT_EQ(read_checkpoint(in).non_finite, 1u);
}

TEST(Checkpoint, FileRoundTrip) {
  const Grid g = build_grid(9, 8, 1.0, 1.0);
  const StateField u = random_state(g, 5);
  const auto path = std::filesystem::temp_directory_path() / "mhdlab_test_ckpt" / "a.ckpt";
  save_checkpoint(path, u, g, 1.5, "exp");
  const Checkpoint ck = load_checkpoint(path);
  EXPECT_EQ(ck.state[kH3](4, 5), u[kH3](4, 5));
  std::filesystem::remove_all(path.parent_path());
  EXPECT_THROW(load_checkpoint(path), IoError);
}

TEST(Csv, RoundTripReproducesValues) {
  CsvTable t;
  t.header = {"lambda", "t", "err"};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int r = 0; r < 50; ++r) t.rows.push_back({U(rng), U(rng) * 1e-300, U(rng) * 1e300});
  t.rows.push_back({0.1, 1.0 / 3.0, -0.0});
  std::ostringstream os;
  write_csv(t, os);
  std::istringstream in(os.str());
  const CsvTable back = read_csv(in);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(std::memcmp(&back.rows[r][c], &t.rows[r][c], 8), 0);
  EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

TEST(Csv, RaggedRowsRejected) {
  std::istringstream in("a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(in), IoError);
  std::istringstream bad("a\nx1\n");
  EXPECT_THROW(read_csv(bad), IoError);
}
