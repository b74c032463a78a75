#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mhdlab/grid.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

inline constexpr char kCheckpointMagic[8] = {'M', 'H', 'D', 'C', 'K', 'P', 'T', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Self-describing header: a reader can rebuild the grid from it alone.
///
/// Layout (all integers and floats little-endian):
///   magic[8] | u32 version | u32 n1 | u32 n2 | f64 L1 | f64 L2
///   | f64 sigma_blend_start | f64 sigma_blend_end | f64 lambda | f64 time
///   | u32 ncomp | ncomp x (u32 len, bytes) | u32 len, eos tag bytes
///   | u64 payload_bytes | payload
/// The payload is f64 values, component-major, x2 fastest, interior nodes only.
struct CheckpointHeader {
  std::uint32_t version = kCheckpointVersion;
  std::uint32_t n1 = 0;
  std::uint32_t n2 = 0;
  double L1 = 0.0;
  double L2 = 0.0;
  double sigma_blend_start = 0.0;
  double sigma_blend_end = 0.0;
  double lambda = 1.0;
  double time = 0.0;
  std::vector<std::string> component_names;
  std::string eos_tag;
  std::uint64_t payload_bytes = 0;
};

struct Checkpoint {
  CheckpointHeader header;
  Grid grid;
  StateField state;        ///< interior values as stored; ghost rows zero
  std::size_t non_finite = 0;  ///< count of NaN/inf payload values
};

/// Returns the number of bytes written.
std::size_t write_checkpoint(const StateField& state, const Grid& grid, double time, const std::string& eos_tag,
                             std::ostream& sink);

/// Throws IoError on magic/version mismatch, inconsistent sizes or a
/// truncated payload.
Checkpoint read_checkpoint(std::istream& source);

/// File forms. save_checkpoint writes to a temporary sibling and renames.
std::size_t save_checkpoint(const std::filesystem::path& path, const StateField& state, const Grid& grid, double time,
                            const std::string& eos_tag);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
/// Throws IoError unless the whole of `s` is a number.
double parse_double(std::string_view s);

/// Comma-separated, header row, LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, std::ostream& out);
/// Throws IoError on ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mhdlab
