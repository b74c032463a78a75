#include "mhdlab/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mhdlab/error.hpp"

namespace mhdlab {

namespace {

void put_u32(std::string& b, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) b.push_back(static_cast<char>((v >> s) & 0xFFu));
}

void put_u64(std::string& b, std::uint64_t v) {
  for (int s = 0; s < 64; s += 8) b.push_back(static_cast<char>((v >> s) & 0xFFu));
}

void put_f64(std::string& b, double v) { put_u64(b, std::bit_cast<std::uint64_t>(v)); }

void put_str(std::string& b, const std::string& s) {
  put_u32(b, static_cast<std::uint32_t>(s.size()));
  b += s;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw IoError(std::string("checkpoint truncated in ") + what);
  }
  std::uint64_t uint(int width, const char* what) {
    unsigned char raw[8];
    bytes(reinterpret_cast<char*>(raw), static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int k = width - 1; k >= 0; --k) v = (v << 8) | raw[k];
    return v;
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(uint(4, what)); }
  std::uint64_t u64(const char* what) { return uint(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const std::uint32_t n = u32(what);
    if (n > 4096) throw IoError(std::string("checkpoint string too long in ") + what);
    std::string s(n, '\0');
    if (n > 0) bytes(s.data(), n, what);
    return s;
  }

 private:
  std::istream& in_;
};

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  auto tmp = path;
  tmp += ".tmp";
  return tmp;
}

}  // namespace

std::size_t write_checkpoint(const StateField& state, const Grid& grid, double time, const std::string& eos_tag,
                             std::ostream& sink) {
  if (state.n1() != grid.n1 || state.n2() != grid.n2) throw PreconditionError("checkpoint: state and grid disagree");
  std::string b;
  b.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  put_u32(b, kCheckpointVersion);
  put_u32(b, static_cast<std::uint32_t>(grid.n1));
  put_u32(b, static_cast<std::uint32_t>(grid.n2));
  put_f64(b, grid.L1);
  put_f64(b, grid.L2);
  put_f64(b, grid.sigma.blend_start());
  put_f64(b, grid.sigma.blend_end());
  put_f64(b, state.lambda);
  put_f64(b, time);
  put_u32(b, static_cast<std::uint32_t>(kNumComponents));
  for (const char* name : kComponentNames) put_str(b, name);
  put_str(b, eos_tag);
  const std::uint64_t payload = 8ull * kNumComponents * static_cast<std::uint64_t>(grid.n1) * grid.n2;
  put_u64(b, payload);
  b.reserve(b.size() + payload);
  for (int c = 0; c < kNumComponents; ++c)
    for (int i = 0; i < grid.n1; ++i)
      for (int j = 0; j < grid.n2; ++j) put_f64(b, state[c](i, j));
  sink.write(b.data(), static_cast<std::streamsize>(b.size()));
  if (!sink) throw IoError("checkpoint write failed");
  return b.size();
}

Checkpoint read_checkpoint(std::istream& source) {
  Reader r(source);
  char magic[sizeof(kCheckpointMagic)];
  r.bytes(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) throw IoError("not a checkpoint (bad magic)");
  Checkpoint ck;
  CheckpointHeader& h = ck.header;
  h.version = r.u32("version");
  if (h.version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(h.version));
  }
  h.n1 = r.u32("n1");
  h.n2 = r.u32("n2");
  h.L1 = r.f64("L1");
  h.L2 = r.f64("L2");
  h.sigma_blend_start = r.f64("sigma");
  h.sigma_blend_end = r.f64("sigma");
  h.lambda = r.f64("lambda");
  h.time = r.f64("time");
  const std::uint32_t ncomp = r.u32("component count");
  if (ncomp != static_cast<std::uint32_t>(kNumComponents)) {
    throw IoError("checkpoint has " + std::to_string(ncomp) + " components, expected " +
                  std::to_string(kNumComponents));
  }
  for (std::uint32_t c = 0; c < ncomp; ++c) {
    h.component_names.push_back(r.str("component names"));
    if (h.component_names.back() != kComponentNames[c]) {
      throw IoError("checkpoint component " + std::to_string(c) + " is '" + h.component_names.back() + "'");
    }
  }
  h.eos_tag = r.str("eos tag");
  h.payload_bytes = r.u64("payload length");
  const std::uint64_t expected = 8ull * ncomp * static_cast<std::uint64_t>(h.n1) * h.n2;
  if (h.payload_bytes != expected) {
    throw IoError("checkpoint payload length " + std::to_string(h.payload_bytes) + " != 8 * components * n1 * n2 = " +
                  std::to_string(expected));
  }
  try {
    ck.grid = build_grid(static_cast<int>(h.n1), static_cast<int>(h.n2), h.L1, h.L2);
  } catch (const PreconditionError& e) {
    throw IoError(std::string("checkpoint grid invalid: ") + e.what());
  }
  if (ck.grid.sigma.blend_start() != h.sigma_blend_start || ck.grid.sigma.blend_end() != h.sigma_blend_end) {
    throw IoError("checkpoint sigma parameters do not match this build");
  }
  std::string payload(static_cast<std::size_t>(h.payload_bytes), '\0');
  r.bytes(payload.data(), payload.size(), "payload");
  if (source.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes after checkpoint payload");

  ck.state = StateField(ck.grid, h.lambda);
  std::size_t off = 0;
  for (int c = 0; c < kNumComponents; ++c)
    for (int i = 0; i < ck.grid.n1; ++i)
      for (int j = 0; j < ck.grid.n2; ++j) {
        std::uint64_t v = 0;
        for (int k = 7; k >= 0; --k) v = (v << 8) | static_cast<unsigned char>(payload[off + static_cast<std::size_t>(k)]);
        off += 8;
        const double x = std::bit_cast<double>(v);
        if (!std::isfinite(x)) ++ck.non_finite;
        ck.state[c](i, j) = x;
      }
  return ck;
}

std::size_t save_checkpoint(const std::filesystem::path& path, const StateField& state, const Grid& grid, double time,
                            const std::string& eos_tag) {
  std::ostringstream os(std::ios::binary);
  const std::size_t n = write_checkpoint(state, grid, time, eos_tag, os);
  write_file_atomic(path, os.str());
  return n;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw IoError("not a number: '" + std::string(s) + "'");
  }
  return x;
}

void write_csv(const CsvTable& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw IoError("CSV row width differs from the header");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      cells.push_back(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  if (!std::getline(in, line)) throw IoError("CSV is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) throw IoError("ragged CSV row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mhdlab
