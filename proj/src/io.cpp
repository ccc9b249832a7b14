#include "dlrk/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dlrk {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file, std::ios::openmode mode = std::ios::out) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, mode);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const fs::path& file, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(file, mode);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return in;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

void put_le32(char* dst, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) dst[b] = static_cast<char>((u >> (8 * b)) & 0xff);
}

std::int32_t get_le32(const char* src) {
  std::uint32_t u = 0;
  for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[b])) << (8 * b);
  return static_cast<std::int32_t>(u);
}

constexpr int kDumpVersion = 1;

}  // namespace

void write_snapshot_csv(const fs::path& file, const SpatialGrid& xg, const MacroFields& m) {
  require(m.cells() == xg.n_x, "write_snapshot_csv: grid mismatch");
  auto out = open_out(file);
  out.precision(17);
  out << "x,rho,u1,u2,T\n";
  for (Index i = 0; i < xg.n_x; ++i) {
    const double u2 = m.dim() > 1 ? m.u(i, 1) : 0.0;
    out << xg.center(i) << ',' << m.rho(i) << ',' << m.u(i, 0) << ',' << u2 << ',' << m.T(i) << '\n';
  }
}

SnapshotTable read_snapshot_csv(const fs::path& file) {
  auto in = open_in(file);
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,rho,u1,u2,T", 0) != 0) throw std::runtime_error(file.string() + ": unexpected header");
  std::vector<std::array<double, 5>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 5) throw std::runtime_error(file.string() + ": malformed row");
    std::array<double, 5> r{};
    for (int c = 0; c < 5; ++c) r[c] = std::stod(cells[c]);
    rows.push_back(r);
  }
  SnapshotTable t;
  const auto n = static_cast<Index>(rows.size());
  t.x.resize(n);
  t.rho.resize(n);
  t.u1.resize(n);
  t.u2.resize(n);
  t.T.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    t.x(i) = r[0];
    t.rho(i) = r[1];
    t.u1(i) = r[2];
    t.u2(i) = r[3];
    t.T(i) = r[4];
  }
  return t;
}

void write_snapshot_index(const fs::path& file, const std::vector<SnapshotEntry>& entries) {
  auto out = open_out(file);
  out.precision(17);
  out << "step,t,file\n";
  for (const auto& e : entries) out << e.step << ',' << e.t << ',' << e.file << '\n';
}

std::vector<SnapshotEntry> read_snapshot_index(const fs::path& file) {
  auto in = open_in(file);
  std::string line;
  std::getline(in, line);
  std::vector<SnapshotEntry> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3) throw std::runtime_error(file.string() + ": malformed row");
    out.push_back({std::stoll(cells[0]), std::stod(cells[1]), cells[2]});
  }
  return out;
}

void write_rank_history(const fs::path& file, const std::vector<RankSample>& rows) {
  auto out = open_out(file);
  out.precision(17);
  out << "step,t,rank_before_trunc,rank_after_trunc,augmented\n";
  for (const auto& r : rows)
    out << r.step << ',' << r.t << ',' << r.rank_before_trunc << ',' << r.rank_after_trunc << ',' << r.augmented
        << '\n';
}

void write_full_dump(const fs::path& file, const Matrix& f, Index n_v, int dim) {
  Index nv_total = 1;
  for (int d = 0; d < dim; ++d) nv_total *= n_v;
  require(f.cols() == nv_total, "write_full_dump: velocity size mismatch");
  std::array<char, 32> header{};
  std::memcpy(header.data(), "DLRK", 4);
  put_le32(header.data() + 4, kDumpVersion);
  put_le32(header.data() + 8, static_cast<std::int32_t>(f.rows()));
  put_le32(header.data() + 12, static_cast<std::int32_t>(n_v));
  put_le32(header.data() + 16, dim);
  auto out = open_out(file, std::ios::binary);
  out.write(header.data(), header.size());
  std::vector<char> buf(static_cast<std::size_t>(f.size()) * 8);
  std::size_t pos = 0;
  for (Index i = 0; i < f.rows(); ++i)
    for (Index j = 0; j < f.cols(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(f(i, j));
      for (int b = 0; b < 8; ++b) buf[pos++] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

FullDump read_full_dump(const fs::path& file) {
  auto in = open_in(file, std::ios::binary);
  std::array<char, 32> header{};
  in.read(header.data(), header.size());
  if (!in || std::memcmp(header.data(), "DLRK", 4) != 0) throw std::runtime_error(file.string() + ": bad magic");
  FullDump d;
  d.version = get_le32(header.data() + 4);
  d.n_x = get_le32(header.data() + 8);
  d.n_v = get_le32(header.data() + 12);
  d.dim = get_le32(header.data() + 16);
  Index cols = 1;
  for (int k = 0; k < d.dim; ++k) cols *= d.n_v;
  d.f.resize(d.n_x, cols);
  std::vector<char> buf(static_cast<std::size_t>(d.f.size()) * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!in) throw std::runtime_error(file.string() + ": truncated payload");
  std::size_t pos = 0;
  for (Index i = 0; i < d.n_x; ++i)
    for (Index j = 0; j < cols; ++j) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * b);
      d.f(i, j) = std::bit_cast<double>(bits);
    }
  return d;
}

}  // namespace dlrk
