#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dlrk/common.hpp"
#include "dlrk/grid.hpp"
#include "dlrk/moments.hpp"

namespace dlrk {

/// One row per cell: x,rho,u1,u2,T with 17 significant digits (u2 = 0 for one velocity dimension).
void write_snapshot_csv(const std::filesystem::path& file, const SpatialGrid& xg, const MacroFields& m);

struct SnapshotTable {
  Vector x, rho, u1, u2, T;
};
SnapshotTable read_snapshot_csv(const std::filesystem::path& file);

struct SnapshotEntry {
  Index step = 0;
  double t = 0.0;
  std::string file;
};
void write_snapshot_index(const std::filesystem::path& file, const std::vector<SnapshotEntry>& entries);
std::vector<SnapshotEntry> read_snapshot_index(const std::filesystem::path& file);

struct RankSample {
  Index step = 0;
  double t = 0.0;
  Index rank_before_trunc = 0;
  Index rank_after_trunc = 0;
  Index augmented = 0;
};
void write_rank_history(const std::filesystem::path& file, const std::vector<RankSample>& rows);

/// Flat little-endian float64 dump, row-major (x, then v1, then v2), behind a 32-byte header.
void write_full_dump(const std::filesystem::path& file, const Matrix& f, Index n_v, int dim);

struct FullDump {
  int version = 0;
  Index n_x = 0;
  Index n_v = 0;
  int dim = 0;
  Matrix f;
};
FullDump read_full_dump(const std::filesystem::path& file);

}  // namespace dlrk
