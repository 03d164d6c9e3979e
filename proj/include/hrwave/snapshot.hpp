#pragma once

// Binary snapshot of a PairField:
//   "HRWV" | u32 version (1) | u32 dim | u32 N | f64 time |
//   u coefficients | v coefficients
// each coefficient a little-endian (re f64, im f64) pair, modes in row-major
// order from -N to N-1 per dimension.

#include <filesystem>
#include <iosfwd>

#include "hrwave/spectral.hpp"

namespace hrwave {

struct Snapshot {
  double time = 0;
  PairField<double> state;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(std::ostream& out, const Snapshot& snap);
Snapshot read_snapshot(std::istream& in);

void save_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace hrwave
