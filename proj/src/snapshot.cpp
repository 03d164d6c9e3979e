#include "hrwave/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace hrwave {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw std::runtime_error("snapshot truncated");
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

// Natural (row-major, -N first) position p -> storage index.
Eigen::Index storage_index(const Layout& layout, Eigen::Index p) {
  const int side = int(layout.side());
  if (layout.dim == 1) return layout.index({int(p) - layout.N});
  return layout.index({int(p / side) - layout.N, int(p % side) - layout.N});
}

void put_field(std::ostream& out, const SpectralField<double>& f) {
  const Layout layout = f.layout();
  for (Eigen::Index p = 0; p < layout.size(); ++p) {
    const auto c = f.coeffs[storage_index(layout, p)];
    put(out, c.real());
    put(out, c.imag());
  }
}

SpectralField<double> get_field(std::istream& in, int dim, int N) {
  auto f = SpectralField<double>::zero(dim, N);
  const Layout layout = f.layout();
  for (Eigen::Index p = 0; p < layout.size(); ++p) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    f.coeffs[storage_index(layout, p)] = {re, im};
  }
  f.hermitian = is_hermitian(f);
  return f;
}

}  // namespace

void write_snapshot(std::ostream& out, const Snapshot& snap) {
  const auto& w = snap.state;
  if (w.u.layout() != w.v.layout()) throw std::invalid_argument("snapshot components must share a layout");
  out.write("HRWV", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, std::uint32_t(w.dim()));
  put<std::uint32_t>(out, std::uint32_t(w.N()));
  put<double>(out, snap.time);
  put_field(out, w.u);
  put_field(out, w.v);
  if (!out) throw std::runtime_error("snapshot write failed");
}

Snapshot read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "HRWV", 4) != 0) throw std::runtime_error("not an HRWV snapshot");
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
  }
  const int dim = int(get<std::uint32_t>(in));
  const int N = int(get<std::uint32_t>(in));
  validate_layout({dim, N});
  Snapshot snap;
  snap.time = get<double>(in);
  snap.state.u = get_field(in, dim, N);
  snap.state.v = get_field(in, dim, N);
  return snap;
}

void save_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(out, snap);
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace hrwave
