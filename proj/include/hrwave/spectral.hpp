#pragma once

// Fourier-spectral core on the periodic torus [0,1]^d, d in {1, 2}.
//
// A field of bandwidth N stores the 2N modes k in [-N, N-1] per dimension,
// laid out in FFT order (slot s holds k = s for s < N, k = s - 2N otherwise),
// row-major over (k1, k2) in 2D. Its values on the grid D^d,
// D = {n / 2N : n = 0..2N-1}, are sum_k c_k exp(2 pi i k.x).
//
// The stored coefficients are the function: norms, products and embeddings
// use them as-is. The one exception is symmetric_embed(), which reads a
// Nyquist coefficient (k_i = -N) as the real cosine it represents on the grid.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "hrwave/fft.hpp"

namespace hrwave {

template <typename Scalar>
using CoeffArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

constexpr int slot_of(int k, int N) noexcept { return k >= 0 ? k : k + 2 * N; }
constexpr int wavenumber(int slot, int N) noexcept { return slot < N ? slot : slot - 2 * N; }

/// Integer wave vector; k2 is ignored for 1D fields.
struct ModeIndex {
  int k1 = 0;
  int k2 = 0;
  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Shape of a coefficient or sample tensor.
struct Layout {
  int dim = 1;
  int N = 1;

  Eigen::Index side() const noexcept { return 2 * Eigen::Index(N); }
  Eigen::Index size() const noexcept { return dim == 1 ? side() : side() * side(); }

  bool contains(ModeIndex k) const noexcept {
    const auto in = [this](int c) { return c >= -N && c <= N - 1; };
    return in(k.k1) && (dim == 1 || in(k.k2));
  }
  Eigen::Index index(ModeIndex k) const noexcept {
    return dim == 1 ? slot_of(k.k1, N) : Eigen::Index(slot_of(k.k1, N)) * side() + slot_of(k.k2, N);
  }
  ModeIndex mode(Eigen::Index i) const noexcept {
    if (dim == 1) return {wavenumber(int(i), N), 0};
    return {wavenumber(int(i / side()), N), wavenumber(int(i % side()), N)};
  }
  friend bool operator==(const Layout&, const Layout&) = default;
};

inline void validate_layout(const Layout& layout) {
  if (layout.dim != 1 && layout.dim != 2) {
    throw std::invalid_argument("dimension must be 1 or 2, got " + std::to_string(layout.dim));
  }
  if (layout.N < 1 || !is_power_of_two(std::size_t(layout.N))) {
    throw std::invalid_argument("bandwidth must be a positive power of two, got " +
                                std::to_string(layout.N));
  }
}

/// Band-limited complex coefficient tensor (an element of the 2N-mode space).
template <typename Scalar = double>
struct SpectralField {
  int dim = 1;
  int N = 1;
  CoeffArray<Scalar> coeffs;
  /// Asserts c(-k) = conj(c(k)) modulo 2N, i.e. real grid samples.
  bool hermitian = true;

  static SpectralField zero(int dim, int N) {
    const Layout layout{dim, N};
    validate_layout(layout);
    return {dim, N, CoeffArray<Scalar>::Zero(layout.size()), true};
  }

  Layout layout() const noexcept { return {dim, N}; }
  std::complex<Scalar>& operator[](ModeIndex k) { return coeffs[layout().index(k)]; }
  const std::complex<Scalar>& operator[](ModeIndex k) const { return coeffs[layout().index(k)]; }
};

/// Real samples on the tensor grid D^d, row-major.
template <typename Scalar = double>
struct GridSamples {
  int dim = 1;
  int N = 1;
  RealArray<Scalar> values;
  Layout layout() const noexcept { return {dim, N}; }
};

template <typename Scalar = double>
struct ComplexSamples {
  int dim = 1;
  int N = 1;
  CoeffArray<Scalar> values;
  Layout layout() const noexcept { return {dim, N}; }
};

/// The first-order state (u, du/dt).
template <typename Scalar = double>
struct PairField {
  SpectralField<Scalar> u;
  SpectralField<Scalar> v;

  static PairField zero(int dim, int N) {
    return {SpectralField<Scalar>::zero(dim, N), SpectralField<Scalar>::zero(dim, N)};
  }
  int dim() const noexcept { return u.dim; }
  int N() const noexcept { return u.N; }
  Layout layout() const noexcept { return u.layout(); }
};

namespace detail {

template <typename Scalar>
void require_same_layout(const SpectralField<Scalar>& a, const SpectralField<Scalar>& b) {
  if (a.layout() != b.layout()) throw std::invalid_argument("field layouts differ");
}

}  // namespace detail

template <typename Scalar>
SpectralField<Scalar> operator+(const SpectralField<Scalar>& a, const SpectralField<Scalar>& b) {
  detail::require_same_layout(a, b);
  return {a.dim, a.N, a.coeffs + b.coeffs, a.hermitian && b.hermitian};
}
template <typename Scalar>
SpectralField<Scalar> operator-(const SpectralField<Scalar>& a, const SpectralField<Scalar>& b) {
  detail::require_same_layout(a, b);
  return {a.dim, a.N, a.coeffs - b.coeffs, a.hermitian && b.hermitian};
}
template <typename Scalar>
SpectralField<Scalar> operator*(Scalar s, const SpectralField<Scalar>& a) {
  return {a.dim, a.N, s * a.coeffs, a.hermitian};
}
template <typename Scalar>
PairField<Scalar> operator+(const PairField<Scalar>& a, const PairField<Scalar>& b) {
  return {a.u + b.u, a.v + b.v};
}
template <typename Scalar>
PairField<Scalar> operator-(const PairField<Scalar>& a, const PairField<Scalar>& b) {
  return {a.u - b.u, a.v - b.v};
}
template <typename Scalar>
PairField<Scalar> operator*(Scalar s, const PairField<Scalar>& a) {
  return {s * a.u, s * a.v};
}

/// |k|^2 for every slot of the layout.
template <typename Scalar = double>
RealArray<Scalar> squared_wavenumbers(const Layout& layout) {
  RealArray<Scalar> k2(layout.size());
  for (Eigen::Index i = 0; i < layout.size(); ++i) {
    const ModeIndex k = layout.mode(i);
    k2[i] = Scalar(k.k1) * k.k1 + (layout.dim == 2 ? Scalar(k.k2) * k.k2 : Scalar(0));
  }
  return k2;
}

/// Largest |c(k) - conj(c(-k mod 2N))|, scaled by max(1, max |c|).
template <typename Scalar>
Scalar hermitian_defect(const SpectralField<Scalar>& f) {
  const Layout layout = f.layout();
  const auto mirror = [&](int s) { return int((layout.side() - s) % layout.side()); };
  Scalar defect = 0;
  for (Eigen::Index i = 0; i < layout.size(); ++i) {
    Eigen::Index j;
    if (layout.dim == 1) {
      j = mirror(int(i));
    } else {
      j = Eigen::Index(mirror(int(i / layout.side()))) * layout.side() + mirror(int(i % layout.side()));
    }
    defect = std::max(defect, std::abs(f.coeffs[i] - std::conj(f.coeffs[j])));
  }
  const Scalar scale = f.coeffs.size() ? std::max(Scalar(1), f.coeffs.abs().maxCoeff()) : Scalar(1);
  return defect / scale;
}

template <typename Scalar>
bool is_hermitian(const SpectralField<Scalar>& f, Scalar tol = Scalar(1e-12)) {
  return hermitian_defect(f) <= tol;
}

/// Trigonometric interpolation I_N of point samples.
template <typename Scalar>
SpectralField<Scalar> forward_transform(const GridSamples<Scalar>& samples) {
  const Layout layout = samples.layout();
  validate_layout(layout);
  if (samples.values.size() != layout.size()) throw std::invalid_argument("sample count mismatch");
  if (!samples.values.allFinite()) throw std::invalid_argument("samples must be finite");
  CoeffArray<Scalar> data = samples.values.template cast<std::complex<Scalar>>();
  fft_nd<Scalar>({data.data(), std::size_t(data.size())}, layout.dim, std::size_t(layout.side()),
                 FftDirection::Forward);
  data /= Scalar(layout.size());
  return {layout.dim, layout.N, std::move(data), true};
}

template <typename Scalar>
SpectralField<Scalar> forward_transform(const ComplexSamples<Scalar>& samples) {
  const Layout layout = samples.layout();
  validate_layout(layout);
  if (samples.values.size() != layout.size()) throw std::invalid_argument("sample count mismatch");
  CoeffArray<Scalar> data = samples.values;
  fft_nd<Scalar>({data.data(), std::size_t(data.size())}, layout.dim, std::size_t(layout.side()),
                 FftDirection::Forward);
  data /= Scalar(layout.size());
  return {layout.dim, layout.N, std::move(data), false};
}

template <typename Scalar>
ComplexSamples<Scalar> inverse_transform_complex(const SpectralField<Scalar>& field) {
  const Layout layout = field.layout();
  validate_layout(layout);
  if (field.coeffs.size() != layout.size()) throw std::invalid_argument("coefficient count mismatch");
  CoeffArray<Scalar> data = field.coeffs;
  fft_nd<Scalar>({data.data(), std::size_t(data.size())}, layout.dim, std::size_t(layout.side()),
                 FftDirection::Inverse);
  return {layout.dim, layout.N, std::move(data)};
}

/// Grid values of the trigonometric polynomial (real part).
template <typename Scalar>
GridSamples<Scalar> inverse_transform(const SpectralField<Scalar>& field) {
  auto complex = inverse_transform_complex(field);
  return {complex.dim, complex.N, complex.values.real()};
}

/// Re-store at bandwidth M: truncates to [-M, M-1]^d or zero-pads.
template <typename Scalar>
SpectralField<Scalar> resize(const SpectralField<Scalar>& field, int M) {
  const Layout from = field.layout();
  const Layout to{field.dim, M};
  validate_layout(to);
  if (M == field.N) return field;
  SpectralField<Scalar> out{field.dim, M, CoeffArray<Scalar>::Zero(to.size()), field.hermitian};
  const int common = std::min(field.N, M);
  if (field.dim == 1) {
    for (int k = -common; k < common; ++k) out.coeffs[to.index({k})] = field.coeffs[from.index({k})];
  } else {
    for (int k1 = -common; k1 < common; ++k1) {
      for (int k2 = -common; k2 < common; ++k2) {
        out.coeffs[to.index({k1, k2})] = field.coeffs[from.index({k1, k2})];
      }
    }
  }
  if (M < field.N && field.hermitian) out.hermitian = is_hermitian(out);
  return out;
}

/// Embeds into bandwidth K > N reading each Nyquist coefficient c at k_i = -N
/// as c cos(2 pi N x_i): half stays at -N, half moves to +N. Grid values on
/// D^d are unchanged and real fields stay real everywhere.
template <typename Scalar>
SpectralField<Scalar> symmetric_embed(const SpectralField<Scalar>& field, int K) {
  if (K <= field.N) throw std::invalid_argument("symmetric_embed needs a strictly larger bandwidth");
  const Layout from = field.layout();
  const Layout to{field.dim, K};
  validate_layout(to);
  const int N = field.N;
  SpectralField<Scalar> out{field.dim, K, CoeffArray<Scalar>::Zero(to.size()), field.hermitian};
  if (field.dim == 1) {
    for (int k = -N + 1; k < N; ++k) out.coeffs[to.index({k})] = field.coeffs[from.index({k})];
    const auto c = field.coeffs[from.index({-N})] / Scalar(2);
    out.coeffs[to.index({-N})] += c;
    out.coeffs[to.index({N})] += c;
    return out;
  }
  for (int k1 = -N; k1 < N; ++k1) {
    for (int k2 = -N; k2 < N; ++k2) {
      const auto c = field.coeffs[from.index({k1, k2})];
      const bool n1 = k1 == -N;
      const bool n2 = k2 == -N;
      const Scalar share = Scalar(1) / Scalar((n1 ? 2 : 1) * (n2 ? 2 : 1));
      for (int s1 = 0; s1 < (n1 ? 2 : 1); ++s1) {
        for (int s2 = 0; s2 < (n2 ? 2 : 1); ++s2) {
          out.coeffs[to.index({s1 ? N : k1, s2 ? N : k2})] += share * c;
        }
      }
    }
  }
  return out;
}

/// L2 projection Pi_M: keeps modes with max_i |k_i| <= M, storage unchanged.
template <typename Scalar>
SpectralField<Scalar> project(const SpectralField<Scalar>& field, int M) {
  if (M < 1) throw std::invalid_argument("projection bandwidth must be >= 1");
  if (M >= field.N) return field;
  SpectralField<Scalar> out = field;
  const Layout layout = field.layout();
  for (Eigen::Index i = 0; i < layout.size(); ++i) {
    const ModeIndex k = layout.mode(i);
    const int kmax = layout.dim == 1 ? std::abs(k.k1) : std::max(std::abs(k.k1), std::abs(k.k2));
    if (kmax > M) out.coeffs[i] = 0;
  }
  return out;
}

/// Pi_{(N1, N2]} = Pi_{N2} - Pi_{N1}.
template <typename Scalar>
SpectralField<Scalar> band(const SpectralField<Scalar>& field, int N1, int N2) {
  if (N1 < 1 || N2 <= N1) {
    throw std::invalid_argument("band requires N2 > N1 >= 1, got (" + std::to_string(N1) + ", " +
                                std::to_string(N2) + "]");
  }
  const auto high = project(field, N2);
  const auto low = project(field, N1);
  return high - low;
}

/// Zeros every slot with some k_i = -N, leaving the symmetric block |k_i| <= N-1.
/// A field that only failed the symmetry test through those slots regains
/// its hermitian flag.
template <typename Scalar>
void clear_nyquist(SpectralField<Scalar>& field) {
  const Layout layout = field.layout();
  const int nyq = field.N;  // slot of k = -N
  if (layout.dim == 1) {
    field.coeffs[nyq] = 0;
  } else {
    const Eigen::Index side = layout.side();
    for (Eigen::Index j = 0; j < side; ++j) {
      field.coeffs[nyq * side + j] = 0;
      field.coeffs[j * side + nyq] = 0;
    }
  }
  if (!field.hermitian) field.hermitian = is_hermitian(field);
}

template <typename Scalar>
void clear_nyquist(PairField<Scalar>& pair) {
  clear_nyquist(pair.u);
  clear_nyquist(pair.v);
}

/// (sum_k (1 + 4 pi^2 |k|^2)^s |c_k|^2)^{1/2}.
template <typename Scalar>
Scalar sobolev_norm(const SpectralField<Scalar>& field, Scalar s) {
  const Scalar four_pi2 = Scalar(4) * std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  const RealArray<Scalar> weight = (Scalar(1) + four_pi2 * squared_wavenumbers<Scalar>(field.layout())).pow(s);
  return std::sqrt((weight * field.coeffs.abs2()).sum());
}

/// ||W||_a = (||u||_{H^a}^2 + ||v||_{H^{a-1}}^2)^{1/2}.
template <typename Scalar>
Scalar pair_norm(const PairField<Scalar>& w, Scalar a) {
  const Scalar nu = sobolev_norm(w.u, a);
  const Scalar nv = sobolev_norm(w.v, a - Scalar(1));
  return std::sqrt(nu * nu + nv * nv);
}

/// Exact L2 projection of f*g onto the bandwidth-Mout storage block.
///
/// Both factors are zero-padded to the smallest power-of-two grid on which no
/// product mode aliases into [-Mout, Mout-1]; for equal bandwidths N and
/// Mout <= N this is the 4N-point grid.
template <typename Scalar>
SpectralField<Scalar> dealiased_product(const SpectralField<Scalar>& f, const SpectralField<Scalar>& g,
                                        int Mout) {
  if (f.dim != g.dim) throw std::invalid_argument("dealiased_product: dimensions differ");
  const int P = std::max(f.N, g.N);
  if (Mout < 1 || Mout > P) throw std::invalid_argument("dealiased_product: need 1 <= Mout <= N");
  validate_layout({f.dim, Mout});
  int grid = P;
  while (2 * grid < f.N + g.N + Mout) grid *= 2;
  const auto fs = inverse_transform_complex(resize(f, grid));
  const auto gs = inverse_transform_complex(resize(g, grid));
  ComplexSamples<Scalar> prod{f.dim, grid, fs.values * gs.values};
  auto out = resize(forward_transform(prod), Mout);
  out.hermitian = f.hermitian && g.hermitian && is_hermitian(out);
  return out;
}

}  // namespace hrwave
