#pragma once

// Radix-2 complex FFT with a process-wide plan cache.
//
// Transforms are unnormalized: forward uses e^{-2 pi i jk/n}, inverse uses
// e^{+2 pi i jk/n}. Callers apply the 1/n factor.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrwave {

constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

enum class FftDirection { Forward, Inverse };

template <typename Scalar>
class FftPlan {
 public:
  using Complex = std::complex<Scalar>;

  explicit FftPlan(std::size_t n) : n_(n) {
    if (!is_power_of_two(n)) {
      throw std::invalid_argument("FFT size must be a power of two, got " + std::to_string(n));
    }
    unsigned bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = static_cast<std::uint32_t>(r);
    }
    // Twiddles are evaluated directly (no recurrence) so every entry is
    // correctly rounded.
    twiddle_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
      const Scalar angle = -Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(j) / Scalar(n);
      twiddle_[j] = Complex(std::cos(angle), std::sin(angle));
    }
  }

  std::size_t size() const noexcept { return n_; }

  void operator()(std::span<Complex> data, FftDirection dir) const {
    if (data.size() != n_) throw std::invalid_argument("FFT buffer size mismatch");
    transform(data.data(), dir);
  }

  /// Strided in-place transform of n_ elements starting at data.
  void transform(Complex* data, FftDirection dir) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t r = bitrev_[i];
      if (i < r) std::swap(data[i], data[r]);
    }
    const bool inverse = dir == FftDirection::Inverse;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        Complex* a = data + start;
        Complex* b = a + half;
        for (std::size_t j = 0; j < half; ++j) {
          Complex w = twiddle_[j * stride];
          if (inverse) w = std::conj(w);
          const Complex t = w * b[j];
          b[j] = a[j] - t;
          a[j] += t;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<std::uint32_t> bitrev_;
  std::vector<Complex> twiddle_;
};

/// Shared, write-once plan for size n.
template <typename Scalar>
std::shared_ptr<const FftPlan<Scalar>> fft_plan(std::size_t n) {
  static std::shared_mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const FftPlan<Scalar>>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto plan = std::make_shared<const FftPlan<Scalar>>(n);
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(plan));
  return it->second;
}

/// In-place d-dimensional transform of a row-major (side)^dim tensor.
template <typename Scalar>
void fft_nd(std::span<std::complex<Scalar>> data, int dim, std::size_t side, FftDirection dir) {
  const auto plan = fft_plan<Scalar>(side);
  if (dim == 1) {
    (*plan)(data, dir);
    return;
  }
  if (dim != 2) throw std::invalid_argument("only 1D and 2D transforms are supported");
  if (data.size() != side * side) throw std::invalid_argument("2D FFT buffer size mismatch");
  for (std::size_t row = 0; row < side; ++row) plan->transform(data.data() + row * side, dir);
  std::vector<std::complex<Scalar>> column(side);
  for (std::size_t col = 0; col < side; ++col) {
    for (std::size_t row = 0; row < side; ++row) column[row] = data[row * side + col];
    plan->transform(column.data(), dir);
    for (std::size_t row = 0; row < side; ++row) data[row * side + col] = column[row];
  }
}

}  // namespace hrwave
