#pragma once

// Problem definitions: nonlinearities and initial data.

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hrwave/spectral.hpp"

namespace hrwave {

/// g(u) from a compiled-in family, and f(u) = g(u) + m u.
struct Nonlinearity {
  enum class Family { Sine, Cubic, Linear };

  Family family = Family::Sine;
  double param = 1;  // A for A sin(u), lambda for lambda u^3
  double m = 1;

  /// "sine:A", "cubic:lambda" or "linear" (g = -m u, so f = 0).
  static Nonlinearity parse(const std::string& label, double m);
  std::string label() const;

  double g(double u) const;
  double dg(double u) const;
  double d2g(double u) const;
  double f(double u) const { return family == Family::Linear ? 0.0 : g(u) + m * u; }
  double df(double u) const { return family == Family::Linear ? 0.0 : dg(u) + m; }
  double d2f(double u) const { return d2g(u); }
};

enum class Which { F, FPrime };

/// I_N f(u) or I_N f'(u) at the bandwidth of u. Throws BlowUpError on
/// non-finite samples.
SpectralField<double> eval_f_on_grid(const Nonlinearity& nl, const SpectralField<double>& u, Which which);

/// Fourier coefficients of height * 1_[a,b] on the unit circle for
/// |k| <= N-1; the unpaired k = -N slot is left zero.
SpectralField<double> exact_box_coefficients(double a, double b, double height, int N);

struct Box {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  double height = 0;
};

struct Boxes {
  std::vector<Box> u;
  std::vector<Box> v;
};

/// Random tensor-product data a(k1) b(k2) with a(k) = U_k |k|^-p, U_k
/// uniform on (0,1), weight 1 at k = 0, and a(-k) = a(k).
struct Rough {
  double exponent_u = 1.01;
  double exponent_v = 0.01;
  std::uint64_t seed = 0;
  double target_u = 1;  // ||u||_{H^{1/2}}
  double target_v = 1;  // ||v||_{H^{-1/2}}
  /// Bandwidth at which the targets are met; 0 means the build bandwidth.
  /// Keeping it fixed makes all truncations of one dataset consistent.
  int normalization_bandwidth = 0;
};

struct Smooth {
  std::string label = "sin";
};

/// Explicit coefficients, e.g. read back from a snapshot.
struct Coefficients {
  PairField<double> state;
};

struct InitialData {
  int dim = 1;
  std::variant<Boxes, Rough, Smooth, Coefficients> variant;
  std::string name;
};

/// Named presets: boxes:sg1d, boxes:kg1d, boxes:sg2d-one, boxes:sg2d-two,
/// rough2d, smooth:sin. Returns false for unknown names.
bool make_preset(const std::string& name, int dim, std::uint64_t seed, InitialData& out);

inline constexpr const char* kRngName = "mt19937_64";

/// Per-mode access to Pi_K U(0) without materializing the tensor.
class ModeSource {
 public:
  ModeSource(const InitialData& data, int K);

  int dim() const noexcept { return dim_; }
  int bandwidth() const noexcept { return K_; }

  /// (u_k, v_k); zero for modes outside |k_i| <= K-1.
  std::pair<std::complex<double>, std::complex<double>> operator()(ModeIndex k) const;

 private:
  std::complex<double> boxes_at(const std::vector<Box>& boxes, ModeIndex k) const;

  int dim_;
  int K_;
  InitialData data_;
  // Rough: per-axis magnitude tables and normalizing scales.
  std::array<std::vector<double>, 2> rough_u_, rough_v_;
  double scale_u_ = 1, scale_v_ = 1;
  // Smooth or explicit coefficients at their native bandwidth.
  PairField<double> smooth_;
};

PairField<double> build_rough(const Rough& spec, int dim, int N_alpha);

/// Pi_{N_alpha} U(0) at bandwidth N_alpha, Nyquist slots cleared.
PairField<double> build_initial(const InitialData& data, int N_alpha);

}  // namespace hrwave
