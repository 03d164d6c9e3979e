#pragma once

// Per-mode linear algebra of the free wave group.
//
// With L = [[0, 1], [Delta - m, 0]], each Fourier mode k evolves under the
// 2x2 block L_w = [[0, 1], [-w^2, 0]], w = sqrt(m + 4 pi^2 |k|^2), so
//
//   e^{t L_w} = [[cos wt, sin(wt)/w], [-w sin wt, cos wt]].

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hrwave/spectral.hpp"

namespace hrwave {

/// Oscillation frequency of one Fourier mode.
template <typename Scalar = double>
struct ModeSymbol {
  Scalar omega;
  Scalar m;

  static ModeSymbol of(Scalar m, Scalar k_squared) {
    if (!(m > 0)) throw std::invalid_argument("mass term m must be positive");
    const Scalar four_pi2 = Scalar(4) * std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
    return {std::sqrt(m + four_pi2 * k_squared), m};
  }
};

template <typename Scalar>
RealArray<Scalar> mode_omegas(const Layout& layout, Scalar m) {
  if (!(m > 0)) throw std::invalid_argument("mass term m must be positive, got " + std::to_string(m));
  const Scalar four_pi2 = Scalar(4) * std::numbers::pi_v<Scalar> * std::numbers::pi_v<Scalar>;
  return (m + four_pi2 * squared_wavenumbers<Scalar>(layout)).sqrt();
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> group_matrix(Scalar omega, Scalar t) {
  const Scalar c = std::cos(omega * t);
  const Scalar s = std::sin(omega * t);
  Eigen::Matrix<Scalar, 2, 2> g;
  g << c, s / omega, -omega * s, c;
  return g;
}

/// (sin x - x cos x) / x^3, with a series near zero.
template <typename Scalar>
Scalar phi_offdiag_kernel(Scalar x) {
  if (std::abs(x) < Scalar(0.05)) {
    const Scalar x2 = x * x;
    return Scalar(1) / 3 + x2 * (Scalar(-1) / 30 + x2 * (Scalar(1) / 840 + x2 * (Scalar(-1) / 45360)));
  }
  return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

template <typename Scalar>
Scalar sinc(Scalar x) {
  if (std::abs(x) < Scalar(1e-4)) return Scalar(1) - x * x / 6;
  return std::sin(x) / x;
}

/// Closed form of phi_tau(L_w) = int_0^tau (tau - s) e^{(tau - 2s) L_w} ds
///   = (2L)^{-1} [tau e^{tau L} - (2L)^{-1}(e^{tau L} - e^{-tau L})].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> phi_matrix(Scalar omega, Scalar tau) {
  const Scalar x = omega * tau;
  const Scalar diag = tau * tau / 2 * sinc(x);
  const Scalar q = tau * tau * tau / 2 * phi_offdiag_kernel(x);
  Eigen::Matrix<Scalar, 2, 2> phi;
  phi << diag, q, -omega * omega * q, diag;
  return phi;
}

/// Per-mode tables of e^{tL} for one layout.
template <typename Scalar = double>
struct GroupCache {
  Layout layout;
  Scalar t = 0;
  Scalar m = 1;
  RealArray<Scalar> cos_wt;
  RealArray<Scalar> sin_over_w;
  RealArray<Scalar> minus_w_sin;

  static GroupCache build(const Layout& layout, Scalar t, Scalar m) {
    const RealArray<Scalar> w = mode_omegas(layout, m);
    const RealArray<Scalar> wt = w * t;
    return {layout, t, m, wt.cos(), wt.sin() / w, -w * wt.sin()};
  }
};

/// Per-mode tables of phi_tau(L).
template <typename Scalar = double>
struct PhiCache {
  Layout layout;
  Scalar tau = 0;
  Scalar m = 1;
  RealArray<Scalar> diag;
  RealArray<Scalar> upper;
  RealArray<Scalar> lower;

  static PhiCache build(const Layout& layout, Scalar tau, Scalar m) {
    if (!(tau > 0)) throw std::invalid_argument("phi filter needs tau > 0");
    const RealArray<Scalar> w = mode_omegas(layout, m);
    PhiCache cache{layout, tau, m, RealArray<Scalar>(w.size()), RealArray<Scalar>(w.size()),
                   RealArray<Scalar>(w.size())};
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const auto phi = phi_matrix(w[i], tau);
      cache.diag[i] = phi(0, 0);
      cache.upper[i] = phi(0, 1);
      cache.lower[i] = phi(1, 0);
    }
    return cache;
  }
};

namespace detail {

template <typename Scalar>
void require_layout(const PairField<Scalar>& w, const Layout& layout) {
  if (w.u.layout() != layout || w.v.layout() != layout) {
    throw std::invalid_argument("operator table does not match field layout");
  }
}

}  // namespace detail

template <typename Scalar>
PairField<Scalar> apply_group(const PairField<Scalar>& w, const GroupCache<Scalar>& g) {
  detail::require_layout(w, g.layout);
  PairField<Scalar> out = w;
  out.u.coeffs = g.cos_wt * w.u.coeffs + g.sin_over_w * w.v.coeffs;
  out.v.coeffs = g.minus_w_sin * w.u.coeffs + g.cos_wt * w.v.coeffs;
  return out;
}

/// e^{tL} W, evaluated by per-mode rotation.
template <typename Scalar>
PairField<Scalar> apply_group(const PairField<Scalar>& w, Scalar t, Scalar m) {
  return apply_group(w, GroupCache<Scalar>::build(w.layout(), t, m));
}

template <typename Scalar>
PairField<Scalar> phi_filter(const PairField<Scalar>& w, const PhiCache<Scalar>& phi) {
  detail::require_layout(w, phi.layout);
  PairField<Scalar> out = w;
  out.u.coeffs = phi.diag * w.u.coeffs + phi.upper * w.v.coeffs;
  out.v.coeffs = phi.lower * w.u.coeffs + phi.diag * w.v.coeffs;
  return out;
}

/// phi_tau(L) W.
template <typename Scalar>
PairField<Scalar> phi_filter(const PairField<Scalar>& w, Scalar tau, Scalar m) {
  return phi_filter(w, PhiCache<Scalar>::build(w.layout(), tau, m));
}

}  // namespace hrwave
