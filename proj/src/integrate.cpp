#include "hrwave/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hrwave/errors.hpp"

namespace hrwave {
namespace {

constexpr double kBlowUpBound = 1e12;

void check_finite(const PairField<double>& w, long step) {
  const auto bad = [](const CoeffArray<double>& c) {
    return !c.allFinite() || (c.size() && c.abs().maxCoeff() > kBlowUpBound);
  };
  if (bad(w.u.coeffs) || bad(w.v.coeffs)) {
    throw BlowUpError("coefficients blew up at step " + std::to_string(step), step);
  }
}

SpectralField<double> masked(SpectralField<double> f) {
  clear_nyquist(f);
  return f;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "hrlri") return Method::HrLri;
  if (name == "lie") return Method::Lie;
  if (name == "strang") return Method::Strang;
  if (name == "deuflhard") return Method::Deuflhard;
  throw std::invalid_argument("unknown method '" + name + "' (expected hrlri, lie, strang, deuflhard)");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::HrLri: return "hrlri";
    case Method::Lie: return "lie";
    case Method::Strang: return "strang";
    case Method::Deuflhard: return "deuflhard";
  }
  return {};
}

int high_bandwidth(int N, double alpha) {
  if (!(alpha >= 1)) throw std::invalid_argument("alpha must be >= 1");
  validate_layout({1, N});
  const double exponent = std::ceil(alpha * std::log2(double(N)) - 1e-9);
  if (exponent > 30) throw std::invalid_argument("N^alpha is too large");
  return 1 << int(std::max(0.0, exponent));
}

int SchemeConfig::bandwidth() const {
  return method == Method::HrLri ? high_bandwidth(N, alpha) : N;
}

long SchemeConfig::steps() const {
  if (!(tau > 0) || !(T > 0)) throw std::invalid_argument("tau and T must be positive");
  const double ratio = T / tau;
  const double M = std::round(ratio);
  if (M < 1 || std::abs(ratio - M) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("T / tau must be an integer");
  }
  return long(M);
}

void SchemeConfig::validate() const {
  validate_layout({1, N});
  if (N < 2) throw std::invalid_argument("N must be at least 2");
  if (!(alpha >= 1)) throw std::invalid_argument("alpha must be >= 1");
  if (!(nl.m > 0)) throw std::invalid_argument("m must be positive");
  steps();
  bandwidth();
}

SolverState make_state(const SchemeConfig& cfg, const PairField<double>& initial) {
  const int K = cfg.bandwidth();
  if (initial.N() != K || initial.v.N != K || initial.v.dim != initial.dim()) {
    throw std::invalid_argument("initial data must be given at bandwidth " + std::to_string(K));
  }
  SolverState state;
  state.low = {masked(resize(project(initial.u, cfg.N - 1), cfg.N)),
               masked(resize(project(initial.v, cfg.N - 1), cfg.N))};
  if (K > cfg.N) {
    state.high0 = {masked(band(initial.u, cfg.N - 1, K)), masked(band(initial.v, cfg.N - 1, K))};
  } else {
    state.high0 = PairField<double>::zero(initial.dim(), cfg.N);
  }
  return state;
}

PairField<double> H_of(const PairField<double>& U, const Nonlinearity& nl) {
  const int N = U.N();
  const auto fu = eval_f_on_grid(nl, U.u, Which::F);
  const auto dfu = eval_f_on_grid(nl, U.u, Which::FPrime);
  PairField<double> h{masked(-1.0 * fu), masked(dealiased_product(symmetric_embed(dfu, 2 * N), U.v, N))};
  return h;
}

Stepper::Stepper(const SchemeConfig& cfg, int dim)
    : cfg_(cfg), group_(GroupCache<double>::build(Layout{dim, cfg.N}, cfg.tau, cfg.nl.m)) {
  validate_layout({dim, cfg.N});
  if (cfg.method == Method::HrLri) phi_ = PhiCache<double>::build(Layout{dim, cfg.N}, cfg.tau, cfg.nl.m);
}

SpectralField<double> Stepper::forcing(const SpectralField<double>& u) const {
  return masked(eval_f_on_grid(cfg_.nl, u, Which::F));
}

void Stepper::rotate(PairField<double>& w) const { w = apply_group(w, group_); }

void Stepper::step(SolverState& state) const {
  if (state.low.layout() != group_.layout) throw std::invalid_argument("state does not match the stepper");
  PairField<double> saved = state.low;
  try {
    switch (cfg_.method) {
      case Method::HrLri: hr_lri(state); break;
      case Method::Lie: lie(state); break;
      case Method::Strang: strang(state); break;
      case Method::Deuflhard: deuflhard(state); break;
    }
    clear_nyquist(state.low);
    check_finite(state.low, state.n + 1);
  } catch (const BlowUpError& e) {
    state.low = std::move(saved);
    throw BlowUpError(e.step() < 0 ? std::string(e.what()) + " at step " + std::to_string(state.n + 1) : e.what(),
                      state.n + 1);
  }
  ++state.n;
  state.t = double(state.n) * cfg_.tau;
}

void Stepper::hr_lri(SolverState& state) const {
  const auto& g = group_;
  const auto& phi = *phi_;
  const double tau = cfg_.tau;
  const auto F = forcing(state.low.u);
  const auto H = H_of(state.low, cfg_.nl);
  const auto& u = state.low.u.coeffs;
  const auto& v = state.low.v.coeffs;
  CoeffArray<double> next_u = g.cos_wt * u + g.sin_over_w * v + tau * g.sin_over_w * F.coeffs +
                              phi.diag * H.u.coeffs + phi.upper * H.v.coeffs;
  CoeffArray<double> next_v = g.minus_w_sin * u + g.cos_wt * v + tau * g.cos_wt * F.coeffs +
                              phi.lower * H.u.coeffs + phi.diag * H.v.coeffs;
  const bool real = state.low.u.hermitian && state.low.v.hermitian && F.hermitian && H.u.hermitian && H.v.hermitian;
  state.low.u.coeffs = std::move(next_u);
  state.low.v.coeffs = std::move(next_v);
  state.low.u.hermitian = state.low.v.hermitian = real;
}

void Stepper::lie(SolverState& state) const {
  const auto F = forcing(state.low.u);
  state.low.v = state.low.v + cfg_.tau * F;
  rotate(state.low);
}

void Stepper::strang(SolverState& state) const {
  const double half = cfg_.tau / 2;
  state.low.v = state.low.v + half * forcing(state.low.u);
  rotate(state.low);
  state.low.v = state.low.v + half * forcing(state.low.u);
}

void Stepper::deuflhard(SolverState& state) const {
  const auto& g = group_;
  const double half = cfg_.tau / 2;
  const auto F0 = forcing(state.low.u);
  const auto& u = state.low.u.coeffs;
  const auto& v = state.low.v.coeffs;
  SpectralField<double> u1 = state.low.u;
  u1.coeffs = g.cos_wt * u + g.sin_over_w * v + half * g.sin_over_w * F0.coeffs;
  u1.hermitian = state.low.u.hermitian && state.low.v.hermitian && F0.hermitian;
  const auto F1 = forcing(u1);
  CoeffArray<double> v1 = g.minus_w_sin * u + g.cos_wt * v + half * (g.cos_wt * F0.coeffs + F1.coeffs);
  state.low.v.coeffs = std::move(v1);
  state.low.v.hermitian = u1.hermitian && F1.hermitian;
  state.low.u = std::move(u1);
}

namespace {

void step_with(SolverState& state, SchemeConfig cfg, Method method) {
  cfg.method = method;
  Stepper(cfg, state.low.dim()).step(state);
}

}  // namespace

void step_hr_lri(SolverState& state, const SchemeConfig& cfg) { step_with(state, cfg, Method::HrLri); }
void step_lie(SolverState& state, const SchemeConfig& cfg) { step_with(state, cfg, Method::Lie); }
void step_strang(SolverState& state, const SchemeConfig& cfg) { step_with(state, cfg, Method::Strang); }
void step_deuflhard(SolverState& state, const SchemeConfig& cfg) { step_with(state, cfg, Method::Deuflhard); }

PairField<double> recover_high(const SolverState& state, double t, double m) {
  if (t < 0) throw std::invalid_argument("recover_high needs t >= 0");
  return apply_group(state.high0, t, m);
}

PairField<double> assemble_solution(const SolverState& state, double m) {
  const int K = state.high0.N();
  if (K == state.low.N()) return state.low;
  PairField<double> out{resize(state.low.u, K), resize(state.low.v, K)};
  return out + recover_high(state, state.t, m);
}

RunResult run(const SchemeConfig& cfg, const PairField<double>& initial, const RunOptions& options) {
  cfg.validate();
  const long M = cfg.steps();
  std::vector<long> wanted;
  for (double t : options.snapshot_times) {
    const double r = t / cfg.tau;
    const double n = std::round(r);
    if (t < 0 || n > double(M) || std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
      throw std::invalid_argument("snapshot time " + std::to_string(t) + " is not a step time in [0, T]");
    }
    wanted.push_back(long(n));
  }

  RunResult result;
  SolverState state = make_state(cfg, initial);
  const Stepper stepper(cfg, initial.dim());
  const auto capture = [&](long n) {
    for (long w : wanted) {
      if (w != n) continue;
      result.snapshots.push_back({state.t, n == 0 ? initial : assemble_solution(state, cfg.nl.m)});
      break;
    }
  };

  capture(0);
  const auto start = std::chrono::steady_clock::now();
  try {
    while (state.n < M) {
      stepper.step(state);
      capture(state.n);
    }
  } catch (const BlowUpError& e) {
    result.blowup = true;
    result.blowup_message = e.what();
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.steps = state.n;
  result.final_time = state.t;
  result.final_state = assemble_solution(state, cfg.nl.m);
  return result;
}

}  // namespace hrwave
