#pragma once

// Time integrators for u_tt - Delta u = g(u) written as U' = L U + F(U),
// F(U) = (0, f(u)).
//
// The low band |k_i| <= N-1 is stepped; the band up to the recovery
// bandwidth K = 2^ceil(alpha log2 N) is carried by the free group from the
// initial data and only materialized at output times.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hrwave/model.hpp"
#include "hrwave/snapshot.hpp"
#include "hrwave/spectral.hpp"
#include "hrwave/waveop.hpp"

namespace hrwave {

enum class Method { HrLri, Lie, Strang, Deuflhard };

Method parse_method(const std::string& name);
std::string to_string(Method method);

/// Smallest power of two >= N^alpha.
int high_bandwidth(int N, double alpha);

struct SchemeConfig {
  Method method = Method::HrLri;
  int N = 0;
  double alpha = 1;  // HR-LRI only; 1 disables the recovery
  double tau = 0;
  double T = 0;
  Nonlinearity nl;

  /// Bandwidth of the initial data and of the assembled solution.
  int bandwidth() const;
  /// T / tau; throws unless it is an integer to within 1e-9.
  long steps() const;
  void validate() const;
};

struct SolverState {
  long n = 0;
  double t = 0;
  PairField<double> low;    // bandwidth N, Nyquist slots zero
  PairField<double> high0;  // bandwidth K, zero on |k_i| <= N-1
};

/// Splits Pi_K U(0), given at bandwidth cfg.bandwidth(), into low and high parts.
SolverState make_state(const SchemeConfig& cfg, const PairField<double>& initial);

/// H(U) = (-I_N f(u), Pi_N(I_N f'(u) v)).
PairField<double> H_of(const PairField<double>& U, const Nonlinearity& nl);

/// Per-run operator tables; one instance steps any number of states.
class Stepper {
 public:
  Stepper(const SchemeConfig& cfg, int dim);
  void step(SolverState& state) const;

 private:
  void hr_lri(SolverState& state) const;
  void lie(SolverState& state) const;
  void strang(SolverState& state) const;
  void deuflhard(SolverState& state) const;
  SpectralField<double> forcing(const SpectralField<double>& u) const;
  void rotate(PairField<double>& w) const;

  SchemeConfig cfg_;
  GroupCache<double> group_;
  std::optional<PhiCache<double>> phi_;
};

void step_hr_lri(SolverState& state, const SchemeConfig& cfg);
void step_lie(SolverState& state, const SchemeConfig& cfg);
void step_strang(SolverState& state, const SchemeConfig& cfg);
void step_deuflhard(SolverState& state, const SchemeConfig& cfg);

/// e^{tL} high0, evaluated directly at t.
PairField<double> recover_high(const SolverState& state, double t, double m);

/// low embedded at bandwidth K plus the recovered high band at state.t.
PairField<double> assemble_solution(const SolverState& state, double m);

struct RunOptions {
  std::vector<double> snapshot_times;
};

struct RunResult {
  PairField<double> final_state;  // assembled; last good state on blow-up
  double final_time = 0;
  long steps = 0;
  double wall_seconds = 0;
  bool blowup = false;
  std::string blowup_message;
  std::vector<Snapshot> snapshots;
};

/// Steps Pi_K U(0) to time T. Blow-up stops the run and sets the flag.
RunResult run(const SchemeConfig& cfg, const PairField<double>& initial, const RunOptions& options = {});

}  // namespace hrwave
