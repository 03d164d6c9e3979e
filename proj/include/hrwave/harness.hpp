#pragma once

// Convergence experiments: reference solutions, errors in L2 x H^-1,
// sweeps under tau = ratio / N, slope fits and CSV persistence.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrwave/integrate.hpp"
#include "hrwave/model.hpp"

namespace hrwave {

/// A method under test, written "hrlri:alpha=2", "hrlri", "strang", ...
struct MethodSpec {
  Method method = Method::HrLri;
  double alpha = 1;

  static MethodSpec parse(const std::string& text, double default_alpha);
  std::string label() const;
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

struct ExperimentSpec {
  InitialData init;
  Nonlinearity nl;
  double T = 0.25;
  std::vector<int> sweep;
  double tau_ratio = 0.25;
  std::vector<MethodSpec> methods;
  int N_ref = 0;         // 0: 2^12 in 1D, 2^7 in 2D
  double alpha_ref = 0;  // 0: largest alpha among the methods
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  bool record_timing = false;

  int dim() const { return init.dim; }
  int reference_N() const;
  double reference_alpha() const;
  void validate() const;
  /// Fills reference defaults and pins rough-data normalization to the
  /// reference bandwidth so every run sees the same dataset.
  ExperimentSpec resolved() const;
};

struct ErrorRecord {
  std::string method;
  int dim = 1;
  int N = 0;
  double alpha = 1;
  double tau = 0;
  double err0 = 0;
  double wall_seconds = 0;
  bool blowup = false;
};

/// Reference solution at time T: coefficients up to the body bandwidth and
/// the squared 0-norm of everything beyond it.
struct Reference {
  PairField<double> body;
  double tail_sq = 0;
  int N_ref = 0;
  double alpha_ref = 1;
  int K_ref = 0;
  bool blowup = false;
};

/// Runs HR-LRI at (N_ref, alpha_ref). Only the low band is stepped; the high
/// band is propagated per mode from the initial data and kept explicitly up
/// to body_bandwidth.
Reference compute_reference(const ExperimentSpec& spec, int body_bandwidth);

/// ||a - b||_0 with missing modes read as zero.
double compute_error(const PairField<double>& a, const PairField<double>& b);
double compute_error(const PairField<double>& num, const Reference& ref);

std::vector<ErrorRecord> run_convergence(const ExperimentSpec& spec);
std::vector<ErrorRecord> run_convergence(const ExperimentSpec& spec, const Reference& ref);

/// Least-squares slope of log err against log tau.
double fit_slope(const std::vector<ErrorRecord>& records);

/// max(u_num) - max(u_ref) on a grid refined by grid_factor (a power of two).
double overshoot(const PairField<double>& num, const PairField<double>& ref, int grid_factor);

/// The modes |k_i| <= N-1 of w stored at bandwidth N. Against this
/// restriction of the reference, the Gibbs peak a bandwidth-N series has
/// anyway cancels out of overshoot().
PairField<double> band_limit(const PairField<double>& w, int N);

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

inline constexpr const char* kCsvHeader = "method,dim,N,alpha,tau,err_L2Hm1,wall_seconds,flag";

std::string format_double(double x);
void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records);
std::vector<ErrorRecord> read_csv(std::istream& in);

/// Records of one method, in input order.
std::vector<ErrorRecord> select(const std::vector<ErrorRecord>& records, const std::string& method, double alpha);

}  // namespace hrwave
