#include "hrwave/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "hrwave/errors.hpp"

namespace hrwave {
namespace {

constexpr double kFourPi2 = 4 * std::numbers::pi * std::numbers::pi;

double parse_double(const std::string& text, bool& ok) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  ok = !text.empty() && end == text.c_str() + text.size();
  return x;
}

long parse_long(const std::string& text, bool& ok) {
  char* end = nullptr;
  const long x = std::strtol(text.c_str(), &end, 10);
  ok = !text.empty() && end == text.c_str() + text.size();
  return x;
}

int max_abs(ModeIndex k, int dim) { return dim == 1 ? std::abs(k.k1) : std::max(std::abs(k.k1), std::abs(k.k2)); }

double squared(ModeIndex k, int dim) { return double(k.k1) * k.k1 + (dim == 2 ? double(k.k2) * k.k2 : 0.0); }

/// e^{TL} applied to one mode's (u, v).
std::pair<std::complex<double>, std::complex<double>> propagate(std::pair<std::complex<double>, std::complex<double>> w,
                                                                double k2, double T, double m) {
  const double omega = std::sqrt(m + kFourPi2 * k2);
  const double c = std::cos(omega * T), s = std::sin(omega * T);
  return {c * w.first + (s / omega) * w.second, -omega * s * w.first + c * w.second};
}

}  // namespace

MethodSpec MethodSpec::parse(const std::string& text, double default_alpha) {
  const auto colon = text.find(':');
  MethodSpec spec;
  spec.method = parse_method(text.substr(0, colon));
  if (colon == std::string::npos) {
    spec.alpha = spec.method == Method::HrLri ? default_alpha : 1.0;
  } else {
    const std::string arg = text.substr(colon + 1);
    bool ok = false;
    if (spec.method != Method::HrLri || arg.rfind("alpha=", 0) != 0) {
      throw std::invalid_argument("bad method '" + text + "' (only hrlri takes alpha=...)");
    }
    spec.alpha = parse_double(arg.substr(6), ok);
    if (!ok) throw std::invalid_argument("bad alpha in '" + text + "'");
  }
  if (!(spec.alpha >= 1)) throw std::invalid_argument("alpha must be >= 1 in '" + text + "'");
  return spec;
}

std::string MethodSpec::label() const {
  if (method != Method::HrLri) return to_string(method);
  char buf[64];
  std::snprintf(buf, sizeof buf, "hrlri:alpha=%g", alpha);
  return buf;
}

int ExperimentSpec::reference_N() const {
  if (N_ref > 0) return N_ref;
  return dim() == 1 ? 1 << 12 : 1 << 7;
}

double ExperimentSpec::reference_alpha() const {
  if (alpha_ref > 0) return alpha_ref;
  double a = 1;
  for (const auto& m : methods) a = std::max(a, m.alpha);
  return a;
}

void ExperimentSpec::validate() const {
  validate_layout({dim(), 2});
  if (sweep.empty()) throw std::invalid_argument("sweep is empty");
  if (methods.empty()) throw std::invalid_argument("no methods given");
  if (!(tau_ratio > 0)) throw std::invalid_argument("tau ratio must be positive");
  int largest = 0;
  for (int N : sweep) {
    SchemeConfig cfg{Method::HrLri, N, 1, tau_ratio / N, T, nl};
    cfg.validate();
    largest = std::max(largest, N);
  }
  const int Nr = reference_N();
  validate_layout({dim(), Nr});
  if (Nr < 2 * largest) {
    throw std::invalid_argument("reference N " + std::to_string(Nr) + " must be at least 2 * max sweep N");
  }
  SchemeConfig ref{Method::HrLri, Nr, reference_alpha(), tau_ratio / Nr, T, nl};
  ref.validate();
}

ExperimentSpec ExperimentSpec::resolved() const {
  ExperimentSpec s = *this;
  s.N_ref = reference_N();
  s.alpha_ref = reference_alpha();
  std::sort(s.sweep.begin(), s.sweep.end());
  s.sweep.erase(std::unique(s.sweep.begin(), s.sweep.end()), s.sweep.end());
  if (auto* rough = std::get_if<Rough>(&s.init.variant); rough && rough->normalization_bandwidth == 0) {
    rough->normalization_bandwidth = high_bandwidth(s.N_ref, s.alpha_ref);
  }
  return s;
}

Reference compute_reference(const ExperimentSpec& spec_in, int body_bandwidth) {
  const ExperimentSpec spec = spec_in.resolved();
  spec.validate();
  const int dim = spec.dim();
  const int Nr = spec.N_ref;
  const double m = spec.nl.m;
  Reference ref;
  ref.N_ref = Nr;
  ref.alpha_ref = spec.alpha_ref;
  ref.K_ref = high_bandwidth(Nr, spec.alpha_ref);
  const int K = ref.K_ref;
  const ModeSource source(spec.init, K);

  const SchemeConfig cfg{Method::HrLri, Nr, spec.alpha_ref, spec.tau_ratio / Nr, spec.T, spec.nl};
  SolverState state;
  state.low = PairField<double>::zero(dim, Nr);
  const Layout low_layout = state.low.layout();
  for (Eigen::Index i = 0; i < low_layout.size(); ++i) {
    const auto [u, v] = source(low_layout.mode(i));
    state.low.u.coeffs[i] = u;
    state.low.v.coeffs[i] = v;
  }
  clear_nyquist(state.low);
  const Stepper stepper(cfg, dim);
  const long M = cfg.steps();
  try {
    while (state.n < M) stepper.step(state);
  } catch (const BlowUpError& e) {
    throw std::runtime_error(std::string("reference solution blew up: ") + e.what());
  }
  const double T = state.t;

  const int Kb = std::min(K, std::max(Nr, body_bandwidth));
  if (Layout{dim, Kb}.size() > (Eigen::Index(1) << 26)) {
    throw std::invalid_argument("reference body at bandwidth " + std::to_string(Kb) + " is too large to store");
  }
  ref.body = Kb > Nr ? PairField<double>{resize(state.low.u, Kb), resize(state.low.v, Kb)} : state.low;
  const Layout body = ref.body.layout();
  for (Eigen::Index i = 0; i < body.size(); ++i) {
    const ModeIndex k = body.mode(i);
    const int a = max_abs(k, dim);
    if (a < Nr || a > Kb - 1) continue;
    const auto w = propagate(source(k), squared(k, dim), T, m);
    ref.body.u.coeffs[i] = w.first;
    ref.body.v.coeffs[i] = w.second;
  }

  double tail = 0;
  const auto add = [&](ModeIndex k) {
    const double k2 = squared(k, dim);
    const auto w = propagate(source(k), k2, T, m);
    tail += std::norm(w.first) + std::norm(w.second) / (1 + kFourPi2 * k2);
  };
  if (dim == 1) {
    for (int k = Kb; k <= K - 1; ++k) {
      add({k});
      add({-k});
    }
  } else {
    for (int k1 = -(K - 1); k1 <= K - 1; ++k1) {
      if (std::abs(k1) >= Kb) {
        for (int k2 = -(K - 1); k2 <= K - 1; ++k2) add({k1, k2});
      } else {
        for (int k2 = Kb; k2 <= K - 1; ++k2) {
          add({k1, k2});
          add({k1, -k2});
        }
      }
    }
  }
  ref.tail_sq = tail;
  return ref;
}

double compute_error(const PairField<double>& a, const PairField<double>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("compute_error: dimensions differ");
  const int M = std::max(a.N(), b.N());
  const PairField<double> A{resize(a.u, M), resize(a.v, M)};
  const PairField<double> B{resize(b.u, M), resize(b.v, M)};
  return pair_norm(A - B, 0.0);
}

double compute_error(const PairField<double>& num, const Reference& ref) {
  if (num.N() > ref.body.N() && ref.body.N() < ref.K_ref) {
    throw std::invalid_argument("numerical solution is wider than the reference body");
  }
  const double body = compute_error(num, ref.body);
  return std::sqrt(body * body + ref.tail_sq);
}

std::vector<ErrorRecord> run_convergence(const ExperimentSpec& spec_in) {
  const ExperimentSpec spec = spec_in.resolved();
  spec.validate();
  int widest = 0;
  for (const auto& method : spec.methods) {
    for (int N : spec.sweep) {
      SchemeConfig cfg{method.method, N, method.alpha, spec.tau_ratio / N, spec.T, spec.nl};
      widest = std::max(widest, cfg.bandwidth());
    }
  }
  return run_convergence(spec, compute_reference(spec, widest));
}

std::vector<ErrorRecord> run_convergence(const ExperimentSpec& spec_in, const Reference& ref) {
  const ExperimentSpec spec = spec_in.resolved();
  spec.validate();
  struct Job {
    MethodSpec method;
    int N;
  };
  std::vector<Job> jobs;
  for (const auto& method : spec.methods) {
    for (int N : spec.sweep) jobs.push_back({method, N});
  }
  std::vector<ErrorRecord> records(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) {
      try {
        const auto& job = jobs[j];
        const SchemeConfig cfg{job.method.method, job.N, job.method.alpha, spec.tau_ratio / job.N, spec.T, spec.nl};
        const auto initial = build_initial(spec.init, cfg.bandwidth());
        const RunResult result = run(cfg, initial);
        ErrorRecord& r = records[j];
        r.method = to_string(job.method.method);
        r.dim = spec.dim();
        r.N = job.N;
        r.alpha = job.method.alpha;
        r.tau = cfg.tau;
        r.blowup = result.blowup;
        r.err0 = result.blowup ? std::numeric_limits<double>::quiet_NaN() : compute_error(result.final_state, ref);
        r.wall_seconds = spec.record_timing ? result.wall_seconds : 0.0;
      } catch (...) {
        failures[j] = std::current_exception();
      }
    }
  };
  unsigned threads = spec.threads > 0 ? unsigned(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return records;
}

double fit_slope(const std::vector<ErrorRecord>& records) {
  if (records.size() < 3) throw std::invalid_argument("fit_slope needs at least 3 records");
  std::vector<double> x, y;
  for (const auto& r : records) {
    if (!(r.tau > 0) || !(r.err0 > 0) || !std::isfinite(r.err0)) {
      throw std::invalid_argument("fit_slope needs positive finite tau and error");
    }
    x.push_back(std::log(r.tau));
    y.push_back(std::log(r.err0));
  }
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-24)) throw std::invalid_argument("fit_slope needs distinct tau values");
  return sxy / sxx;
}

double overshoot(const PairField<double>& num, const PairField<double>& ref, int grid_factor) {
  if (grid_factor < 2 || !is_power_of_two(std::size_t(grid_factor))) {
    throw std::invalid_argument("grid factor must be a power of two >= 2");
  }
  if (num.dim() != ref.dim()) throw std::invalid_argument("overshoot: dimensions differ");
  const int fine = std::max(num.N(), ref.N()) * grid_factor;
  const auto peak = [fine](const SpectralField<double>& u) {
    return inverse_transform(symmetric_embed(u, fine)).values.maxCoeff();
  };
  return peak(num.u) - peak(ref.u);
}

PairField<double> band_limit(const PairField<double>& w, int N) {
  if (N >= w.N()) return w;
  PairField<double> out{resize(w.u, N), resize(w.v, N)};
  clear_nyquist(out);
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<ErrorRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.dim << ',' << r.N << ',' << format_double(r.alpha) << ',' << format_double(r.tau)
        << ',' << format_double(r.err0) << ',' << format_double(r.wall_seconds) << ','
        << (r.blowup ? "blowup" : "ok") << '\n';
  }
}

std::vector<ErrorRecord> read_csv(std::istream& in) {
  std::string line;
  int number = 0;
  const auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  };
  if (!std::getline(in, line)) throw CsvError("empty CSV", 1);
  ++number;
  strip(line);
  if (line != kCsvHeader) throw CsvError("unexpected CSV header", number);
  std::vector<ErrorRecord> records;
  while (std::getline(in, line)) {
    ++number;
    strip(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw CsvError("expected 8 fields", number);
    ErrorRecord r;
    bool ok[6];
    r.method = cells[0];
    r.dim = int(parse_long(cells[1], ok[0]));
    r.N = int(parse_long(cells[2], ok[1]));
    r.alpha = parse_double(cells[3], ok[2]);
    r.tau = parse_double(cells[4], ok[3]);
    r.err0 = parse_double(cells[5], ok[4]);
    r.wall_seconds = parse_double(cells[6], ok[5]);
    if (!std::all_of(std::begin(ok), std::end(ok), [](bool b) { return b; })) {
      throw CsvError("malformed number", number);
    }
    if (cells[7] != "ok" && cells[7] != "blowup") throw CsvError("flag must be ok or blowup", number);
    r.blowup = cells[7] == "blowup";
    try {
      parse_method(r.method);
    } catch (const std::invalid_argument&) {
      throw CsvError("unknown method '" + r.method + "'", number);
    }
    if (!r.blowup && !(r.err0 >= 0 && std::isfinite(r.err0))) throw CsvError("error must be finite", number);
    records.push_back(r);
  }
  if (records.empty()) throw CsvError("CSV has no data rows", number);
  return records;
}

std::vector<ErrorRecord> select(const std::vector<ErrorRecord>& records, const std::string& method, double alpha) {
  std::vector<ErrorRecord> out;
  for (const auto& r : records) {
    if (r.method == method && r.alpha == alpha) out.push_back(r);
  }
  return out;
}

}  // namespace hrwave
