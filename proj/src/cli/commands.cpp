#include "hrwave/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "hrwave/cli/config.hpp"
#include "hrwave/cli/svg.hpp"
#include "hrwave/harness.hpp"
#include "hrwave/integrate.hpp"
#include "hrwave/snapshot.hpp"

namespace hrwave::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// String-valued flags that a --config file may fill in.
class Flags {
 public:
  explicit Flags(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_, "key=value file merged under explicit flags");
  }

  Flags& value(const std::string& name, const std::string& help) {
    options_[name] = app_->add_option("--" + name, values_[name], help);
    return *this;
  }

  Flags& toggle(const std::string& name, const std::string& help) {
    options_[name] = app_->add_flag("--" + name, toggles_[name], help);
    return *this;
  }

  void merge() {
    if (config_.empty()) return;
    for (const auto& [key, text] : read_key_values(config_)) {
      const auto it = options_.find(key);
      if (it == options_.end()) throw UsageError(config_ + ": unknown key '" + key + "'");
      if (it->second->count() > 0) continue;
      if (toggles_.count(key)) {
        if (text != "true" && text != "false" && text != "1" && text != "0") {
          throw UsageError(config_ + ": " + key + " must be true or false");
        }
        toggles_[key] = text == "true" || text == "1";
      } else {
        values_[key] = text;
      }
      from_config_.insert(key);
    }
  }

  bool has(const std::string& name) const { return options_.at(name)->count() > 0 || from_config_.count(name); }
  std::string get(const std::string& name, const std::string& fallback) const {
    return has(name) ? values_.at(name) : fallback;
  }
  std::string require(const std::string& name) const {
    if (!has(name)) throw UsageError("--" + name + " is required");
    return values_.at(name);
  }
  bool on(const std::string& name) const { return toggles_.at(name); }

 private:
  CLI::App* app_;
  std::string config_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> toggles_;
  std::map<std::string, CLI::Option*> options_;
  std::set<std::string> from_config_;
};

void say(std::ostream& out, const std::string& line) {
  out << line << '\n';
  out.flush();
}

struct Problem {
  int dim = 1;
  Nonlinearity nl;
  InitialData init;
  double T = 0.25;
  double tau_ratio = 0.25;
  std::uint64_t seed = 0;
  double default_alpha = 2;
};

void add_problem_flags(Flags& f) {
  f.value("dim", "spatial dimension, 1 or 2 (default 1)")
      .value("g", "nonlinearity: sine:A, cubic:L or linear")
      .value("m", "mass term m > 0 (default 1)")
      .value("init", "preset name, .hrwv snapshot or key=value file")
      .value("T", "final time (default 0.25)")
      .value("tau-ratio", "tau = ratio / N (default 0.25)")
      .value("alpha", "recovery exponent for hrlri (default 2 in 1D, 1.5 in 2D)")
      .value("seed", "seed for random initial data (default 0)")
      .value("out", "output directory (default hrwave-out)");
}

Problem read_problem(const Flags& f) {
  Problem p;
  const std::string dim = f.get("dim", "1");
  if (dim != "1" && dim != "2") throw UsageError("--dim must be 1 or 2");
  p.dim = dim == "1" ? 1 : 2;
  p.default_alpha = p.dim == 1 ? 2.0 : 1.5;
  p.seed = parse_u64(f.get("seed", "0"), "--seed");
  const double m = parse_real(f.get("m", "1"), "--m");
  try {
    p.nl = Nonlinearity::parse(f.require("g"), m);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--g: ") + e.what());
  }
  p.T = parse_real(f.get("T", "0.25"), "--T");
  if (!(p.T > 0)) throw UsageError("--T must be positive");
  p.tau_ratio = parse_real(f.get("tau-ratio", "0.25"), "--tau-ratio");
  if (!(p.tau_ratio > 0)) throw UsageError("--tau-ratio must be positive");
  if (f.has("alpha")) {
    p.default_alpha = parse_real(f.get("alpha", ""), "--alpha");
    if (!(p.default_alpha >= 1)) throw UsageError("--alpha must be >= 1");
  }
  p.init = parse_init(f.require("init"), p.dim, p.seed);
  return p;
}

std::vector<MethodSpec> read_methods(const std::string& text, double default_alpha) {
  std::vector<MethodSpec> methods;
  for (const auto& item : split_list(text)) {
    try {
      methods.push_back(MethodSpec::parse(item, default_alpha));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--method: ") + e.what());
    }
  }
  if (methods.empty()) throw UsageError("--method is empty");
  return methods;
}

template <typename F>
void as_usage(F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

fs::path output_dir(const Flags& f) {
  const fs::path dir = f.get("out", "hrwave-out");
  if (dir.empty()) throw UsageError("--out is empty");
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

json describe(const Problem& p) {
  return {{"dim", p.dim},     {"g", p.nl.label()},          {"m", p.nl.m}, {"init", p.init.name},
          {"T", p.T},         {"tau_ratio", p.tau_ratio},   {"seed", p.seed}, {"rng", kRngName}};
}

// ---- run ----

void add_run_flags(Flags& f) {
  add_problem_flags(f);
  f.value("N", "spatial bandwidth, a power of two")
      .value("method", "hrlri, lie, strang or deuflhard (default hrlri)")
      .value("snapshots", "comma-separated output times")
      .toggle("timing", "record wall-clock time in metadata.json");
}

int cmd_run(const Flags& f, std::ostream& out, std::ostream&) {
  const Problem p = read_problem(f);
  const int N = parse_pow2(f.require("N"), "--N");
  const MethodSpec method = read_methods(f.get("method", "hrlri"), p.default_alpha).front();
  const SchemeConfig cfg{method.method, N, method.alpha, p.tau_ratio / N, p.T, p.nl};
  as_usage([&] { cfg.validate(); });
  const long M = cfg.steps();
  std::vector<double> times;
  if (f.has("snapshots")) times = parse_real_list(f.get("snapshots", ""), "--snapshots");
  for (double t : times) {
    const double r = t / cfg.tau;
    if (t < 0 || std::round(r) > double(M) || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
      throw UsageError("--snapshots: " + format_double(t) + " is not a multiple of tau in [0, T]");
    }
  }
  const fs::path dir = output_dir(f);
  const bool timing = f.on("timing");

  fs::create_directories(dir);
  const auto initial = build_initial(p.init, cfg.bandwidth());
  save_snapshot(dir / "initial.hrwv", {0.0, assemble_solution(make_state(cfg, initial), p.nl.m)});
  const RunResult result = run(cfg, initial, {times});
  json snaps = json::array();
  for (std::size_t i = 0; i < result.snapshots.size(); ++i) {
    const std::string name = "snapshot_" + std::to_string(i) + ".hrwv";
    save_snapshot(dir / name, result.snapshots[i]);
    snaps.push_back({{"file", name}, {"time", result.snapshots[i].time}});
  }
  save_snapshot(dir / "final.hrwv", {result.final_time, result.final_state});

  json meta = describe(p);
  meta["command"] = "run";
  meta["method"] = method.label();
  meta["N"] = N;
  meta["alpha"] = cfg.alpha;
  meta["K"] = cfg.bandwidth();
  meta["tau"] = cfg.tau;
  meta["steps"] = result.steps;
  meta["final_time"] = result.final_time;
  meta["snapshots"] = snaps;
  meta["blowup"] = result.blowup;
  meta["blowup_message"] = result.blowup_message;
  meta["wall_seconds"] = timing ? result.wall_seconds : 0.0;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");

  say(out, method.label() + " N=" + std::to_string(N) + " K=" + std::to_string(cfg.bandwidth()) +
               " tau=" + format_double(cfg.tau) + " steps=" + std::to_string(result.steps) +
               " t=" + format_double(result.final_time));
  if (result.blowup) {
    say(out, "blow-up: " + result.blowup_message);
    return kBlowUp;
  }
  say(out, "wrote " + dir.string());
  return kOk;
}

// ---- converge ----

void add_reference_flags(Flags& f) {
  f.value("ref-N", "reference bandwidth (default 4096 in 1D, 128 in 2D)")
      .value("ref-alpha", "reference recovery exponent (default: largest method alpha)")
      .value("threads", "worker threads (default: all cores)");
}

ExperimentSpec read_experiment(const Flags& f, const Problem& p, const std::vector<MethodSpec>& methods,
                               std::vector<int> sweep) {
  ExperimentSpec spec;
  spec.init = p.init;
  spec.nl = p.nl;
  spec.T = p.T;
  spec.tau_ratio = p.tau_ratio;
  spec.seed = p.seed;
  spec.methods = methods;
  spec.sweep = std::move(sweep);
  if (f.has("ref-N")) spec.N_ref = parse_pow2(f.get("ref-N", ""), "--ref-N");
  if (f.has("ref-alpha")) {
    spec.alpha_ref = parse_real(f.get("ref-alpha", ""), "--ref-alpha");
    if (!(spec.alpha_ref >= 1)) throw UsageError("--ref-alpha must be >= 1");
  }
  if (f.has("threads")) {
    const auto threads = parse_u64(f.get("threads", ""), "--threads");
    if (threads > 1024) throw UsageError("--threads is too large");
    spec.threads = int(threads);
  }
  spec = spec.resolved();
  as_usage([&] { spec.validate(); });
  return spec;
}

void warn_reference(const ExperimentSpec& spec, std::ostream& err) {
  const int largest = *std::max_element(spec.sweep.begin(), spec.sweep.end());
  if (spec.N_ref < 4 * largest) {
    say(err, "warning: reference N " + std::to_string(spec.N_ref) + " is below 4 * max N = " +
                 std::to_string(4 * largest) + "; errors at the finest N are less reliable");
  }
}

void add_converge_flags(Flags& f) {
  add_problem_flags(f);
  add_reference_flags(f);
  f.value("sweep", "comma-separated powers of two")
      .value("method", "comma-separated methods, e.g. hrlri:alpha=2,strang (default hrlri)")
      .toggle("timing", "record wall-clock seconds in the CSV")
      .toggle("svg", "also write convergence.svg and convergence.gp");
}

int cmd_converge(const Flags& f, std::ostream& out, std::ostream& err) {
  const Problem p = read_problem(f);
  const auto sweep = parse_pow2_list(f.require("sweep"), "--sweep");
  const auto methods = read_methods(f.get("method", "hrlri"), p.default_alpha);
  ExperimentSpec spec = read_experiment(f, p, methods, sweep);
  spec.record_timing = f.on("timing");
  const fs::path dir = output_dir(f);
  warn_reference(spec, err);

  fs::create_directories(dir);
  const auto records = run_convergence(spec);
  {
    std::ofstream csv(dir / "convergence.csv", std::ios::binary);
    write_csv(csv, records);
    if (!csv) throw std::runtime_error("cannot write convergence.csv");
  }
  json slopes = json::object();
  bool blowup = false;
  for (const auto& method : spec.methods) {
    std::vector<ErrorRecord> ok;
    for (const auto& r : select(records, to_string(method.method), method.alpha)) {
      if (r.blowup) {
        blowup = true;
        say(out, "blowup " + method.label() + " N=" + std::to_string(r.N));
      } else {
        ok.push_back(r);
      }
    }
    for (const auto& r : ok) {
      say(out, method.label() + " N=" + std::to_string(r.N) + " tau=" + format_double(r.tau) +
                   " err=" + format_double(r.err0));
    }
    if (ok.size() >= 3) {
      const double slope = fit_slope(ok);
      say(out, "slope " + method.label() + " " + format_double(slope));
      slopes[method.label()] = slope;
    }
  }
  json meta = describe(p);
  meta["command"] = "converge";
  meta["sweep"] = spec.sweep;
  json labels = json::array();
  for (const auto& m : spec.methods) labels.push_back(m.label());
  meta["methods"] = labels;
  meta["N_ref"] = spec.N_ref;
  meta["alpha_ref"] = spec.alpha_ref;
  meta["K_ref"] = high_bandwidth(spec.N_ref, spec.alpha_ref);
  meta["slopes"] = slopes;
  write_text(dir / "converge.json", meta.dump(2) + "\n");
  if (f.on("svg")) {
    const auto series = convergence_series(records);
    const std::string title = p.init.name + ", g = " + p.nl.label();
    write_text(dir / "convergence.svg", loglog_svg(series, title));
    write_text(dir / "convergence.gp", loglog_gnuplot(series, title, "convergence.png"));
  }
  return blowup ? kBlowUp : kOk;
}

// ---- compare ----

void add_compare_flags(Flags& f) {
  add_problem_flags(f);
  add_reference_flags(f);
  f.value("N", "spatial bandwidth shared by all methods")
      .value("method", "at least two comma-separated methods")
      .value("grid-factor", "refinement of the evaluation grid, a power of two (default 4)");
}

/// Grid values of u at bandwidth G >= u.N.
GridSamples<double> on_grid(const SpectralField<double>& u, int G) {
  return inverse_transform(u.N == G ? u : symmetric_embed(u, G));
}

int cmd_compare(const Flags& f, std::ostream& out, std::ostream& err) {
  const Problem p = read_problem(f);
  const int N = parse_pow2(f.require("N"), "--N");
  const auto methods = read_methods(f.require("method"), p.default_alpha);
  if (methods.size() < 2) throw UsageError("compare needs at least two methods");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (methods[i] == methods[j]) throw UsageError("method " + methods[i].label() + " is listed twice");
    }
  }
  const int grid_factor = parse_pow2(f.get("grid-factor", "4"), "--grid-factor");
  const ExperimentSpec spec = read_experiment(f, p, methods, {N});
  const fs::path dir = output_dir(f);
  warn_reference(spec, err);

  int widest = 0;
  std::vector<SchemeConfig> configs;
  for (const auto& m : methods) {
    configs.push_back({m.method, N, m.alpha, p.tau_ratio / N, p.T, p.nl});
    widest = std::max(widest, configs.back().bandwidth());
  }
  fs::create_directories(dir);
  const Reference ref = compute_reference(spec, widest);
  if (ref.blowup) {
    say(out, "blow-up in the reference solution");
    return kBlowUp;
  }
  save_snapshot(dir / "reference.hrwv", {p.T, ref.body});

  std::ostringstream table;
  table << "method,alpha,N,tau,overshoot,err_L2Hm1\n";
  say(out, "method                 N      tau          overshoot        err_L2Hm1");
  std::vector<PairField<double>> finals;
  bool blowup = false;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& cfg = configs[i];
    const RunResult result = run(cfg, build_initial(spec.init, cfg.bandwidth()));
    save_snapshot(dir / ("final_" + file_stem(methods[i].label()) + ".hrwv"), {result.final_time, result.final_state});
    const double over = result.blowup ? NAN : overshoot(result.final_state, band_limit(ref.body, result.final_state.N()), grid_factor);
    const double error = result.blowup ? NAN : compute_error(result.final_state, ref);
    blowup = blowup || result.blowup;
    table << to_string(cfg.method) << ',' << format_double(cfg.alpha) << ',' << N << ',' << format_double(cfg.tau)
          << ',' << format_double(over) << ',' << format_double(error) << '\n';
    char row[160];
    std::snprintf(row, sizeof row, "%-22s %-6d %-12.6g %-16.9g %.9g", methods[i].label().c_str(), N, cfg.tau, over,
                  error);
    say(out, row);
    finals.push_back(result.final_state);
  }
  write_text(dir / "overshoot.csv", table.str());

  int G = ref.body.N();
  for (const auto& w : finals) G = std::max(G, w.N());
  const std::string title = p.init.name + ", g = " + p.nl.label() + ", N = " + std::to_string(N) +
                            ", T = " + format_double(p.T);
  if (p.dim == 1) {
    const int points = 2 * G;
    const int stride = std::max(1, points / 2048);
    std::vector<Series> series;
    std::vector<GridSamples<double>> grids;
    for (std::size_t i = 0; i <= finals.size(); ++i) {
      const bool is_ref = i == finals.size();
      grids.push_back(on_grid(is_ref ? ref.body.u : finals[i].u, G));
      Series s{is_ref ? "reference" : methods[i].label(), {}, {}};
      for (int j = 0; j < points; j += stride) {
        s.x.push_back(double(j) / points);
        s.y.push_back(grids.back().values[j]);
      }
      series.push_back(std::move(s));
    }
    std::ostringstream csv;
    csv << "x";
    for (const auto& s : series) csv << ',' << s.label;
    csv << '\n';
    for (std::size_t j = 0; j < series[0].x.size(); ++j) {
      csv << format_double(series[0].x[j]);
      for (const auto& s : series) csv << ',' << format_double(s.y[j]);
      csv << '\n';
    }
    write_text(dir / "profiles.csv", csv.str());
    write_text(dir / "compare.svg", profile_svg(series, title));
  } else {
    const int side = 2 * G;
    const int stride = std::max(1, side / 64);
    const int cells = side / stride;
    std::vector<Raster> panels;
    for (std::size_t i = 0; i <= finals.size(); ++i) {
      const bool is_ref = i == finals.size();
      const auto grid = on_grid(is_ref ? ref.body.u : finals[i].u, G);
      Raster r{is_ref ? "reference" : methods[i].label(), Eigen::ArrayXXd(cells, cells)};
      for (int a = 0; a < cells; ++a) {
        for (int b = 0; b < cells; ++b) r.values(a, b) = grid.values[Eigen::Index(a) * stride * side + b * stride];
      }
      panels.push_back(std::move(r));
    }
    write_text(dir / "compare.svg", raster_svg(panels, title));
  }
  return blowup ? kBlowUp : kOk;
}

// ---- plot ----

void add_plot_flags(Flags& f) {
  f.value("csv", "convergence CSV to chart")
      .value("snapshot", "comma-separated .hrwv files to draw")
      .value("verify-linear", "run directory of a --g linear run to check against the free group")
      .value("title", "figure title")
      .value("out", "output directory (default hrwave-out)");
}

int verify_linear(const fs::path& dir, std::ostream& out) {
  std::ifstream in(dir / "metadata.json");
  if (!in) throw UsageError("cannot read " + (dir / "metadata.json").string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("metadata.json: " + std::string(e.what()));
  }
  if (meta.value("g", "") != "linear") throw UsageError("--verify-linear needs a run with --g linear");
  const double m = meta.at("m").get<double>();
  const Snapshot initial = load_snapshot(dir / "initial.hrwv");
  const Snapshot final = load_snapshot(dir / "final.hrwv");
  const auto expected = apply_group(initial.state, final.time, m);
  const double rel = compute_error(final.state, expected) / pair_norm(expected, 0.0);
  say(out, "linear check: relative error " + format_double(rel) + " at t=" + format_double(final.time));
  return rel <= 1e-10 ? kOk : kFailure;
}

int cmd_plot(const Flags& f, std::ostream& out, std::ostream&) {
  if (!f.has("csv") && !f.has("snapshot") && !f.has("verify-linear")) {
    throw UsageError("give --csv, --snapshot or --verify-linear");
  }
  const fs::path dir = output_dir(f);
  int status = kOk;
  if (f.has("csv")) {
    const fs::path path = f.get("csv", "");
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path.string());
    const auto records = read_csv(in);
    const auto series = convergence_series(records);
    const std::string title = f.get("title", "convergence");
    fs::create_directories(dir);
    write_text(dir / "plot.svg", loglog_svg(series, title));
    write_text(dir / "plot.gp", loglog_gnuplot(series, title, "plot.png"));
    say(out, "wrote " + (dir / "plot.svg").string());
  }
  if (f.has("snapshot")) {
    std::vector<std::pair<std::string, Snapshot>> snaps;
    for (const auto& file : split_list(f.get("snapshot", ""))) {
      snaps.emplace_back(fs::path(file).stem().string(), load_snapshot(file));
    }
    if (snaps.empty()) throw UsageError("--snapshot is empty");
    const int dim = snaps[0].second.state.dim();
    int G = 0;
    for (const auto& [name, s] : snaps) {
      if (s.state.dim() != dim) throw UsageError("snapshots mix 1D and 2D data");
      G = std::max(G, s.state.N());
    }
    const std::string title = f.get("title", "u at t = " + format_double(snaps[0].second.time));
    fs::create_directories(dir);
    if (dim == 1) {
      std::vector<Series> series;
      const int stride = std::max(1, 2 * G / 2048);
      for (const auto& [name, s] : snaps) {
        const auto grid = on_grid(s.state.u, G);
        Series line{name, {}, {}};
        for (int j = 0; j < 2 * G; j += stride) {
          line.x.push_back(double(j) / (2 * G));
          line.y.push_back(grid.values[j]);
        }
        series.push_back(std::move(line));
      }
      write_text(dir / "profile.svg", profile_svg(series, title));
    } else {
      std::vector<Raster> panels;
      const int side = 2 * G;
      const int stride = std::max(1, side / 64);
      const int cells = side / stride;
      for (const auto& [name, s] : snaps) {
        const auto grid = on_grid(s.state.u, G);
        Raster r{name, Eigen::ArrayXXd(cells, cells)};
        for (int a = 0; a < cells; ++a) {
          for (int b = 0; b < cells; ++b) r.values(a, b) = grid.values[Eigen::Index(a) * stride * side + b * stride];
        }
        panels.push_back(std::move(r));
      }
      write_text(dir / "profile.svg", raster_svg(panels, title));
    }
    say(out, "wrote " + (dir / "profile.svg").string());
  }
  if (f.has("verify-linear")) status = verify_linear(f.get("verify-linear", ""), out);
  return status;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral integrators for semilinear wave equations on the torus", "hrwave"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::unique_ptr<Flags> flags;
    std::function<int(const Flags&, std::ostream&, std::ostream&)> body;
  };
  std::vector<Command> commands;
  const auto add = [&](const char* name, const char* help, void (*setup)(Flags&), auto body) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto flags = std::make_unique<Flags>(sub);
    setup(*flags);
    commands.push_back({sub, std::move(flags), body});
  };
  add("run", "integrate one problem and write snapshots", add_run_flags, cmd_run);
  add("converge", "error against a reference over a sweep of N", add_converge_flags, cmd_converge);
  add("compare", "several methods at one N: overshoot and profiles", add_compare_flags, cmd_compare);
  add("plot", "render CSV or snapshots, or check a linear run", add_plot_flags, cmd_plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  for (auto& command : commands) {
    if (!command.app->parsed()) continue;
    try {
      command.flags->merge();
      return command.body(*command.flags, out, err);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << command.app->help();
      return kUsage;
    } catch (const CsvError& e) {
      err << "error: line " << e.line() << ": " << e.what() << '\n';
      return kUsage;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kFailure;
    }
  }
  return kUsage;
}

}  // namespace hrwave::cli
