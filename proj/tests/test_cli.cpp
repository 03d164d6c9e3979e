#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "hrwave/cli/commands.hpp"
#include "hrwave/harness.hpp"
#include "hrwave/snapshot.hpp"

using namespace hrwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome hrwave_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hrwave");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main(int(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

/// Fresh directory removed again on scope exit.
struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name)
      : root(fs::temp_directory_path() / ("hrwave_cli_" + std::to_string(::getpid()) + "_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const std::string& leaf) const { return (root / leaf).string(); }
};

const std::vector<std::string> kSineGordon = {"--g", "sine:40", "--init", "boxes:sg1d"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("run writes the final snapshot and metadata") {
  Scratch dir("run");
  const auto r = hrwave_cli({"run", "--dim", "1", "--g", "sine:40", "--init", "boxes:sg1d", "--N", "128", "--alpha", "2",
                      "--tau-ratio", "0.25", "--T", "0.25", "--m", "1", "--out", dir / "d"});
  REQUIRE(r.status == 0);
  const Snapshot final = load_snapshot(dir / "d/final.hrwv");
  CHECK(final.time == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(final.state.N() == 16384);
  const auto meta = nlohmann::json::parse(slurp(dir / "d/metadata.json"));
  CHECK(meta.at("N") == 128);
  CHECK(meta.at("steps") == 128);
  CHECK(meta.at("blowup") == false);
  CHECK(meta.at("rng") == "mt19937_64");
  CHECK(std::distance(fs::directory_iterator(dir.root), fs::directory_iterator{}) == 1);
}

TEST_CASE("run is byte-for-byte repeatable") {
  Scratch dir("repeat");
  const auto args = with({"run", "--N", "32", "--snapshots", "0.125"}, kSineGordon);
  REQUIRE(hrwave_cli(with(args, {"--out", dir / "a"})).status == 0);
  REQUIRE(hrwave_cli(with(args, {"--out", dir / "b"})).status == 0);
  for (const char* file : {"final.hrwv", "snapshot_0.hrwv", "metadata.json", "initial.hrwv"}) {
    CHECK(slurp(dir / ("a/" + std::string(file))) == slurp(dir / ("b/" + std::string(file))));
  }
}

TEST_CASE("missing or malformed flags exit with usage status") {
  Scratch dir("usage");
  auto r = hrwave_cli(with({"run", "--out", dir / "x"}, kSineGordon));
  CHECK(r.status == 2);
  CHECK(r.err.find("--N is required") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x"));

  CHECK(hrwave_cli(with({"run", "--N", "100", "--out", dir / "x"}, kSineGordon)).status == 2);
  CHECK(hrwave_cli(with({"run", "--N", "32", "--alpha", "0.5", "--out", dir / "x"}, kSineGordon)).status == 2);
  CHECK(hrwave_cli(with({"run", "--N", "32", "--T", "0.3", "--tau-ratio", "0.7", "--out", dir / "x"}, kSineGordon)).status ==
        2);
  CHECK(hrwave_cli({"run", "--N", "32", "--g", "tanh:3", "--init", "boxes:sg1d", "--out", dir / "x"}).status == 2);
  CHECK(hrwave_cli({"run", "--N", "32", "--g", "sine:1", "--init", "nosuch", "--out", dir / "x"}).status == 2);
  CHECK(hrwave_cli(with({"run", "--N", "32", "--snapshots", "0.1", "--out", dir / "x"}, kSineGordon)).status == 2);
  CHECK(hrwave_cli(with({"run", "--N", "32", "--bogus", "1"}, kSineGordon)).status == 2);
  CHECK(hrwave_cli({}).status == 2);
  CHECK_FALSE(fs::exists(dir / "x"));
  CHECK(hrwave_cli({"run", "--help"}).status == 0);
}

TEST_CASE("config file fills flags and explicit flags win") {
  Scratch dir("config");
  {
    std::ofstream cfg(dir / "exp.cfg");
    cfg << "# sine-Gordon\ng = sine:40\ninit = boxes:sg1d\nN = 64\nmethod = strang\n";
  }
  REQUIRE(hrwave_cli({"run", "--config", dir / "exp.cfg", "--N", "16", "--out", dir / "o"}).status == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "o/metadata.json"));
  CHECK(meta.at("N") == 16);
  CHECK(meta.at("method") == "strang");
  CHECK(meta.at("g") == "sine:40");

  std::ofstream(dir / "bad.cfg") << "colour = blue\n";
  CHECK(hrwave_cli(with({"run", "--config", dir / "bad.cfg", "--N", "16", "--out", dir / "o"}, kSineGordon)).status == 2);
}

TEST_CASE("a linear run reproduces the free group") {
  Scratch dir("linear");
  for (const char* method : {"hrlri", "lie", "strang", "deuflhard"}) {
    CAPTURE(method);
    const std::string out = dir / method;
    REQUIRE(hrwave_cli({"run", "--g", "linear", "--m", "2", "--init", "boxes:kg1d", "--N", "64", "--T", "1", "--method",
                 method, "--out", out})
                .status == 0);
    const auto check = hrwave_cli({"plot", "--verify-linear", out, "--out", dir / "plots"});
    CHECK(check.status == 0);
    CHECK(check.out.find("relative error") != std::string::npos);
  }

  // Replacing the final state by the initial data must fail the check.
  const std::string out = dir / "hrlri";
  Snapshot tampered = load_snapshot(out + "/initial.hrwv");
  tampered.time = 1;
  save_snapshot(out + "/final.hrwv", tampered);
  CHECK(hrwave_cli({"plot", "--verify-linear", out, "--out", dir / "plots"}).status == 1);

  REQUIRE(hrwave_cli(with({"run", "--N", "16", "--out", dir / "nl"}, kSineGordon)).status == 0);
  CHECK(hrwave_cli({"plot", "--verify-linear", dir / "nl", "--out", dir / "plots"}).status == 2);
}

TEST_CASE("run reports blow-up with status 3") {
  Scratch dir("blowup");
  const auto r = hrwave_cli({"run", "--g", "cubic:1e8", "--init", "boxes:kg1d", "--N", "32", "--out", dir / "b"});
  CHECK(r.status == 3);
  const auto meta = nlohmann::json::parse(slurp(dir / "b/metadata.json"));
  CHECK(meta.at("blowup") == true);
  CHECK(meta.at("blowup_message").get<std::string>().find("step") != std::string::npos);
}

TEST_CASE("converge writes the CSV schema deterministically") {
  Scratch dir("converge");
  const auto args = with({"converge", "--sweep", "32,64", "--ref-N", "128"}, kSineGordon);
  const auto first = hrwave_cli(with(args, {"--out", dir / "a", "--threads", "2"}));
  REQUIRE(first.status == 0);
  CHECK(first.err.find("warning") != std::string::npos);
  const std::string csv = slurp(dir / "a/convergence.csv");
  CHECK(count(csv, "\n") == 3);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  REQUIRE(hrwave_cli(with(args, {"--out", dir / "b", "--threads", "1"})).status == 0);
  CHECK(slurp(dir / "b/convergence.csv") == csv);
  CHECK_FALSE(fs::exists(dir / "a/convergence.svg"));
}

TEST_CASE("printed slopes agree with a fit of the written CSV") {
  Scratch dir("slopes");
  const auto r = hrwave_cli(with({"converge", "--sweep", "16,32,64", "--ref-N", "256", "--method", "hrlri:alpha=2,hrlri:alpha=1,lie",
                           "--svg", "--out", dir / "c"},
                          kSineGordon));
  REQUIRE(r.status == 0);
  std::ifstream in(dir / "c/convergence.csv");
  const auto records = read_csv(in);
  CHECK(records.size() == 9);
  const std::regex line("slope (\\S+) (\\S+)");
  int seen = 0;
  for (std::sregex_iterator it(r.out.begin(), r.out.end(), line), end; it != end; ++it, ++seen) {
    const MethodSpec m = MethodSpec::parse((*it)[1], 2.0);
    const double printed = std::stod((*it)[2]);
    CHECK(printed == fit_slope(select(records, to_string(m.method), m.alpha)));
  }
  CHECK(seen == 3);
  const std::string svg = slurp(dir / "c/convergence.svg");
  CHECK(count(svg, "<polyline") == 3);
  CHECK(slurp(dir / "c/convergence.gp").find("set logscale xy") != std::string::npos);
}

TEST_CASE("compare needs two methods and its overshoot table matches the snapshots") {
  Scratch dir("compare");
  CHECK(hrwave_cli(with({"compare", "--N", "64", "--method", "strang", "--ref-N", "256", "--out", dir / "one"}, kSineGordon))
            .status == 2);
  CHECK_FALSE(fs::exists(dir / "one"));

  const auto r = hrwave_cli(with({"compare", "--N", "64", "--method", "hrlri:alpha=2,strang", "--ref-N", "256",
                           "--grid-factor", "4", "--out", dir / "k"},
                          kSineGordon));
  REQUIRE(r.status == 0);
  const Snapshot ref = load_snapshot(dir / "k/reference.hrwv");
  std::ifstream table(dir / "k/overshoot.csv");
  std::string row;
  std::getline(table, row);
  CHECK(row == "method,alpha,N,tau,overshoot,err_L2Hm1");
  int rows = 0;
  for (const char* stem : {"hrlri_alpha_2", "strang"}) {
    REQUIRE(std::getline(table, row));
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 6);
    const Snapshot num = load_snapshot(dir / ("k/final_" + std::string(stem) + ".hrwv"));
    CHECK(std::stod(cells[4]) == overshoot(num.state, band_limit(ref.state, num.state.N()), 4));
    ++rows;
  }
  CHECK(rows == 2);
  const std::string profiles = slurp(dir / "k/profiles.csv");
  CHECK(profiles.rfind("x,hrlri:alpha=2,strang,reference\n", 0) == 0);
  CHECK(count(slurp(dir / "k/compare.svg"), "<polyline") == 3);
}

TEST_CASE("plot renders a convergence CSV on log-log axes") {
  Scratch dir("plot");
  {
    std::ofstream csv(dir / "two.csv");
    csv << kCsvHeader << "\n"
        << "hrlri,1,32,2,0.0078125,0.05,0,ok\nhrlri,1,64,2,0.00390625,0.025,0,ok\n"
        << "strang,1,32,1,0.0078125,0.2,0,ok\nstrang,1,64,1,0.00390625,0.14,0,ok\n";
  }
  const auto r = hrwave_cli({"plot", "--csv", dir / "two.csv", "--out", dir / "p"});
  REQUIRE(r.status == 0);
  const std::string svg = slurp(dir / "p/plot.svg");
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "class=\"legend\"") == 2);
  CHECK(svg.find(">hrlri:alpha=2<") != std::string::npos);
  CHECK(svg.find(">strang<") != std::string::npos);
  CHECK(fs::exists(dir / "p/plot.gp"));

  // Ticks sit at every decade between the enclosing powers of ten.
  for (const auto& [axis, labels] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"xtick", {"1e-3", "1e-2"}}, {"ytick", {"1e-2", "1e-1", "1e0"}}}) {
    CAPTURE(axis);
    CHECK(count(svg, "class=\"" + axis + "\"") == int(labels.size()));
    for (const auto& l : labels) CHECK(svg.find(">" + l + "<") != std::string::npos);
  }
  const std::regex xtick("class=\"xtick\" x1=\"([0-9.]+)\"");
  std::vector<double> xs;
  for (std::sregex_iterator it(svg.begin(), svg.end(), xtick), end; it != end; ++it) xs.push_back(std::stod((*it)[1]));
  REQUIRE(xs.size() == 2);
  // A point at tau = 10^-2.5 lies halfway between the two ticks.
  std::ofstream(dir / "mid.csv") << kCsvHeader << "\nlie,1,32,1," << format_double(std::pow(10.0, -2.5))
                                 << ",0.1,0,ok\n";
  REQUIRE(hrwave_cli({"plot", "--csv", dir / "mid.csv", "--out", dir / "m"}).status == 0);
  const std::string mid = slurp(dir / "m/plot.svg");
  const std::regex point("<circle cx=\"([0-9.]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(mid, m, point));
  CHECK(std::stod(m[1]) == doctest::Approx((xs[0] + xs[1]) / 2).epsilon(1e-3));
}

TEST_CASE("plot rejects empty or malformed CSV with the line number") {
  Scratch dir("badcsv");
  std::ofstream(dir / "empty.csv") << kCsvHeader << "\n";
  auto r = hrwave_cli({"plot", "--csv", dir / "empty.csv", "--out", dir / "p"});
  CHECK(r.status == 2);
  CHECK(r.err.find("no data rows") != std::string::npos);

  std::ofstream(dir / "bad.csv") << kCsvHeader << "\nhrlri,1,32,2,0.0078125,0.05,0,ok\nhrlri,1,64,2,zero,0.025,0,ok\n";
  r = hrwave_cli({"plot", "--csv", dir / "bad.csv", "--out", dir / "p"});
  CHECK(r.status == 2);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "p"));
}

TEST_CASE("plot draws snapshot profiles") {
  Scratch dir("profiles");
  REQUIRE(hrwave_cli(with({"run", "--N", "32", "--out", dir / "r"}, kSineGordon)).status == 0);
  REQUIRE(hrwave_cli({"plot", "--snapshot", dir / "r/initial.hrwv," + dir / "r/final.hrwv", "--out", dir / "p"}).status == 0);
  const std::string svg = slurp(dir / "p/profile.svg");
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find(">initial<") != std::string::npos);

  REQUIRE(hrwave_cli({"run", "--dim", "2", "--g", "sine:1", "--init", "boxes:sg2d-two", "--N", "8", "--out", dir / "r2"})
              .status == 0);
  REQUIRE(hrwave_cli({"plot", "--snapshot", dir / "r2/final.hrwv", "--out", dir / "p2"}).status == 0);
  CHECK(count(slurp(dir / "p2/profile.svg"), "<rect") > 64);
}
