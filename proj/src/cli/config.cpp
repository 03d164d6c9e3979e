#include "hrwave/cli/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hrwave/snapshot.hpp"

namespace hrwave::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<Box> parse_boxes(const std::string& text, int dim) {
  std::vector<Box> boxes;
  for (const auto& item : split_list(text, ';')) {
    const auto parts = split_list(item, ',');
    const std::size_t want = dim == 1 ? 3 : 5;
    if (parts.size() != want) {
      throw UsageError("box '" + item + "' needs " + std::to_string(want) + " comma-separated numbers");
    }
    std::vector<double> x;
    for (const auto& p : parts) x.push_back(parse_real(p, "box"));
    Box b;
    if (dim == 1) {
      b = Box{{x[0], 0}, {x[1], 1}, x[2]};
    } else {
      b = Box{{x[0], x[2]}, {x[1], x[3]}, x[4]};
    }
    for (int i = 0; i < dim; ++i) {
      if (!(0 <= b.lo[i] && b.lo[i] < b.hi[i] && b.hi[i] <= 1)) throw UsageError("box '" + item + "' is not inside [0,1]");
    }
    boxes.push_back(b);
  }
  return boxes;
}

}  // namespace

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path.string() + ":" + std::to_string(number) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x)) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& text, const std::string& flag) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || text[0] == '-' || end != text.c_str() + text.size() || errno) {
    throw UsageError(flag + ": '" + text + "' is not an unsigned integer");
  }
  return x;
}

int parse_pow2(const std::string& text, const std::string& flag) {
  const auto x = parse_u64(text, flag);
  if (x < 2 || x > (1u << 24) || (x & (x - 1))) throw UsageError(flag + ": '" + text + "' is not a power of two >= 2");
  return int(x);
}

std::vector<int> parse_pow2_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(parse_pow2(item, flag));
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, flag));
  return out;
}

InitialData parse_init(const std::string& text, int dim, std::uint64_t seed) {
  InitialData data;
  try {
    if (make_preset(text, dim, seed, data)) return data;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::filesystem::path path(text);
  if (!std::filesystem::is_regular_file(path)) throw UsageError("--init: '" + text + "' is neither a preset nor a file");
  {
    std::ifstream in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    if (in && std::memcmp(magic, "HRWV", 4) == 0) {
      const auto snap = load_snapshot(path);
      if (snap.state.dim() != dim) throw UsageError("--init: snapshot dimension does not match --dim");
      return InitialData{dim, Coefficients{snap.state}, path.filename().string()};
    }
  }
  const auto kv = read_key_values(path);
  const auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  const std::string type = get("type", "");
  data.dim = dim;
  data.name = path.filename().string();
  if (type == "boxes") {
    data.variant = Boxes{parse_boxes(get("u", ""), dim), parse_boxes(get("v", ""), dim)};
  } else if (type == "rough") {
    Rough r;
    r.exponent_u = parse_real(get("exponent_u", "1.01"), "exponent_u");
    r.exponent_v = parse_real(get("exponent_v", "0.01"), "exponent_v");
    r.target_u = parse_real(get("target_u", "1"), "target_u");
    r.target_v = parse_real(get("target_v", "1"), "target_v");
    r.seed = kv.count("seed") ? parse_u64(kv.at("seed"), "seed") : seed;
    if (!(r.target_u > 0) || !(r.target_v > 0)) throw UsageError("rough target norms must be > 0");
    data.variant = r;
  } else if (type == "smooth") {
    const std::string label = get("label", "sin");
    if (label != "sin") throw UsageError("unknown smooth label '" + label + "'");
    data.variant = Smooth{label};
  } else {
    throw UsageError(path.string() + ": type must be boxes, rough or smooth");
  }
  return data;
}

std::string file_stem(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out;
}

}  // namespace hrwave::cli
