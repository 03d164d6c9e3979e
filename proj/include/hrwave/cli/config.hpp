#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrwave/model.hpp"

namespace hrwave::cli {

/// Bad flags or inputs; reported with exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

std::vector<std::string> split_list(const std::string& text, char sep = ',');

int parse_pow2(const std::string& text, const std::string& flag);
double parse_real(const std::string& text, const std::string& flag);
std::uint64_t parse_u64(const std::string& text, const std::string& flag);
std::vector<int> parse_pow2_list(const std::string& text, const std::string& flag);
std::vector<double> parse_real_list(const std::string& text, const std::string& flag);

/// A preset name, an HRWV snapshot, or a key=value description:
///   type = boxes | rough | smooth
///   u = lo,hi,height ; ...      (2D: lo1,hi1,lo2,hi2,height)
///   v = ...
///   exponent_u, exponent_v, target_u, target_v, seed   (rough)
///   label = sin                                         (smooth)
InitialData parse_init(const std::string& text, int dim, std::uint64_t seed);

/// Label usable as a file name: non-alphanumerics become '_'.
std::string file_stem(const std::string& label);

}  // namespace hrwave::cli
