#pragma once

// Self-contained SVG figures and gnuplot scripts.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "hrwave/harness.hpp"

namespace hrwave::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// One series per (method, alpha), ok rows only, labeled with the fitted
/// slope when there are at least three points.
std::vector<Series> convergence_series(const std::vector<ErrorRecord>& records);

/// Log-log chart with ticks at every decade.
std::string loglog_svg(const std::vector<Series>& series, const std::string& title);
std::string loglog_gnuplot(const std::vector<Series>& series, const std::string& title, const std::string& png_name);

/// Line plot of 1D profiles.
std::string profile_svg(const std::vector<Series>& series, const std::string& title);

struct Raster {
  std::string label;
  Eigen::ArrayXXd values;  // row = x1, column = x2
};

/// Grayscale panels sharing one color scale.
std::string raster_svg(const std::vector<Raster>& panels, const std::string& title);

}  // namespace hrwave::cli
