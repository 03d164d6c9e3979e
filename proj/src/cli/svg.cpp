#include "hrwave/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace hrwave::cli {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string color(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof *kPalette)]; }

std::string header(const std::string& title) {
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  return o.str();
}

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

void legend(std::ostringstream& o, const std::vector<Series>& series) {
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 16 + 20 * double(i);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 24) << "\" y2=\"" << num(y)
      << "\" stroke=\"" << color(i) << "\" stroke-width=\"2\"/>\n"
      << "<text class=\"legend\" x=\"" << num(x + 30) << "\" y=\"" << num(y + 4) << "\">" << escape(series[i].label)
      << "</text>\n";
  }
}

void frame(std::ostringstream& o) {
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth - kLeft - kRight)
    << "\" height=\"" << num(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
}

}  // namespace

std::vector<Series> convergence_series(const std::vector<ErrorRecord>& records) {
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& r : records) {
    const std::pair<std::string, double> key{r.method, r.alpha};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  std::vector<Series> out;
  for (const auto& [method, alpha] : keys) {
    std::vector<ErrorRecord> ok;
    for (const auto& r : select(records, method, alpha)) {
      if (!r.blowup && r.err0 > 0) ok.push_back(r);
    }
    if (ok.empty()) continue;
    std::sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
    Series s;
    s.label = MethodSpec{parse_method(method), alpha}.label();
    if (ok.size() >= 3) {
      char buf[48];
      std::snprintf(buf, sizeof buf, " (slope %.2f)", fit_slope(ok));
      s.label += buf;
    }
    for (const auto& r : ok) {
      s.x.push_back(r.tau);
      s.y.push_back(r.err0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string loglog_svg(const std::vector<Series>& series, const std::string& title) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = xmax = ymin = ymax = 0;
  Axis ax{std::floor(xmin), std::ceil(xmax)}, ay{std::floor(ymin), std::ceil(ymax)};
  if (ax.hi == ax.lo) ax.hi += 1;
  if (ay.hi == ay.lo) ay.hi += 1;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::ostringstream o;
  o << header(title);
  frame(o);
  for (int d = int(ax.lo); d <= int(ax.hi); ++d) {
    const double x = ax.map(d, x0, x1);
    o << "<line class=\"xtick\" x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\""
      << num(y0 + 6) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 20) << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = int(ay.lo); d <= int(ay.hi); ++d) {
    const double y = ay.map(d, y0, y1);
    o << "<line class=\"ytick\" x1=\"" << num(x0 - 6) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\""
      << num(y) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(x0 - 10) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">tau</text>\n"
    << "<text x=\"20\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << num((y0 + y1) / 2) << ")\">error in L2 x H^-1</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    o << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      o << (j ? " " : "") << num(ax.map(std::log10(s.x[j]), x0, x1)) << ',' << num(ay.map(std::log10(s.y[j]), y0, y1));
    }
    o << "\"/>\n";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      o << "<circle cx=\"" << num(ax.map(std::log10(s.x[j]), x0, x1)) << "\" cy=\""
        << num(ay.map(std::log10(s.y[j]), y0, y1)) << "\" r=\"3\" fill=\"" << color(i) << "\"/>\n";
    }
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

std::string loglog_gnuplot(const std::vector<Series>& series, const std::string& title, const std::string& png_name) {
  std::ostringstream o;
  o << "set terminal pngcairo size 720,480\n"
    << "set output '" << png_name << "'\n"
    << "set title '" << title << "'\n"
    << "set logscale xy\nset format x '1e%L'\nset format y '1e%L'\n"
    << "set xlabel 'tau'\nset ylabel 'error in L2 x H^-1'\nset key outside right\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    o << "$s" << i << " << EOD\n";
    for (std::size_t j = 0; j < series[i].x.size(); ++j) {
      o << format_double(series[i].x[j]) << ' ' << format_double(series[i].y[j]) << '\n';
    }
    o << "EOD\n";
  }
  o << "plot";
  for (std::size_t i = 0; i < series.size(); ++i) {
    o << (i ? ", \\\n    " : " ") << "$s" << i << " using 1:2 with linespoints lw 2 title '" << series[i].label << "'";
  }
  o << '\n';
  return o.str();
}

std::string profile_svg(const std::vector<Series>& series, const std::string& title) {
  double ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (double y : s.y) {
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  const double pad = 0.05 * std::max(ymax - ymin, 1e-12);
  const Axis ax{0, 1}, ay{ymin - pad, ymax + pad};
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::ostringstream o;
  o << header(title);
  frame(o);
  for (int i = 0; i <= 4; ++i) {
    const double x = ax.map(i / 4.0, x0, x1);
    char label[16];
    std::snprintf(label, sizeof label, "%.2f", i / 4.0);
    o << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 20) << "\" text-anchor=\"middle\">" << label << "</text>\n";
    const double yv = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    std::snprintf(label, sizeof label, "%.3g", yv);
    o << "<text x=\"" << num(x0 - 10) << "\" y=\"" << num(ay.map(yv, y0, y1) + 4) << "\" text-anchor=\"end\">" << label
      << "</text>\n";
  }
  o << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">x</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    o << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      o << (j ? " " : "") << num(ax.map(s.x[j], x0, x1)) << ',' << num(ay.map(s.y[j], y0, y1));
    }
    o << "\"/>\n";
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

std::string raster_svg(const std::vector<Raster>& panels, const std::string& title) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : panels) {
    if (p.values.size() == 0) continue;
    lo = std::min(lo, p.values.minCoeff());
    hi = std::max(hi, p.values.maxCoeff());
  }
  if (!(hi > lo)) hi = lo + 1;
  const double size = 240, gap = 20;
  const double width = gap + double(panels.size()) * (size + gap);
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(size + 90)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& v = panels[p].values;
    const double ox = gap + double(p) * (size + gap), oy = 40;
    const double cw = size / double(v.rows()), ch = size / double(v.cols());
    o << "<g shape-rendering=\"crispEdges\">\n";
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const int g = int(std::lround(255 * (v(i, j) - lo) / (hi - lo)));
        // x1 to the right, x2 upwards.
        o << "<rect x=\"" << num(ox + double(i) * cw) << "\" y=\"" << num(oy + size - double(j + 1) * ch)
          << "\" width=\"" << num(cw + 0.05) << "\" height=\"" << num(ch + 0.05) << "\" fill=\"rgb(" << g << ','
          << g << ',' << g << ")\"/>\n";
      }
    }
    o << "</g>\n<text class=\"legend\" x=\"" << num(ox + size / 2) << "\" y=\"" << num(oy + size + 20)
      << "\" text-anchor=\"middle\">" << escape(panels[p].label) << "</text>\n";
  }
  char scale[96];
  std::snprintf(scale, sizeof scale, "black = %.4g, white = %.4g", lo, hi);
  o << "<text x=\"" << num(width / 2) << "\" y=\"" << num(size + 80) << "\" text-anchor=\"middle\">" << scale
    << "</text>\n</svg>\n";
  return o.str();
}

}  // namespace hrwave::cli
