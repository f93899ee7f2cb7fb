#pragma once

// Standalone SVG line plots with deterministic byte output.

#include <optional>
#include <string>
#include <vector>

namespace fbmlab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  /// Adds "slope = ..." from a least-squares fit of the first series (log-log).
  bool annotate_slope = false;
  std::vector<PlotSeries> series;
};

/// Least-squares slope of log10 y against log10 x over points with x, y > 0.
/// Needs at least two such points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Renders the plot; nullopt when there is nothing to draw (no series or no
/// finite, axis-compatible points).
std::optional<std::string> render_svg(const PlotSpec& spec);

}  // namespace fbmlab
