#pragma once

#include <string>
#include <vector>

namespace wsekit {

/// Minimal hand-written SVG line chart for series-vs-chainage figures.
struct ChartSeries {
  enum class Style { line, dashed, markers, crosses, band };

  std::string label;
  std::string color = "#1f77b4";
  Style style = Style::line;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_upper;  // band style only: y is the lower edge
};

struct Chart {
  std::string title;
  std::string x_label = "chainage (m)";
  std::string y_label = "elevation (m MSL)";
  std::vector<ChartSeries> series;
  int width = 900;
  int height = 500;
};

std::string render_svg(const Chart& chart);

}  // namespace wsekit
