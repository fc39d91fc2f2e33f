#include "wsekit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsekit/numfmt.hpp"
#include "wsekit/version.hpp"

namespace wsekit {
namespace {

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

std::string coord(double v) { return format_sig(std::round(v * 100.0) / 100.0, 8); }

// 1, 2 or 5 times a power of ten, giving roughly `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-9) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string render_svg(const Chart& chart) {
  constexpr double left = 80, right = 160, top = 40, bottom = 60;
  const double pw = chart.width - left - right;
  const double ph = chart.height - top - bottom;

  Range xr;
  Range yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
    for (double v : s.y_upper) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) + "\" height=\"" +
         std::to_string(chart.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<!-- generated by wsekit " + std::string(kVersion) + " -->\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + coord(left) + "\" y=\"24\" font-size=\"15\">" + escape(chart.title) + "</text>\n";

  // axes and ticks
  out += "<rect x=\"" + coord(left) + "\" y=\"" + coord(top) + "\" width=\"" + coord(pw) + "\" height=\"" + coord(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = nice_step(xr.hi - xr.lo, 8);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    const double x = px(t);
    out += "<line x1=\"" + coord(x) + "\" y1=\"" + coord(top + ph) + "\" x2=\"" + coord(x) + "\" y2=\"" +
           coord(top + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + coord(x) + "\" y=\"" + coord(top + ph + 18) + "\" text-anchor=\"middle\">" +
           format_sig(t, 6) + "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo, 6);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    const double y = py(t);
    out += "<line x1=\"" + coord(left - 5) + "\" y1=\"" + coord(y) + "\" x2=\"" + coord(left) + "\" y2=\"" + coord(y) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + coord(left - 8) + "\" y=\"" + coord(y + 4) + "\" text-anchor=\"end\">" + format_sig(t, 6) +
           "</text>\n";
  }
  out += "<text x=\"" + coord(left + pw / 2) + "\" y=\"" + coord(chart.height - 15.0) + "\" text-anchor=\"middle\">" +
         escape(chart.x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + coord(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(chart.y_label) + "</text>\n";

  double legend_y = top + 10;
  for (const auto& s : chart.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::string color = escape(s.color);
    switch (s.style) {
      case ChartSeries::Style::band: {
        if (n == 0 || s.y_upper.size() < n) break;
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) pts += coord(px(s.x[i])) + "," + coord(py(s.y_upper[i])) + " ";
        for (std::size_t i = n; i-- > 0;) pts += coord(px(s.x[i])) + "," + coord(py(s.y[i])) + " ";
        out += "<polygon points=\"" + pts + "\" fill=\"" + color + "\" fill-opacity=\"0.25\" stroke=\"none\"/>\n";
        break;
      }
      case ChartSeries::Style::line:
      case ChartSeries::Style::dashed: {
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) pts += coord(px(s.x[i])) + "," + coord(py(s.y[i])) + " ";
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
               (s.style == ChartSeries::Style::dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        break;
      }
      case ChartSeries::Style::markers:
        out += "<g fill=\"" + color + "\">\n";
        for (std::size_t i = 0; i < n; ++i) {
          out += "<circle cx=\"" + coord(px(s.x[i])) + "\" cy=\"" + coord(py(s.y[i])) + "\" r=\"1.5\"/>\n";
        }
        out += "</g>\n";
        break;
      case ChartSeries::Style::crosses:
        out += "<g stroke=\"" + color + "\">\n";
        for (std::size_t i = 0; i < n; ++i) {
          const double x = px(s.x[i]);
          const double y = py(s.y[i]);
          out += "<path d=\"M" + coord(x - 3) + "," + coord(y - 3) + "L" + coord(x + 3) + "," + coord(y + 3) + "M" +
                 coord(x - 3) + "," + coord(y + 3) + "L" + coord(x + 3) + "," + coord(y - 3) + "\"/>\n";
        }
        out += "</g>\n";
        break;
    }
    out += "<rect x=\"" + coord(left + pw + 12) + "\" y=\"" + coord(legend_y - 8) +
           "\" width=\"12\" height=\"8\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + coord(left + pw + 30) + "\" y=\"" + coord(legend_y) + "\">" + escape(s.label) + "</text>\n";
    legend_y += 18;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace wsekit
