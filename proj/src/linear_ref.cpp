#include "wsekit/linear_ref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {

Polyline::Polyline(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 2) throw Error(ErrorKind::structural, "polyline needs at least 2 vertices");
  cumulative_.reserve(vertices_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const auto& a = vertices_[i - 1];
    const auto& b = vertices_[i];
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw Error(ErrorKind::structural, "polyline vertex is not finite");
    }
    const double d = std::hypot(b.x - a.x, b.y - a.y);
    if (d == 0.0) {
      throw Error(ErrorKind::structural, "polyline vertices " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                             " coincide");
    }
    cumulative_.push_back(cumulative_.back() + d);
  }
}

ChainagePoint Polyline::point_at(double chainage) const {
  const double c = std::clamp(chainage, 0.0, length());
  // first vertex with cumulative > c, so segment index = that - 1
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), c);
  std::size_t seg = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  seg = std::min(seg, vertices_.size() - 2);
  const auto& a = vertices_[seg];
  const auto& b = vertices_[seg + 1];
  const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
  const double t = (c - cumulative_[seg]) / seg_len;
  return {c, a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

std::vector<ChainagePoint> Polyline::densify(double step) const {
  if (!(step > 0)) throw Error(ErrorKind::structural, "densify step must be positive");
  const double total = length();
  const double tol = 1e-9 * std::max(step, 1.0);
  std::vector<ChainagePoint> out;
  out.reserve(static_cast<std::size_t>(total / step) + 2);
  for (std::size_t k = 0;; ++k) {
    const double c = static_cast<double>(k) * step;
    if (c >= total - tol) break;
    out.push_back(point_at(c));
  }
  const auto& last = vertices_.back();
  out.push_back({total, last.x, last.y});
  return out;
}

double Polyline::project_chainage(double x, double y) const {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_c = 0.0;
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[i + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double t = std::clamp(((x - a.x) * dx + (y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    const double px = a.x + t * dx - x;
    const double py = a.y + t * dy - y;
    const double d2 = px * px + py * py;
    // strict comparison keeps the earliest (smallest-chainage) minimiser
    if (d2 < best_d2) {
      best_d2 = d2;
      best_c = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
    }
  }
  return best_c;
}

std::pair<double, double> Polyline::clip_chainage_range(const Box& square) const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[i + 1];
    // Liang-Barsky parametric clip of segment a->b against the box
    double t0 = 0.0;
    double t1 = 1.0;
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - square.min_x, square.max_x - a.x, a.y - square.min_y, square.max_y - a.y};
    bool inside = true;
    for (int k = 0; k < 4 && inside; ++k) {
      if (p[k] == 0.0) {
        if (q[k] < 0.0) inside = false;
        continue;
      }
      const double r = q[k] / p[k];
      if (p[k] < 0.0) {
        t0 = std::max(t0, r);
      } else {
        t1 = std::min(t1, r);
      }
      if (t0 > t1) inside = false;
    }
    if (!inside) continue;
    const double seg_len = cumulative_[i + 1] - cumulative_[i];
    lo = std::min(lo, cumulative_[i] + t0 * seg_len);
    hi = std::max(hi, cumulative_[i] + t1 * seg_len);
  }
  if (!(lo <= hi)) throw Error(ErrorKind::empty_intersection, "polyline does not intersect the sample square");
  return {lo, hi};
}

Polyline load_polyline_csv(const std::filesystem::path& path) {
  const auto table = CsvTable::read(path);
  const auto cx = table.column("x");
  const auto cy = table.column("y");
  std::vector<Vertex> vertices;
  vertices.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) vertices.push_back({table.number(r, cx), table.number(r, cy)});
  return Polyline(std::move(vertices));
}

void write_polyline_csv(const std::filesystem::path& path, const Polyline& line) {
  std::string out = "x,y\n";
  for (const auto& v : line.vertices()) out += format_exact(v.x) + "," + format_exact(v.y) + "\n";
  write_text_file(path, out);
}

}  // namespace wsekit
