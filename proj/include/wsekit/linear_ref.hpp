#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "wsekit/raster.hpp"

namespace wsekit {

struct Vertex {
  double x;
  double y;
};

/// A position along a polyline, measured as arc length from the first vertex.
struct ChainagePoint {
  double chainage;
  double x;
  double y;
};

/// Planar polyline (river centreline or water-edge line). Consecutive
/// vertices are distinct, so every segment has positive length.
class Polyline {
 public:
  explicit Polyline(std::vector<Vertex> vertices);

  std::span<const Vertex> vertices() const noexcept { return vertices_; }
  double length() const noexcept { return cumulative_.back(); }
  /// Chainage of vertex i.
  double vertex_chainage(std::size_t i) const { return cumulative_.at(i); }

  /// Point at chainage c, clamped to [0, length()].
  ChainagePoint point_at(double chainage) const;

  /// Points at 0, step, 2*step, ... plus the final vertex.
  std::vector<ChainagePoint> densify(double step = 0.1) const;

  /// Chainage of the closest point on the line; ties go to the smallest chainage.
  double project_chainage(double x, double y) const;

  /// Chainage interval spanned by the parts of the line inside `square`.
  /// Throws empty_intersection when the line never enters it.
  std::pair<double, double> clip_chainage_range(const Box& square) const;

 private:
  std::vector<Vertex> vertices_;
  std::vector<double> cumulative_;
};

/// CSV with header `x,y`.
Polyline load_polyline_csv(const std::filesystem::path& path);
void write_polyline_csv(const std::filesystem::path& path, const Polyline& line);

}  // namespace wsekit
