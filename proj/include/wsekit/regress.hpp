#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wsekit {

/// (chainage, elevation) observation.
struct Point2 {
  double x;
  double y;
};

/// y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;

  double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Maps x onto the segment's conditioning variable t = (x - center) / half_width.
struct AffineMap {
  double center = 0.0;
  double half_width = 1.0;

  double to_unit(double x) const noexcept { return (x - center) / half_width; }
};

/// One polynomial piece. Coefficients are in the scaled variable t, lowest
/// order first.
struct PolySegment {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;
  AffineMap x_affine;
  std::size_t n = 0;

  double evaluate(double x) const noexcept;
};

struct Prediction {
  double value;
  bool extrapolated;
};

/// Least-squares polynomial fitted separately on each breakpoint-delimited
/// segment. Segments are half-open [left, right) except the last, which is
/// closed, so a prediction exactly at a breakpoint comes from the segment to
/// its right.
class PiecewisePolyFit {
 public:
  PiecewisePolyFit(std::size_t degree, std::vector<double> breakpoints, std::vector<PolySegment> segments);

  std::size_t degree() const noexcept { return degree_; }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const PolySegment> segments() const noexcept { return segments_; }
  std::size_t n() const noexcept;

  std::size_t segment_index(double x) const noexcept;
  /// Outside the fitted range the nearest segment is used and the result is
  /// flagged as extrapolated.
  Prediction predict(double x) const;
  double operator()(double x) const { return predict(x).value; }

 private:
  std::size_t degree_;
  std::vector<double> breakpoints_;
  std::vector<PolySegment> segments_;
};

/// Ordinary least squares line. Throws underdetermined for n < 2 or when all
/// x coincide.
LinearFit ols_fit(std::span<const Point2> points);

/// Per-segment least-squares polynomial of the given degree. Each segment
/// must hold at least degree + 2 points.
PiecewisePolyFit poly_fit(std::span<const Point2> points, std::size_t degree, std::span<const double> breakpoints = {});

/// S_e = sqrt(sum (y - fit(x))^2 / (n - 2)). The n - 2 denominator is used for
/// every degree. Throws insufficient_data for n <= 2.
double std_error_estimate(std::span<const Point2> points, const LinearFit& fit);
double std_error_estimate(std::span<const Point2> points, const PiecewisePolyFit& fit);

inline double predict(const LinearFit& fit, double x) noexcept { return fit(x); }
inline Prediction predict(const PiecewisePolyFit& fit, double x) { return fit.predict(x); }

}  // namespace wsekit
