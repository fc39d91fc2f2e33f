#include "wsekit/regress.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {

double PolySegment::evaluate(double x) const noexcept {
  const double t = x_affine.to_unit(x);
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

PiecewisePolyFit::PiecewisePolyFit(std::size_t degree, std::vector<double> breakpoints,
                                   std::vector<PolySegment> segments)
    : degree_(degree), breakpoints_(std::move(breakpoints)), segments_(std::move(segments)) {
  if (segments_.size() != breakpoints_.size() + 1) {
    throw Error(ErrorKind::structural, "piecewise fit needs one more segment than breakpoints");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) throw Error(ErrorKind::structural, "breakpoints must increase");
  }
  for (const auto& s : segments_) {
    if (s.coeffs.size() != degree_ + 1) throw Error(ErrorKind::structural, "segment coefficient count != degree + 1");
    if (!(s.x_affine.half_width > 0)) throw Error(ErrorKind::structural, "segment scale must be positive");
  }
}

std::size_t PiecewisePolyFit::n() const noexcept {
  std::size_t total = 0;
  for (const auto& s : segments_) total += s.n;
  return total;
}

std::size_t PiecewisePolyFit::segment_index(double x) const noexcept {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
}

Prediction PiecewisePolyFit::predict(double x) const {
  const auto& seg = segments_[segment_index(x)];
  const bool outside = x < segments_.front().lo || x > segments_.back().hi;
  return {seg.evaluate(x), outside};
}

LinearFit ols_fit(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(ErrorKind::underdetermined, "linear fit needs at least 2 points");
  double mx = 0.0;
  double my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::underdetermined, "linear fit needs at least two distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, n};
}

PiecewisePolyFit poly_fit(std::span<const Point2> points, std::size_t degree, std::span<const double> breakpoints) {
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) throw Error(ErrorKind::config, "breakpoints must be strictly increasing");
  }
  if (points.empty()) throw Error(ErrorKind::underdetermined, "polynomial fit of an empty point set");
  const auto [min_it, max_it] =
      std::minmax_element(points.begin(), points.end(), [](const Point2& a, const Point2& b) { return a.x < b.x; });
  const double xmin = min_it->x;
  const double xmax = max_it->x;

  const std::size_t nseg = breakpoints.size() + 1;
  std::vector<std::vector<Point2>> buckets(nseg);
  for (const auto& p : points) {
    const auto k = static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), p.x) - breakpoints.begin());
    buckets[k].push_back(p);
  }

  std::vector<PolySegment> segments;
  segments.reserve(nseg);
  const std::size_t ncoef = degree + 1;
  for (std::size_t k = 0; k < nseg; ++k) {
    const auto& pts = buckets[k];
    const double lo = k == 0 ? xmin : breakpoints[k - 1];
    const double hi = k + 1 == nseg ? xmax : breakpoints[k];
    const std::string label = "segment " + std::to_string(k) + " [" + format_sig(lo) + ", " + format_sig(hi) + "]";
    if (pts.size() < degree + 2) {
      throw Error(ErrorKind::underdetermined, label + " has " + std::to_string(pts.size()) + " points, needs " +
                                                  std::to_string(degree + 2));
    }
    const AffineMap map{(lo + hi) / 2.0, (hi - lo) / 2.0};
    if (!(map.half_width > 0.0)) throw Error(ErrorKind::underdetermined, label + " has zero width");

    Eigen::MatrixXd vander(pts.size(), ncoef);
    Eigen::VectorXd rhs(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double t = map.to_unit(pts[i].x);
      double term = 1.0;
      for (std::size_t j = 0; j < ncoef; ++j) {
        vander(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = term;
        term *= t;
      }
      rhs(static_cast<Eigen::Index>(i)) = pts[i].y;
    }
    const auto qr = vander.colPivHouseholderQr();
    if (qr.rank() < static_cast<Eigen::Index>(ncoef)) {
      throw Error(ErrorKind::underdetermined, label + " has too few distinct x values for degree " + std::to_string(degree));
    }
    const Eigen::VectorXd c = qr.solve(rhs);
    segments.push_back({lo, hi, std::vector<double>(c.data(), c.data() + c.size()), map, pts.size()});
  }
  return PiecewisePolyFit(degree, std::vector<double>(breakpoints.begin(), breakpoints.end()), std::move(segments));
}

namespace {

template <typename Model>
double std_error_impl(std::span<const Point2> points, const Model& model) {
  const std::size_t n = points.size();
  if (n <= 2) throw Error(ErrorKind::insufficient_data, "standard error of estimate needs more than 2 points");
  double ss = 0.0;
  for (const auto& p : points) {
    const double r = p.y - model(p.x);
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(n - 2));
}

}  // namespace

double std_error_estimate(std::span<const Point2> points, const LinearFit& fit) { return std_error_impl(points, fit); }

double std_error_estimate(std::span<const Point2> points, const PiecewisePolyFit& fit) {
  return std_error_impl(points, fit);
}

}  // namespace wsekit
