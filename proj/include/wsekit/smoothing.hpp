#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace wsekit {

struct SeriesPoint {
  double chainage;
  double value;
};

/// Ordered (chainage, value) samples along a line. Chainage is strictly
/// increasing and every value is finite. May be empty; operations that need
/// data reject empty input themselves.
class ChainageSeries {
 public:
  ChainageSeries() = default;
  explicit ChainageSeries(std::vector<SeriesPoint> points);
  ChainageSeries(std::span<const double> chainages, std::span<const double> values);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const SeriesPoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const SeriesPoint> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  std::vector<double> chainages() const;
  std::vector<double> values() const;
  /// Same chainages, new values.
  ChainageSeries with_values(std::span<const double> values) const;
  ChainageSeries reversed_values() const;

 private:
  std::vector<SeriesPoint> points_;
};

/// Adjusted form normalises the finite weight sum at every step:
///   y_t = sum_i w_i x_{t-i} / sum_i w_i,  w_i = (1 - alpha)^i.
/// Recursive form is y_0 = x_0, y_t = alpha x_t + (1 - alpha) y_{t-1}.
enum class EwmaMode { adjusted, recursive };
enum class Direction { forward, backward };

struct EwmaSpec {
  double alpha;
  EwmaMode mode = EwmaMode::adjusted;

  /// alpha = 2 / (span + 1).
  static EwmaSpec from_span(double span, EwmaMode mode = EwmaMode::adjusted);
};

// Index-based kernels. Gaps in chainage do not change the weights.
std::vector<double> ewma_values(std::span<const double> values, EwmaSpec spec, Direction direction);
std::vector<double> fbewma_values(std::span<const double> values, EwmaSpec spec);
/// Exponentially weighted (population) standard deviation per index, same
/// weights as ewma_values, averaged over both directions.
std::vector<double> fbewmsd_values(std::span<const double> values, EwmaSpec spec);

ChainageSeries ewma(const ChainageSeries& series, std::size_t span, Direction direction,
                    EwmaMode mode = EwmaMode::adjusted);
ChainageSeries fbewma(const ChainageSeries& series, std::size_t span, EwmaMode mode = EwmaMode::adjusted);
ChainageSeries fbewmsd(const ChainageSeries& series, std::size_t window, EwmaMode mode = EwmaMode::adjusted);

/// How successive rejection passes treat points dropped earlier.
///  - reevaluate: each pass tests every input point against the FBEWMA of the
///    previous pass's survivors (interpolated by chainage between them).
///  - cumulative: each pass only tests the survivors; drops are permanent.
enum class RejectionMode { reevaluate, cumulative };

struct FilterParams {
  std::size_t span = 50;
  double max_dev = 0.1;
  std::size_t iterations = 3;
  EwmaMode ewma_mode = EwmaMode::adjusted;
  RejectionMode rejection = RejectionMode::reevaluate;

  void validate() const;
};

struct OutlierSplit {
  ChainageSeries kept;
  ChainageSeries removed;
  /// kept_mask[i] is true when input point i survived.
  std::vector<bool> kept_mask;
  std::size_t passes = 0;
};

/// Iterative FBEWMA outlier rejection. Stops early once a pass changes
/// nothing. Throws degenerate_series if every point is removed.
OutlierSplit reject_outliers(const ChainageSeries& series, const FilterParams& params = {});

/// CSV with header `chainage_m,value_m`.
ChainageSeries load_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const ChainageSeries& series);

}  // namespace wsekit
