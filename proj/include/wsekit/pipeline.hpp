#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsekit/linear_ref.hpp"
#include "wsekit/raster.hpp"
#include "wsekit/regress.hpp"
#include "wsekit/smoothing.hpp"

namespace wsekit {

// ---------------------------------------------------------------------------
// Ground truth

struct GroundTruth {
  PiecewisePolyFit fit;
  double std_error;  // S_e with the n - 2 denominator
};

/// Polynomial regression of surveyed WSE against centreline chainage, split
/// at `breakpoints` (e.g. dams).
GroundTruth ground_truth_build(std::span<const Point2> points, std::size_t degree = 3,
                               std::span<const double> breakpoints = {});

/// Mean fitted WSE over the centreline stretch inside `square`, sampled at
/// clip_lo, clip_lo + step, ... plus clip_hi.
double assign_truth(const PiecewisePolyFit& fit, const Polyline& centerline, const Box& square, double step = 0.1);

// ---------------------------------------------------------------------------
// Uncertainty bands

struct BandPoint {
  double chainage;
  double center;
  double half_width;
};

struct UncertaintyBand {
  std::vector<BandPoint> points;
};

/// What the moving standard deviation is computed on.
enum class SdBasis { values, residuals };

/// Band centred on `fit` with half width = FBEWMSD of the series (or of its
/// residuals from the fit).
UncertaintyBand make_band(const ChainageSeries& series, const LinearFit& fit, std::size_t window,
                          SdBasis basis = SdBasis::values, EwmaMode mode = EwmaMode::adjusted);

// ---------------------------------------------------------------------------
// Water-edge method

struct EdgeSample {
  double chainage;
  double x;
  double y;
  double value;
};

struct WaterEdgeOptions {
  FilterParams filter;
  double step = 0.1;
  std::size_t sd_window = 300;
  SdBasis sd_basis = SdBasis::values;
};

struct WaterEdgeResult {
  std::vector<EdgeSample> samples;  // every successfully sampled point
  OutlierSplit split;               // split.kept_mask indexes `samples`
  LinearFit fit;
  UncertaintyBand band;  // one point per kept sample
  std::size_t nodata_dropped = 0;
};

/// Reads the DSM along the edge line every `step` metres, drops nodata
/// samples, rejects vegetation/bank outliers with FBEWMA, fits a line to the
/// survivors and derives the FBEWMSD band.
WaterEdgeResult water_edge_workflow(const Grid& dsm, const Polyline& edge, const WaterEdgeOptions& options = {});

// ---------------------------------------------------------------------------
// Evaluation

struct SubsetReport {
  std::string subset_id;
  double rmse_points_m = 0.0;
  double rmse_regression_m = 0.0;
  double mean_uncertainty_m = 0.0;
  double uce_native = 0.0;     // m^2
  double uce_cm_scaled = 0.0;  // cm^2
  LinearFit fit;
  std::size_t n = 0;
  std::optional<std::size_t> nodata_dropped;
};

/// Scores a water-edge run against a ground-truth fit. Truth chainage is the
/// projection of each sample onto `centerline` when given, otherwise the
/// edge-line chainage itself. Both RMSEs use every sample; mean uncertainty
/// and UCE use the kept samples and their band.
SubsetReport evaluate_water_edge(const WaterEdgeResult& result, const PiecewisePolyFit& truth,
                                 const Polyline* centerline, const std::string& subset_id,
                                 std::size_t uce_bins = 10);

struct PredictionRow {
  std::string subset_id;
  std::string sample_id;
  double chainage = 0.0;
  double wse_pred = 0.0;
  std::optional<double> uncertainty;
};

struct EvaluateOptions {
  std::size_t sd_window = 10;
  std::size_t uce_bins = 10;
  SdBasis sd_basis = SdBasis::values;
  EwmaMode ewma_mode = EwmaMode::adjusted;
};

struct SubsetEvaluation {
  SubsetReport report;
  std::vector<PredictionRow> rows;  // sorted by chainage
  std::vector<double> truth;        // truth at each row's chainage
  UncertaintyBand band;
};

/// Per-subset chainage regression of model predictions, scored against the
/// subset's ground-truth fit. Subsets are reported in id order. Throws
/// config error for a subset without a truth fit.
std::vector<SubsetEvaluation> evaluate_predictions(std::span<const PredictionRow> predictions,
                                                   const std::map<std::string, PiecewisePolyFit>& truth,
                                                   const EvaluateOptions& options = {});

// ---------------------------------------------------------------------------
// Cross-validation

struct Fold {
  std::string validation_subset;
  std::vector<std::string> training_subsets;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

/// Leave-one-subset-out plan, one fold per id in input order.
FoldPlan kfold_plan(std::span<const std::string> subset_ids);

}  // namespace wsekit
