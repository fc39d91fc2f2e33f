#include "wsekit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wsekit/error.hpp"
#include "wsekit/metrics.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {

GroundTruth ground_truth_build(std::span<const Point2> points, std::size_t degree, std::span<const double> breakpoints) {
  auto fit = poly_fit(points, degree, breakpoints);
  const double se = std_error_estimate(points, fit);
  return {std::move(fit), se};
}

double assign_truth(const PiecewisePolyFit& fit, const Polyline& centerline, const Box& square, double step) {
  if (!(step > 0)) throw Error(ErrorKind::config, "truth sampling step must be positive");
  const auto [lo, hi] = centerline.clip_chainage_range(square);
  double sum = 0.0;
  std::size_t count = 0;
  const double tol = 1e-9 * std::max(step, 1.0);
  for (std::size_t k = 0;; ++k) {
    const double c = lo + static_cast<double>(k) * step;
    if (c >= hi - tol) break;
    sum += fit(c);
    ++count;
  }
  sum += fit(hi);
  ++count;
  return sum / static_cast<double>(count);
}

UncertaintyBand make_band(const ChainageSeries& series, const LinearFit& fit, std::size_t window, SdBasis basis,
                          EwmaMode mode) {
  auto values = series.values();
  const auto chain = series.chainages();
  if (basis == SdBasis::residuals) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= fit(chain[i]);
  }
  const auto sd = fbewmsd_values(values, EwmaSpec::from_span(static_cast<double>(window), mode));
  UncertaintyBand band;
  band.points.reserve(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) band.points.push_back({chain[i], fit(chain[i]), sd[i]});
  return band;
}

WaterEdgeResult water_edge_workflow(const Grid& dsm, const Polyline& edge, const WaterEdgeOptions& options) {
  options.filter.validate();
  WaterEdgeResult result;
  const auto line_points = edge.densify(options.step);
  result.samples.reserve(line_points.size());
  for (const auto& p : line_points) {
    try {
      result.samples.push_back({p.chainage, p.x, p.y, sample_bilinear(dsm, p.x, p.y)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::nodata) throw;
      ++result.nodata_dropped;
    }
  }
  if (result.samples.empty()) throw Error(ErrorKind::degenerate_series, "no valid DSM samples along the edge line");

  std::vector<SeriesPoint> pts;
  pts.reserve(result.samples.size());
  for (const auto& s : result.samples) pts.push_back({s.chainage, s.value});
  result.split = reject_outliers(ChainageSeries(std::move(pts)), options.filter);

  std::vector<Point2> kept;
  kept.reserve(result.split.kept.size());
  for (const auto& p : result.split.kept) kept.push_back({p.chainage, p.value});
  result.fit = ols_fit(kept);
  result.band = make_band(result.split.kept, result.fit, options.sd_window, options.sd_basis, options.filter.ewma_mode);
  return result;
}

namespace {

void fill_uncertainty_metrics(SubsetReport& report, std::span<const EvalPair> pairs, std::size_t uce_bins) {
  report.mean_uncertainty_m = mean_uncertainty(pairs);
  report.uce_native = uce(pairs, uce_bins);
  report.uce_cm_scaled = report.uce_native * kUceCmScale;
}

}  // namespace

SubsetReport evaluate_water_edge(const WaterEdgeResult& result, const PiecewisePolyFit& truth,
                                 const Polyline* centerline, const std::string& subset_id, std::size_t uce_bins) {
  SubsetReport report;
  report.subset_id = subset_id;
  report.fit = result.fit;
  report.n = result.samples.size();
  report.nodata_dropped = result.nodata_dropped;

  const auto truth_at = [&](const EdgeSample& s) {
    return truth(centerline ? centerline->project_chainage(s.x, s.y) : s.chainage);
  };
  std::vector<EvalPair> raw;
  std::vector<EvalPair> regression;
  std::vector<EvalPair> banded;
  raw.reserve(result.samples.size());
  regression.reserve(result.samples.size());
  std::size_t band_index = 0;
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    const auto& s = result.samples[i];
    const double t = truth_at(s);
    raw.push_back({s.chainage, t, s.value, std::nullopt});
    regression.push_back({s.chainage, t, result.fit(s.chainage), std::nullopt});
    if (result.split.kept_mask[i]) {
      banded.push_back({s.chainage, t, result.fit(s.chainage), result.band.points.at(band_index++).half_width});
    }
  }
  report.rmse_points_m = rmse(raw);
  report.rmse_regression_m = rmse(regression);
  fill_uncertainty_metrics(report, banded, uce_bins);
  return report;
}

std::vector<SubsetEvaluation> evaluate_predictions(std::span<const PredictionRow> predictions,
                                                   const std::map<std::string, PiecewisePolyFit>& truth,
                                                   const EvaluateOptions& options) {
  std::map<std::string, std::vector<PredictionRow>> grouped;
  for (const auto& row : predictions) grouped[row.subset_id].push_back(row);

  std::vector<SubsetEvaluation> out;
  out.reserve(grouped.size());
  for (auto& [id, rows] : grouped) {
    const auto truth_it = truth.find(id);
    if (truth_it == truth.end()) throw Error(ErrorKind::config, "no ground-truth fit for subset '" + id + "'");
    const auto& truth_fit = truth_it->second;

    std::sort(rows.begin(), rows.end(), [](const PredictionRow& a, const PredictionRow& b) {
      return a.chainage < b.chainage || (a.chainage == b.chainage && a.sample_id < b.sample_id);
    });
    if (rows.size() < 2) throw Error(ErrorKind::insufficient_data, "subset '" + id + "' needs at least 2 predictions");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].chainage == rows[i - 1].chainage) {
        throw Error(ErrorKind::structural, "subset '" + id + "' has two predictions at chainage " +
                                               format_sig(rows[i].chainage));
      }
    }

    std::vector<Point2> pts;
    std::vector<SeriesPoint> series_pts;
    for (const auto& r : rows) {
      pts.push_back({r.chainage, r.wse_pred});
      series_pts.push_back({r.chainage, r.wse_pred});
    }
    SubsetEvaluation ev;
    ev.report.subset_id = id;
    ev.report.fit = ols_fit(pts);
    ev.report.n = rows.size();
    ev.band = make_band(ChainageSeries(std::move(series_pts)), ev.report.fit, options.sd_window, options.sd_basis,
                        options.ewma_mode);

    std::vector<EvalPair> raw;
    std::vector<EvalPair> regression;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double c = rows[i].chainage;
      const double t = truth_fit(c);
      ev.truth.push_back(t);
      raw.push_back({c, t, rows[i].wse_pred, std::nullopt});
      regression.push_back({c, t, ev.report.fit(c), ev.band.points[i].half_width});
    }
    ev.report.rmse_points_m = rmse(raw);
    ev.report.rmse_regression_m = rmse(regression);
    fill_uncertainty_metrics(ev.report, regression, options.uce_bins);
    ev.rows = std::move(rows);
    out.push_back(std::move(ev));
  }
  return out;
}

FoldPlan kfold_plan(std::span<const std::string> subset_ids) {
  std::set<std::string> seen;
  for (const auto& id : subset_ids) {
    if (!seen.insert(id).second) throw Error(ErrorKind::structural, "duplicate subset id '" + id + "'");
  }
  if (subset_ids.size() < 2) {
    throw Error(ErrorKind::insufficient_subsets, "leave-one-subset-out needs at least 2 subsets, got " +
                                                     std::to_string(subset_ids.size()));
  }
  FoldPlan plan;
  plan.folds.reserve(subset_ids.size());
  for (std::size_t i = 0; i < subset_ids.size(); ++i) {
    Fold fold{subset_ids[i], {}};
    for (std::size_t j = 0; j < subset_ids.size(); ++j) {
      if (j != i) fold.training_subsets.push_back(subset_ids[j]);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

}  // namespace wsekit
