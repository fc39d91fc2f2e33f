#include "wsekit/serialize.hpp"

#include <algorithm>

#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {
namespace {

Json num(double v) { return Json(round_sig(v)); }

Json nums(std::span<const double> vs) {
  Json arr = Json::array();
  for (double v : vs) arr.push_back(num(v));
  return arr;
}

}  // namespace

Json fit_to_json(const PiecewisePolyFit& fit, std::optional<double> s_e) {
  Json segments = Json::array();
  for (const auto& s : fit.segments()) {
    segments.push_back({{"range", {num(s.lo), num(s.hi)}},
                        {"coeffs", nums(s.coeffs)},
                        {"x_affine", {num(s.x_affine.center), num(s.x_affine.half_width)}},
                        {"n", s.n}});
  }
  return {{"type", "piecewise_poly"},
          {"degree", fit.degree()},
          {"breakpoints", nums(fit.breakpoints())},
          {"segments", std::move(segments)},
          {"n", fit.n()},
          {"s_e", s_e ? num(*s_e) : Json(nullptr)}};
}

Json fit_to_json(const LinearFit& fit, std::pair<double, double> range, std::optional<double> s_e) {
  Json segment = {{"range", {num(range.first), num(range.second)}},
                  {"coeffs", {num(fit.intercept), num(fit.slope)}},
                  {"x_affine", {0, 1}},
                  {"n", fit.n}};
  return {{"type", "linear"},
          {"degree", 1},
          {"breakpoints", Json::array()},
          {"segments", Json::array({std::move(segment)})},
          {"n", fit.n},
          {"s_e", s_e ? num(*s_e) : Json(nullptr)}};
}

PiecewisePolyFit fit_from_json(const Json& doc) {
  try {
    const auto type = doc.at("type").get<std::string>();
    if (type != "piecewise_poly" && type != "linear") throw Error(ErrorKind::format, "unknown fit type '" + type + "'");
    const auto degree = doc.at("degree").get<std::size_t>();
    auto breakpoints = doc.at("breakpoints").get<std::vector<double>>();
    std::vector<PolySegment> segments;
    for (const auto& s : doc.at("segments")) {
      PolySegment seg;
      seg.lo = s.at("range").at(0).get<double>();
      seg.hi = s.at("range").at(1).get<double>();
      seg.coeffs = s.at("coeffs").get<std::vector<double>>();
      seg.x_affine = {s.at("x_affine").at(0).get<double>(), s.at("x_affine").at(1).get<double>()};
      seg.n = s.value("n", std::size_t{0});
      segments.push_back(std::move(seg));
    }
    return PiecewisePolyFit(degree, std::move(breakpoints), std::move(segments));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, std::string("malformed fit document: ") + e.what());
  }
}

PiecewisePolyFit load_fit_json(const std::filesystem::path& path) {
  try {
    return fit_from_json(Json::parse(read_text_file(path)));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
}

Json report_to_json(const SubsetReport& r) {
  Json doc = {{"subset_id", r.subset_id},
              {"rmse_points_m", num(r.rmse_points_m)},
              {"rmse_regression_m", num(r.rmse_regression_m)},
              {"mean_uncertainty_m", num(r.mean_uncertainty_m)},
              {"uce_native", num(r.uce_native)},
              {"uce_cm_scaled", num(r.uce_cm_scaled)},
              {"n", r.n},
              {"fit", {{"slope", num(r.fit.slope)}, {"intercept", num(r.fit.intercept)}, {"n", r.fit.n}}}};
  if (r.nodata_dropped) doc["nodata_dropped"] = *r.nodata_dropped;
  return doc;
}

Json reports_to_json(std::span<const SubsetReport> reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

Json fold_plan_to_json(const FoldPlan& plan) {
  Json folds = Json::array();
  for (const auto& f : plan.folds) {
    folds.push_back({{"validation_subset", f.validation_subset}, {"training_subsets", f.training_subsets}});
  }
  return {{"folds", std::move(folds)}};
}

void write_json(const std::filesystem::path& path, const Json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void write_band_csv(const std::filesystem::path& path, const UncertaintyBand& band) {
  std::string out = "chainage_m,center_m,half_width_m\n";
  for (const auto& p : band.points) {
    out += format_sig(p.chainage) + "," + format_sig(p.center) + "," + format_sig(p.half_width) + "\n";
  }
  write_text_file(path, out);
}

std::vector<PredictionRow> load_predictions_csv(const std::filesystem::path& path) {
  const auto table = CsvTable::read(path);
  const auto c_subset = table.column("subset_id");
  const auto c_sample = table.column("sample_id");
  const auto c_chain = table.column("chainage_m");
  const auto c_pred = table.column("wse_pred_m");
  const auto c_unc = table.find_column("uncertainty_m");
  std::vector<PredictionRow> rows;
  rows.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    PredictionRow row{table.text(r, c_subset), table.text(r, c_sample), table.number(r, c_chain),
                      table.number(r, c_pred), std::nullopt};
    if (c_unc && !table.text(r, *c_unc).empty()) row.uncertainty = table.number(r, *c_unc);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows) {
  const bool with_unc = std::any_of(rows.begin(), rows.end(), [](const PredictionRow& r) { return r.uncertainty.has_value(); });
  std::string out = with_unc ? "subset_id,sample_id,chainage_m,wse_pred_m,uncertainty_m\n"
                             : "subset_id,sample_id,chainage_m,wse_pred_m\n";
  for (const auto& r : rows) {
    out += r.subset_id + "," + r.sample_id + "," + format_sig(r.chainage) + "," + format_sig(r.wse_pred);
    if (with_unc) out += "," + (r.uncertainty ? format_sig(*r.uncertainty) : std::string());
    out += "\n";
  }
  write_text_file(path, out);
}

}  // namespace wsekit
