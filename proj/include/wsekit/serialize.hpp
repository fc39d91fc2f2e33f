#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wsekit/pipeline.hpp"
#include "wsekit/regress.hpp"

namespace wsekit {

using Json = nlohmann::json;

/// Fit documents: {type, degree, breakpoints, segments:[{range, coeffs,
/// x_affine}], n, s_e}. Numbers carry 9 significant digits.
Json fit_to_json(const PiecewisePolyFit& fit, std::optional<double> s_e = std::nullopt);
/// A line is written as a single degree-1 segment over `range` with
/// coeffs [intercept, slope] and the identity affine map.
Json fit_to_json(const LinearFit& fit, std::pair<double, double> range, std::optional<double> s_e = std::nullopt);
/// Accepts both document types; a line becomes a degree-1 piecewise fit.
PiecewisePolyFit fit_from_json(const Json& doc);
PiecewisePolyFit load_fit_json(const std::filesystem::path& path);

Json report_to_json(const SubsetReport& report);
Json reports_to_json(std::span<const SubsetReport> reports);
Json fold_plan_to_json(const FoldPlan& plan);

/// Two-space indented JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

/// `chainage_m,center_m,half_width_m`.
void write_band_csv(const std::filesystem::path& path, const UncertaintyBand& band);

/// `subset_id,sample_id,chainage_m,wse_pred_m[,uncertainty_m]`.
std::vector<PredictionRow> load_predictions_csv(const std::filesystem::path& path);
void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows);

}  // namespace wsekit
