#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "wsekit/dataset.hpp"
#include "wsekit/pipeline.hpp"
#include "wsekit/smoothing.hpp"

namespace wsekit {

/// Every tunable of the command-line workflows. Defaults are the published
/// method constants; unknown keys in a config document are rejected.
struct RunConfig {
  FilterParams filter;                    // ewma_span, max_dev_m, iterations, ewma_mode, rejection_mode
  double sample_step_m = 0.1;             // water-edge sampling interval
  std::size_t edge_sd_window = 300;       // FBEWMSD window for water-edge points
  std::size_t prediction_sd_window = 10;  // FBEWMSD window for model predictions
  SdBasis sd_basis = SdBasis::values;
  std::size_t gt_degree = 3;  // not published; a guess
  std::vector<double> breakpoints;
  double truth_step_m = 0.1;
  double patch_side_m = 10.0;
  double range_threshold_m = 4.5;
  StandardizationParams standardization;  // sigma_dsm, ...
  std::size_t uce_bins = 10;
  bool dedupe_augmentation = false;

  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace wsekit
