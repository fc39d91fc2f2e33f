#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace wsekit {

/// One evaluated location: ground truth, prediction and optional predicted
/// uncertainty (a standard deviation, metres).
struct EvalPair {
  double chainage = 0.0;
  double truth = 0.0;
  double pred = 0.0;
  std::optional<double> uncertainty;
};

/// Root mean squared error of pred against truth.
double rmse(std::span<const EvalPair> pairs);

double mean_uncertainty(std::span<const EvalPair> pairs);

/// Uncertainty calibration error. Pairs are binned by predicted sigma into
/// n_bins equal-width bins over [min sigma, max sigma] (last bin closed);
///   UCE = sum_b |B_b|/N * | mean(err^2 in B_b) - mean(sigma^2 in B_b) |.
/// Result is in squared units of the inputs (m^2 for metre inputs).
double uce(std::span<const EvalPair> pairs, std::size_t n_bins = 10);

/// Factor converting a UCE in m^2 to cm^2.
inline constexpr double kUceCmScale = 1e4;

}  // namespace wsekit
