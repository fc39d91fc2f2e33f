#include "wsekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wsekit/error.hpp"

namespace wsekit {
namespace {

void require_uncertainty(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::insufficient_data, "no evaluation pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].uncertainty) {
      throw Error(ErrorKind::incomplete_data, "pair " + std::to_string(i) + " carries no uncertainty");
    }
  }
}

}  // namespace

double rmse(std::span<const EvalPair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::insufficient_data, "rmse of an empty set");
  double ss = 0.0;
  for (const auto& p : pairs) ss += (p.truth - p.pred) * (p.truth - p.pred);
  return std::sqrt(ss / static_cast<double>(pairs.size()));
}

double mean_uncertainty(std::span<const EvalPair> pairs) {
  require_uncertainty(pairs);
  double sum = 0.0;
  for (const auto& p : pairs) sum += *p.uncertainty;
  return sum / static_cast<double>(pairs.size());
}

double uce(std::span<const EvalPair> pairs, std::size_t n_bins) {
  require_uncertainty(pairs);
  if (n_bins < 1) throw Error(ErrorKind::config, "uce needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(
      pairs.begin(), pairs.end(), [](const EvalPair& a, const EvalPair& b) { return *a.uncertainty < *b.uncertainty; });
  const double lo = *lo_it->uncertainty;
  const double width = (*hi_it->uncertainty - lo) / static_cast<double>(n_bins);

  std::vector<std::size_t> count(n_bins, 0);
  std::vector<double> err_sq(n_bins, 0.0);
  std::vector<double> var(n_bins, 0.0);
  for (const auto& p : pairs) {
    std::size_t b = 0;
    if (width > 0.0) b = std::min(static_cast<std::size_t>((*p.uncertainty - lo) / width), n_bins - 1);
    const double e = p.pred - p.truth;
    ++count[b];
    err_sq[b] += e * e;
    var[b] += *p.uncertainty * *p.uncertainty;
  }
  const double total = static_cast<double>(pairs.size());
  double out = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    const double nb = static_cast<double>(count[b]);
    out += nb / total * std::abs(err_sq[b] / nb - var[b] / nb);
  }
  return out;
}

}  // namespace wsekit
