#include "wsekit/smoothing.hpp"

#include <algorithm>
#include <cmath>

#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {

ChainageSeries::ChainageSeries(std::vector<SeriesPoint> points) : points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.chainage) || !std::isfinite(p.value)) {
      throw Error(ErrorKind::structural, "series point " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(p.chainage > points_[i - 1].chainage)) {
      throw Error(ErrorKind::structural, "series chainage must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

ChainageSeries::ChainageSeries(std::span<const double> chainages, std::span<const double> values)
    : ChainageSeries([&] {
        if (chainages.size() != values.size()) throw Error(ErrorKind::structural, "chainage/value length mismatch");
        std::vector<SeriesPoint> pts(chainages.size());
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {chainages[i], values[i]};
        return pts;
      }()) {}

std::vector<double> ChainageSeries::chainages() const {
  std::vector<double> out(points_.size());
  std::transform(points_.begin(), points_.end(), out.begin(), [](const SeriesPoint& p) { return p.chainage; });
  return out;
}

std::vector<double> ChainageSeries::values() const {
  std::vector<double> out(points_.size());
  std::transform(points_.begin(), points_.end(), out.begin(), [](const SeriesPoint& p) { return p.value; });
  return out;
}

ChainageSeries ChainageSeries::with_values(std::span<const double> values) const {
  if (values.size() != points_.size()) throw Error(ErrorKind::structural, "value count mismatch");
  std::vector<SeriesPoint> pts(points_);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].value = values[i];
  return ChainageSeries(std::move(pts));
}

ChainageSeries ChainageSeries::reversed_values() const {
  auto v = values();
  std::reverse(v.begin(), v.end());
  return with_values(v);
}

EwmaSpec EwmaSpec::from_span(double span, EwmaMode mode) {
  if (!(span >= 1.0)) throw Error(ErrorKind::config, "EWMA span must be >= 1");
  return {2.0 / (span + 1.0), mode};
}

namespace {

void check_spec(const EwmaSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw Error(ErrorKind::config, "EWMA alpha must be in (0, 1]");
}

// One directional pass of the weighted mean and (optionally) weighted
// population variance. Every pass starts with weight 1 on the first sample;
// afterwards old weights decay by (1 - alpha) and the new sample gets weight
// 1 (adjusted) or alpha (recursive). Variance uses West's incremental update.
void directional_pass(std::span<const double> values, const EwmaSpec& spec, Direction direction,
                      std::vector<double>* mean_out, std::vector<double>* sd_out) {
  const std::size_t n = values.size();
  const double decay = 1.0 - spec.alpha;
  const double fresh = spec.mode == EwmaMode::adjusted ? 1.0 : spec.alpha;
  double weight = 0.0;
  double mean = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = direction == Direction::forward ? k : n - 1 - k;
    const double x = values[i];
    if (k == 0) {
      weight = 1.0;
      mean = x;
      sq = 0.0;
    } else {
      const double new_weight = decay * weight + fresh;
      const double new_mean = mean + fresh * (x - mean) / new_weight;
      sq = decay * sq + fresh * (x - mean) * (x - new_mean);
      weight = new_weight;
      mean = new_mean;
    }
    if (mean_out) (*mean_out)[i] = mean;
    if (sd_out) (*sd_out)[i] = std::sqrt(std::max(sq / weight, 0.0));
  }
}

}  // namespace

std::vector<double> ewma_values(std::span<const double> values, EwmaSpec spec, Direction direction) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "ewma of an empty series");
  check_spec(spec);
  std::vector<double> out(values.size());
  directional_pass(values, spec, direction, &out, nullptr);
  return out;
}

std::vector<double> fbewma_values(std::span<const double> values, EwmaSpec spec) {
  auto fwd = ewma_values(values, spec, Direction::forward);
  const auto bwd = ewma_values(values, spec, Direction::backward);
  for (std::size_t i = 0; i < fwd.size(); ++i) fwd[i] = (fwd[i] + bwd[i]) / 2.0;
  return fwd;
}

std::vector<double> fbewmsd_values(std::span<const double> values, EwmaSpec spec) {
  if (values.size() < 2) throw Error(ErrorKind::insufficient_data, "fbewmsd needs at least 2 samples");
  check_spec(spec);
  std::vector<double> fwd(values.size());
  std::vector<double> bwd(values.size());
  directional_pass(values, spec, Direction::forward, nullptr, &fwd);
  directional_pass(values, spec, Direction::backward, nullptr, &bwd);
  for (std::size_t i = 0; i < fwd.size(); ++i) fwd[i] = (fwd[i] + bwd[i]) / 2.0;
  return fwd;
}

ChainageSeries ewma(const ChainageSeries& series, std::size_t span, Direction direction, EwmaMode mode) {
  const auto v = series.values();
  return series.with_values(ewma_values(v, EwmaSpec::from_span(static_cast<double>(span), mode), direction));
}

ChainageSeries fbewma(const ChainageSeries& series, std::size_t span, EwmaMode mode) {
  const auto v = series.values();
  return series.with_values(fbewma_values(v, EwmaSpec::from_span(static_cast<double>(span), mode)));
}

ChainageSeries fbewmsd(const ChainageSeries& series, std::size_t window, EwmaMode mode) {
  const auto v = series.values();
  return series.with_values(fbewmsd_values(v, EwmaSpec::from_span(static_cast<double>(window), mode)));
}

void FilterParams::validate() const {
  if (span < 1) throw Error(ErrorKind::config, "filter span must be >= 1");
  if (!(max_dev > 0.0)) throw Error(ErrorKind::config, "filter max_dev must be > 0");
  if (iterations < 1) throw Error(ErrorKind::config, "filter iterations must be >= 1");
}

namespace {

// Piecewise-linear interpolation of (xs, ys) at x, constant beyond the ends.
// `hint` walks forward monotonically across calls with increasing x.
double interp_sorted(std::span<const double> xs, std::span<const double> ys, double x, std::size_t& hint) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  while (hint + 1 < xs.size() && xs[hint + 1] < x) ++hint;
  const double t = (x - xs[hint]) / (xs[hint + 1] - xs[hint]);
  return ys[hint] + t * (ys[hint + 1] - ys[hint]);
}

}  // namespace

OutlierSplit reject_outliers(const ChainageSeries& series, const FilterParams& params) {
  params.validate();
  if (series.empty()) throw Error(ErrorKind::empty_input, "outlier rejection of an empty series");
  const auto spec = EwmaSpec::from_span(static_cast<double>(params.span), params.ewma_mode);
  const auto chain = series.chainages();
  const auto vals = series.values();
  const std::size_t n = vals.size();

  std::vector<bool> mask(n, true);
  std::size_t passes = 0;
  for (std::size_t pass = 0; pass < params.iterations; ++pass) {
    std::vector<double> kc;
    std::vector<double> kv;
    std::vector<std::size_t> kidx;
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      kc.push_back(chain[i]);
      kv.push_back(vals[i]);
      kidx.push_back(i);
    }
    const auto smooth = fbewma_values(kv, spec);
    std::vector<bool> next = mask;
    if (params.rejection == RejectionMode::cumulative) {
      for (std::size_t j = 0; j < kidx.size(); ++j) {
        if (std::abs(kv[j] - smooth[j]) > params.max_dev) next[kidx[j]] = false;
      }
    } else {
      std::size_t hint = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double level = interp_sorted(kc, smooth, chain[i], hint);
        next[i] = std::abs(vals[i] - level) <= params.max_dev;
      }
    }
    ++passes;
    const bool unchanged = next == mask;
    mask = std::move(next);
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
      throw Error(ErrorKind::degenerate_series, "every sample was rejected as an outlier");
    }
    if (unchanged) break;
  }

  std::vector<SeriesPoint> kept;
  std::vector<SeriesPoint> removed;
  for (std::size_t i = 0; i < n; ++i) (mask[i] ? kept : removed).push_back(series[i]);
  return {ChainageSeries(std::move(kept)), ChainageSeries(std::move(removed)), std::move(mask), passes};
}

ChainageSeries load_series_csv(const std::filesystem::path& path) {
  const auto table = CsvTable::read(path);
  const auto cc = table.column("chainage_m");
  const auto cv = table.column("value_m");
  std::vector<SeriesPoint> pts;
  pts.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) pts.push_back({table.number(r, cc), table.number(r, cv)});
  return ChainageSeries(std::move(pts));
}

void write_series_csv(const std::filesystem::path& path, const ChainageSeries& series) {
  std::string out = "chainage_m,value_m\n";
  for (const auto& p : series) out += format_sig(p.chainage) + "," + format_sig(p.value) + "\n";
  write_text_file(path, out);
}

}  // namespace wsekit
