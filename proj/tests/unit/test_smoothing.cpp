#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/expect_error.hpp"
#include "support/test_support.hpp"
#include "wsekit/smoothing.hpp"

namespace wsekit {
namespace {

using testing::kind_of;

ChainageSeries uniform_series(const std::vector<double>& values, double step = 0.1) {
  std::vector<SeriesPoint> pts;
  for (std::size_t i = 0; i < values.size(); ++i) pts.push_back({static_cast<double>(i) * step, values[i]});
  return ChainageSeries(std::move(pts));
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = 95.0, double hi = 105.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

TEST(ChainageSeries, RequiresIncreasingChainage) {
  EXPECT_EQ(kind_of([] { ChainageSeries({{0, 1}, {0, 2}}); }), ErrorKind::structural);
  EXPECT_EQ(kind_of([] { ChainageSeries({{0, 1}, {1, NAN}}); }), ErrorKind::structural);
}

TEST(Ewma, ConstantSeries) {
  const auto s = uniform_series(std::vector<double>(40, 101.25));
  for (auto dir : {Direction::forward, Direction::backward}) {
    for (const auto& p : ewma(s, 50, dir)) EXPECT_DOUBLE_EQ(p.value, 101.25);
  }
}

TEST(Ewma, SpanOneIsIdentity) {
  const auto out = ewma(uniform_series({0, 1}), 1, Direction::forward);
  EXPECT_DOUBLE_EQ(out[0].value, 0.0);
  EXPECT_DOUBLE_EQ(out[1].value, 1.0);
}

TEST(Ewma, HandEvaluatedRecurrence) {
  const auto out = ewma(uniform_series({1, 2, 3}), 3, Direction::forward);
  EXPECT_NEAR(out[0].value, 1.0, 1e-12);
  EXPECT_NEAR(out[1].value, (0.5 * 2 + 0.25 * 1) / 0.75, 1e-12);
  EXPECT_NEAR(out[2].value, (0.5 * 3 + 0.25 * 2 + 0.125 * 1) / 0.875, 1e-12);
  EXPECT_NEAR(out[1].value, 1.6667, 1e-4);
  EXPECT_NEAR(out[2].value, 2.4286, 1e-4);
}

TEST(Ewma, MatchesDirectWeightedSum) {
  std::mt19937_64 rng(8);
  const auto v = random_values(rng, 150);
  for (std::size_t span : {1u, 3u, 10u, 50u, 300u}) {
    const double alpha = 2.0 / (static_cast<double>(span) + 1.0);
    const auto expected_f = testing::direct_ewma(v, alpha);
    const auto expected_b = testing::reversed_apply(v, [&](const auto& r) { return testing::direct_ewma(r, alpha); });
    const auto fwd = ewma_values(v, EwmaSpec::from_span(static_cast<double>(span)), Direction::forward);
    const auto bwd = ewma_values(v, EwmaSpec::from_span(static_cast<double>(span)), Direction::backward);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(fwd[i], expected_f[i], 1e-10);
      EXPECT_NEAR(bwd[i], expected_b[i], 1e-10);
    }
  }
}

TEST(Ewma, RecursiveForm) {
  const std::vector<double> v{4, 8, 2, 6};
  const auto out = ewma_values(v, EwmaSpec{0.25, EwmaMode::recursive}, Direction::forward);
  double y = v[0];
  EXPECT_DOUBLE_EQ(out[0], y);
  for (std::size_t i = 1; i < v.size(); ++i) {
    y = 0.25 * v[i] + 0.75 * y;
    EXPECT_NEAR(out[i], y, 1e-14);
  }
}

TEST(Ewma, EmptyInput) {
  EXPECT_EQ(kind_of([] { ewma(ChainageSeries{}, 5, Direction::forward); }), ErrorKind::empty_input);
}

TEST(Ewma, ConvexCombinationBounds) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_values(rng, 80);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    for (double y : fbewma_values(v, EwmaSpec::from_span(1 + trial % 60))) {
      EXPECT_GE(y, *lo - 1e-12);
      EXPECT_LE(y, *hi + 1e-12);
    }
  }
}

TEST(Fbewma, ConstantAndPalindrome) {
  for (const auto& p : fbewma(uniform_series(std::vector<double>(10, 7.0)), 4)) EXPECT_DOUBLE_EQ(p.value, 7.0);
  const auto out = fbewma(uniform_series({1, 5, 2, 9, 2, 5, 1}), 3).values();
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], out[out.size() - 1 - i], 1e-12);
}

TEST(Fbewma, IsMeanOfDirections) {
  std::mt19937_64 rng(4);
  const auto s = uniform_series(random_values(rng, 120));
  const auto f = ewma(s, 50, Direction::forward);
  const auto b = ewma(s, 50, Direction::backward);
  const auto fb = fbewma(s, 50);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(fb[i].value, (f[i].value + b[i].value) / 2, 1e-12);
}

TEST(Fbewma, ReversalSymmetry) {
  std::mt19937_64 rng(41);
  const auto v = random_values(rng, 90);
  const auto spec = EwmaSpec::from_span(20);
  const auto direct = fbewma_values(v, spec);
  const auto via_reverse = testing::reversed_apply(v, [&](const auto& r) { return fbewma_values(r, spec); });
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(direct[i], via_reverse[i], 1e-12);
}

TEST(Fbewma, ConstantShiftEquivariance) {
  std::mt19937_64 rng(42);
  auto v = random_values(rng, 100, -1, 1);
  const auto spec = EwmaSpec::from_span(10);
  const auto base = fbewma_values(v, spec);
  const auto base_sd = fbewmsd_values(v, spec);
  for (auto& x : v) x += 250.0;
  const auto shifted = fbewma_values(v, spec);
  const auto shifted_sd = fbewmsd_values(v, spec);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_NEAR(shifted[i], base[i] + 250.0, 1e-10);
    EXPECT_NEAR(shifted_sd[i], base_sd[i], 1e-10);
  }
}

TEST(Fbewmsd, ConstantIsZero) {
  for (const auto& p : fbewmsd(uniform_series(std::vector<double>(30, 3.0)), 10)) EXPECT_DOUBLE_EQ(p.value, 0.0);
}

TEST(Fbewmsd, WindowOneIsZero) {
  const auto out = fbewmsd(uniform_series({1.0, 5.0}), 1);
  EXPECT_DOUBLE_EQ(out[0].value, 0.0);
  EXPECT_DOUBLE_EQ(out[1].value, 0.0);
}

TEST(Fbewmsd, NeedsTwoSamples) {
  EXPECT_EQ(kind_of([] { fbewmsd(uniform_series({1.0}), 10); }), ErrorKind::insufficient_data);
}

TEST(Fbewmsd, MatchesDirectFormula) {
  std::mt19937_64 rng(77);
  const auto v = random_values(rng, 200);
  for (std::size_t window : {2u, 10u, 300u}) {
    const double alpha = 2.0 / (static_cast<double>(window) + 1.0);
    const auto f = testing::direct_ewmsd(v, alpha);
    const auto b = testing::reversed_apply(v, [&](const auto& r) { return testing::direct_ewmsd(r, alpha); });
    const auto out = fbewmsd_values(v, EwmaSpec::from_span(static_cast<double>(window)));
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(out[i], (f[i] + b[i]) / 2, 1e-10);
      EXPECT_GE(out[i], 0.0);
    }
  }
}

TEST(RejectOutliers, SingleSpikeIsRemoved) {
  std::vector<double> v(200, 100.0);
  v[120] = 101.0;
  for (auto mode : {RejectionMode::reevaluate, RejectionMode::cumulative}) {
    FilterParams params;
    params.rejection = mode;
    const auto split = reject_outliers(uniform_series(v), params);
    ASSERT_EQ(split.removed.size(), 1u);
    EXPECT_DOUBLE_EQ(split.removed[0].value, 101.0);
    EXPECT_EQ(split.kept.size(), 199u);
    EXPECT_FALSE(split.kept_mask[120]);
  }
}

TEST(RejectOutliers, FixedPointKeepsEverything) {
  std::mt19937_64 rng(2);
  const auto s = uniform_series(random_values(rng, 300, 99.97, 100.03));
  const auto split = reject_outliers(s);
  EXPECT_TRUE(split.removed.empty());
  EXPECT_EQ(split.kept.size(), s.size());
  EXPECT_EQ(split.passes, 1u);
}

TEST(RejectOutliers, NoiselessSlopeIsKept) {
  std::vector<double> v(7001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100.0 + 1e-3 * 0.1 * static_cast<double>(i);
  for (auto mode : {RejectionMode::reevaluate, RejectionMode::cumulative}) {
    FilterParams params;
    params.rejection = mode;
    const auto split = reject_outliers(uniform_series(v), params);
    EXPECT_EQ(split.kept.size(), v.size());
  }
}

TEST(RejectOutliers, PartitionAndFixedPointProperties) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0, 0.03);
  std::bernoulli_distribution spike(0.08);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> v(600);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100 + noise(rng) + (spike(rng) ? 0.8 : 0.0);
    const auto s = uniform_series(v);
    for (auto mode : {RejectionMode::reevaluate, RejectionMode::cumulative}) {
      FilterParams params;
      params.rejection = mode;
      const auto split = reject_outliers(s, params);
      EXPECT_EQ(split.kept.size() + split.removed.size(), s.size());
      // disjoint and covering: chainages interleave back to the input
      std::vector<double> all = split.kept.chainages();
      const auto rem = split.removed.chainages();
      all.insert(all.end(), rem.begin(), rem.end());
      std::sort(all.begin(), all.end());
      EXPECT_EQ(all, s.chainages());
      // a point equal to the smoothed level is never removed
      const auto smooth = fbewma_values(v, EwmaSpec::from_span(50));
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == smooth[i]) EXPECT_TRUE(split.kept_mask[i]);
      }
      // running again with more passes does not change a converged result
      if (split.passes < params.iterations) {
        params.iterations = 10;
        const auto again = reject_outliers(s, params);
        EXPECT_EQ(again.kept_mask, split.kept_mask);
      }
    }
  }
}

TEST(RejectOutliers, KeptSeriesIsAFixedPoint) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0, 0.02);
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100 + noise(rng) + (i % 13 == 0 ? 1.0 : 0.0);
  FilterParams params;
  params.iterations = 20;
  const auto split = reject_outliers(uniform_series(v), params);
  const auto again = reject_outliers(split.kept, params);
  EXPECT_TRUE(again.removed.empty());
}

TEST(RejectOutliers, AllRemovedIsDegenerate) {
  // two far-apart clusters: every point is > max_dev from the blended mean
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) v.push_back(i % 2 ? 110.0 : 90.0);
  FilterParams params;
  params.span = 1000;
  params.rejection = RejectionMode::cumulative;
  EXPECT_EQ(kind_of([&] { reject_outliers(uniform_series(v), params); }), ErrorKind::degenerate_series);
}

TEST(RejectOutliers, InvalidParams) {
  FilterParams params;
  params.max_dev = 0.0;
  EXPECT_EQ(kind_of([&] { reject_outliers(uniform_series({1, 2}), params); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { reject_outliers(ChainageSeries{}); }), ErrorKind::empty_input);
}

TEST(SeriesCsv, RoundTripAtNineDigits) {
  testing::TempDir dir;
  const auto s = uniform_series({100.123456789, 100.5, 99.25});
  write_series_csv(dir / "s.csv", s);
  const auto back = load_series_csv(dir / "s.csv");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back[i].value, s[i].value, 1e-6);
}

}  // namespace
}  // namespace wsekit
