#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "json.hpp"

#include "support/expect_error.hpp"
#include "support/test_support.hpp"
#include "wsekit/csv.hpp"
#include "wsekit/dataset.hpp"

namespace wsekit {
namespace {

using testing::kind_of;

SampleRecord random_sample(std::mt19937_64& rng, const std::string& subset = "AMO18") {
  std::uniform_int_distribution<int> px(0, 255);
  std::normal_distribution<float> z(200.0f, 0.8f);
  std::vector<unsigned char> ortho(kPatchPixels);
  std::vector<float> dsm(kPatchPixels);
  for (auto& v : ortho) v = static_cast<unsigned char>(px(rng));
  for (auto& v : dsm) v = z(rng);
  return make_sample(std::move(ortho), std::move(dsm), 199.1234567, 321.5, subset, 49.0123, 18.765);
}

TEST(DsmStats, Population) {
  const std::vector<float> v{1, 2, 3, 4};
  const auto s = compute_dsm_stats(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(s.min, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 4.0);
}

TEST(SampleRecord, ValidateShapes) {
  std::mt19937_64 rng(1);
  auto s = random_sample(rng);
  EXPECT_NO_THROW(s.validate());
  s.dsm.pop_back();
  EXPECT_EQ(kind_of([&] { s.validate(); }), ErrorKind::structural);
  auto t = random_sample(rng);
  t.stats.max -= 0.01;
  EXPECT_EQ(kind_of([&] { t.validate(); }), ErrorKind::integrity);
}

TEST(Standardize, DsmAnchors) {
  std::vector<double> flat(kPatchPixels, 321.0);
  for (double v : standardize_dsm(flat)) EXPECT_DOUBLE_EQ(v, 0.0);

  // mean 200 sample with one pixel at 201.197
  std::vector<double> dsm{201.197, 198.803, 200.0, 200.0};
  const auto out = standardize_dsm(dsm);
  EXPECT_NEAR(out[0], 0.5, 1e-12);
  EXPECT_NEAR(out[1], -0.5, 1e-12);

  const std::vector<double> half{0.5};
  EXPECT_NEAR(destandardize_dsm(half, 200.0)[0], 201.197, 1e-12);
  const std::vector<double> zeros(4, 0.0);
  for (double v : destandardize_dsm(zeros, 250.0)) EXPECT_DOUBLE_EQ(v, 250.0);
}

TEST(Standardize, DsmRoundTripAndAltitudeInvariance) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(150.0, 2.0);
  std::vector<double> dsm(kPatchPixels);
  for (auto& v : dsm) v = z(rng);
  double mean = 0;
  for (double v : dsm) mean += v;
  mean /= static_cast<double>(dsm.size());

  const auto out = standardize_dsm(dsm);
  double out_mean = 0;
  for (double v : out) out_mean += v;
  EXPECT_NEAR(out_mean / static_cast<double>(out.size()), 0.0, 1e-9);

  const auto back = destandardize_dsm(out, mean);
  for (std::size_t i = 0; i < dsm.size(); ++i) EXPECT_NEAR(back[i], dsm[i], 1e-9);

  auto lifted = dsm;
  for (auto& v : lifted) v += 812.5;
  const auto out_lifted = standardize_dsm(lifted);
  for (std::size_t i = 0; i < dsm.size(); ++i) EXPECT_NEAR(out_lifted[i], out[i], 1e-9);
}

TEST(Standardize, OrthoAnchors) {
  const std::vector<unsigned char> px{114, 255, 0};
  const auto out = standardize_ortho(px);
  EXPECT_NEAR(out[0], (114.0 / 255.0 - 0.449) / 0.226, 1e-15);
  EXPECT_NEAR(out[0], -0.0085893, 1e-7);
  EXPECT_NEAR(out[1], 2.43805, 1e-5);
  EXPECT_NEAR(out[2], -1.98672, 1e-5);
}

TEST(Standardize, ParamsMustBePositive) {
  StandardizationParams p;
  p.sigma_dsm = 0;
  const std::vector<double> v{1.0};
  EXPECT_EQ(kind_of([&] { standardize_dsm(v, p); }), ErrorKind::config);
}

TEST(RangeFilter, StrictThreshold) {
  auto with_range = [](float range) {
    std::vector<float> dsm(kPatchPixels, 100.0f);
    dsm[7] = 100.0f + range;
    return make_sample(std::vector<unsigned char>(kPatchPixels, 0), dsm, 100, 0, "s");
  };
  EXPECT_TRUE(range_filter(with_range(4.25f)));
  EXPECT_FALSE(range_filter(with_range(4.5f)));
  EXPECT_FALSE(range_filter(with_range(10.0f)));
  SampleRecord s = with_range(0.0f);
  s.stats.min = 0.0;
  s.stats.max = 4.49;
  EXPECT_TRUE(range_filter(s));
}

std::vector<int> apply(const std::vector<int>& a, std::size_t n, Variant v) {
  return apply_variant<int>(a, n, v);
}

TEST(Augment, RotationAndFlipConventions) {
  const std::vector<int> m{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(apply(m, 3, {Rotation::r0, Flip::none}), m);
  EXPECT_EQ(apply(m, 3, {Rotation::r90, Flip::none}), (std::vector<int>{3, 6, 9, 2, 5, 8, 1, 4, 7}));
  EXPECT_EQ(apply(m, 3, {Rotation::r180, Flip::none}), (std::vector<int>{9, 8, 7, 6, 5, 4, 3, 2, 1}));
  EXPECT_EQ(apply(m, 3, {Rotation::r0, Flip::x}), (std::vector<int>{3, 2, 1, 6, 5, 4, 9, 8, 7}));
  EXPECT_EQ(apply(m, 3, {Rotation::r0, Flip::y}), (std::vector<int>{7, 8, 9, 4, 5, 6, 1, 2, 3}));
  // rotation first, then flip
  EXPECT_EQ(apply(m, 3, {Rotation::r90, Flip::x}), apply(apply(m, 3, {Rotation::r90, Flip::none}), 3, {Rotation::r0, Flip::x}));
  EXPECT_EQ(apply(m, 3, {Rotation::r180, Flip::both}), m);
}

TEST(Augment, DihedralGroupTable) {
  constexpr std::size_t n = 4;
  std::vector<int> base(n * n);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = static_cast<int>(i);
  const auto variants = augmentation_variants();
  std::vector<std::vector<int>> perms;
  for (const auto& v : variants) perms.push_back(apply(base, n, v));

  std::set<std::vector<int>> distinct(perms.begin(), perms.end());
  EXPECT_EQ(distinct.size(), 8u);
  EXPECT_EQ(perms[0], base);
  // closure: composing any two variants lands in the set
  for (const auto& a : variants) {
    for (const auto& b : variants) EXPECT_TRUE(distinct.count(apply(apply(base, n, a), n, b)));
  }
  // every element has an inverse among the variants
  for (const auto& a : variants) {
    bool found = false;
    for (const auto& b : variants) found = found || apply(apply(base, n, a), n, b) == base;
    EXPECT_TRUE(found);
  }
  // flips and 180 rotations are involutions
  for (const auto& v : variants) {
    if (v.rotation == Rotation::r0 || v.rotation == Rotation::r180 || v.flip == Flip::x || v.flip == Flip::y) {
      if (v.rotation == Rotation::r90 || v.rotation == Rotation::r270) {
        EXPECT_EQ(apply(apply(base, n, v), n, v), base);
      } else if (v.flip != Flip::none || v.rotation != Rotation::r0) {
        EXPECT_EQ(apply(apply(base, n, v), n, v), base);
      }
    }
  }
}

TEST(Augment, SixteenCopiesPreserveScalarsAndValues) {
  std::mt19937_64 rng(3);
  const auto s = random_sample(rng);
  const auto out = augment(s);
  ASSERT_EQ(out.size(), 16u);
  auto sorted_dsm = s.dsm;
  std::sort(sorted_dsm.begin(), sorted_dsm.end());
  for (const auto& a : out) {
    EXPECT_EQ(a.wse, s.wse);
    EXPECT_EQ(a.chainage, s.chainage);
    EXPECT_EQ(a.subset_id, s.subset_id);
    auto d = a.dsm;
    std::sort(d.begin(), d.end());
    EXPECT_EQ(d, sorted_dsm);
  }
  EXPECT_EQ(out[0].dsm, s.dsm);
  EXPECT_EQ(out[0].ortho, s.ortho);
  EXPECT_EQ(augment(s, true).size(), 8u);
}

TEST(Augment, OrthoAndDsmTransformTogether) {
  std::mt19937_64 rng(4);
  const auto s = random_sample(rng);
  const auto out = augment(s);
  const auto variants = augmentation_variants();
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_EQ(out[k].ortho, apply_variant<unsigned char>(s.ortho, kPatchPx, variants[k]));
    EXPECT_EQ(out[k].dsm, apply_variant<float>(s.dsm, kPatchPx, variants[k]));
  }
}

TEST(Augment, ConstantArrayGivesIdenticalCopies) {
  const auto s = make_sample(std::vector<unsigned char>(kPatchPixels, 90), std::vector<float>(kPatchPixels, 5.0f), 4, 0, "x");
  for (const auto& a : augment(s)) {
    EXPECT_EQ(a.dsm, s.dsm);
    EXPECT_EQ(a.ortho, s.ortho);
  }
}

TEST(SampleIo, RoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(5);
  const auto s = random_sample(rng);
  write_sample(s, dir / "s0");
  const auto back = read_sample(dir / "s0");
  EXPECT_EQ(back.dsm, s.dsm);
  EXPECT_EQ(back.ortho, s.ortho);
  EXPECT_EQ(back.subset_id, s.subset_id);
  EXPECT_NEAR(back.wse, s.wse, 1e-6);
  EXPECT_NEAR(back.chainage, s.chainage, 1e-9);
  ASSERT_TRUE(back.centroid_lat && back.centroid_lon);
  EXPECT_NEAR(*back.centroid_lat, 49.0123, 1e-9);
  EXPECT_NEAR(back.stats.std, s.stats.std, 1e-6 * s.stats.std);
}

TEST(SampleIo, UnknownCentroidIsNull) {
  testing::TempDir dir;
  const auto s = make_sample(std::vector<unsigned char>(kPatchPixels, 1), std::vector<float>(kPatchPixels, 2.0f), 1, 0, "x");
  write_sample(s, dir / "s");
  const auto meta = nlohmann::json::parse(read_text_file(dir / "s" / "meta.json"));
  EXPECT_TRUE(meta.at("centroid_lat").is_null());
  EXPECT_FALSE(read_sample(dir / "s").centroid_lat.has_value());
}

TEST(SampleIo, DsmIsLittleEndianFloat) {
  testing::TempDir dir;
  std::vector<float> dsm(kPatchPixels, 0.0f);
  dsm[0] = 1.0f;
  write_sample(make_sample(std::vector<unsigned char>(kPatchPixels, 0), dsm, 0, 0, "x"), dir / "s");
  std::ifstream in(dir / "s" / "dsm.f32", std::ios::binary);
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  EXPECT_EQ(b[0], 0x00);
  EXPECT_EQ(b[1], 0x00);
  EXPECT_EQ(b[2], 0x80);
  EXPECT_EQ(b[3], 0x3f);
  EXPECT_EQ(std::filesystem::file_size(dir / "s" / "dsm.f32"), kPatchPixels * 4);
}

TEST(SampleIo, MissingAndCorruptFiles) {
  testing::TempDir dir;
  std::mt19937_64 rng(6);
  write_sample(random_sample(rng), dir / "s");
  std::filesystem::remove(dir / "s" / "dsm.f32");
  try {
    read_sample(dir / "s");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::format);
    EXPECT_NE(std::string(e.what()).find("dsm.f32"), std::string::npos);
  }
  write_sample(random_sample(rng), dir / "t");
  write_text_file(dir / "t" / "ortho.pgm", "P5\n2 2\n255\nab");
  EXPECT_EQ(kind_of([&] { read_sample(dir / "t"); }), ErrorKind::format);
}

TEST(SampleIo, IntegrityMismatch) {
  testing::TempDir dir;
  std::mt19937_64 rng(7);
  const auto s = random_sample(rng);
  write_sample(s, dir / "s");
  auto meta = nlohmann::json::parse(read_text_file(dir / "s" / "meta.json"));
  meta["dsm_max_m"] = s.stats.max - 0.01;
  write_text_file(dir / "s" / "meta.json", meta.dump());
  EXPECT_EQ(kind_of([&] { read_sample(dir / "s"); }), ErrorKind::integrity);
}

TEST(GlobalSigma, Pooled) {
  const auto zero = make_sample(std::vector<unsigned char>(kPatchPixels, 0), std::vector<float>(kPatchPixels, 0.0f), 0, 0, "a");
  const auto two = make_sample(std::vector<unsigned char>(kPatchPixels, 0), std::vector<float>(kPatchPixels, 2.0f), 0, 0, "a");
  const std::vector<SampleRecord> one{zero};
  EXPECT_DOUBLE_EQ(compute_global_sigma(one), 0.0);
  const std::vector<SampleRecord> both{zero, two};
  EXPECT_NEAR(compute_global_sigma(both), 1.0, 1e-12);
  EXPECT_EQ(kind_of([] { compute_global_sigma({}); }), ErrorKind::insufficient_data);
}

TEST(Manifest, RoundTrip) {
  testing::TempDir dir;
  const Manifest m{{"AMO18/s0000", "GRO21/s0001"}, {"AMO18", "GRO21"}};
  write_manifest(dir / "manifest.json", m);
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.samples, m.samples);
  EXPECT_EQ(back.subsets, m.subsets);
  write_text_file(dir / "bad.json", "{\"samples\": 3}");
  EXPECT_EQ(kind_of([&] { read_manifest(dir / "bad.json"); }), ErrorKind::format);
}

}  // namespace
}  // namespace wsekit
