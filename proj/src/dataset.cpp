#include "wsekit/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"
#include "wsekit/raster.hpp"

namespace wsekit {

using nlohmann::json;

DsmStats compute_dsm_stats(std::span<const float> dsm) {
  if (dsm.empty()) throw Error(ErrorKind::insufficient_data, "statistics of an empty DSM");
  double sum = 0.0;
  double lo = dsm[0];
  double hi = dsm[0];
  for (float v : dsm) {
    sum += v;
    lo = std::min<double>(lo, v);
    hi = std::max<double>(hi, v);
  }
  const double mean = sum / static_cast<double>(dsm.size());
  double ss = 0.0;
  for (float v : dsm) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(dsm.size())), lo, hi};
}

void SampleRecord::validate(double stats_tolerance) const {
  if (ortho.size() != kPatchPixels || dsm.size() != kPatchPixels) {
    throw Error(ErrorKind::structural, "sample arrays must be 256x256");
  }
  for (float v : dsm) {
    if (!std::isfinite(v)) throw Error(ErrorKind::structural, "sample DSM contains a non-finite value");
  }
  const auto actual = compute_dsm_stats(dsm);
  const auto check = [&](const char* name, double stored, double recomputed) {
    if (!(std::abs(stored - recomputed) <= stats_tolerance)) {
      throw Error(ErrorKind::integrity, std::string("metadata ") + name + " disagrees with the DSM array");
    }
  };
  check("dsm_mean", stats.mean, actual.mean);
  check("dsm_std", stats.std, actual.std);
  check("dsm_min", stats.min, actual.min);
  check("dsm_max", stats.max, actual.max);
}

SampleRecord make_sample(std::vector<unsigned char> ortho, std::vector<float> dsm, double wse, double chainage,
                         std::string subset_id, std::optional<double> centroid_lat,
                         std::optional<double> centroid_lon) {
  SampleRecord s;
  s.ortho = std::move(ortho);
  s.dsm = std::move(dsm);
  s.wse = wse;
  s.chainage = chainage;
  s.subset_id = std::move(subset_id);
  s.centroid_lat = centroid_lat;
  s.centroid_lon = centroid_lon;
  s.stats = compute_dsm_stats(s.dsm);
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Standardisation

void StandardizationParams::validate() const {
  if (!(sigma_dsm > 0 && dsm_denominator_factor > 0 && mu_ort > 0 && sigma_ort > 0)) {
    throw Error(ErrorKind::config, "standardisation parameters must be positive");
  }
}

namespace {

template <typename T>
std::vector<double> standardize_dsm_impl(std::span<const T> dsm, const StandardizationParams& params) {
  params.validate();
  if (dsm.empty()) return {};
  double sum = 0.0;
  for (T v : dsm) sum += v;
  const double mean = sum / static_cast<double>(dsm.size());
  const double denom = params.dsm_denominator_factor * params.sigma_dsm;
  std::vector<double> out(dsm.size());
  for (std::size_t i = 0; i < dsm.size(); ++i) out[i] = (static_cast<double>(dsm[i]) - mean) / denom;
  return out;
}

}  // namespace

std::vector<double> standardize_dsm(std::span<const double> dsm, const StandardizationParams& params) {
  return standardize_dsm_impl(dsm, params);
}

std::vector<double> standardize_dsm(std::span<const float> dsm, const StandardizationParams& params) {
  return standardize_dsm_impl(dsm, params);
}

std::vector<double> destandardize_dsm(std::span<const double> std_dsm, double original_mean,
                                      const StandardizationParams& params) {
  params.validate();
  const double scale = params.dsm_denominator_factor * params.sigma_dsm;
  std::vector<double> out(std_dsm.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std_dsm[i] * scale + original_mean;
  return out;
}

std::vector<double> standardize_ortho(std::span<const unsigned char> ortho, const StandardizationParams& params) {
  params.validate();
  std::vector<double> out(ortho.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (ortho[i] / 255.0 - params.mu_ort) / params.sigma_ort;
  return out;
}

bool range_filter(const SampleRecord& sample, double threshold) {
  return sample.stats.max - sample.stats.min < threshold;
}

// ---------------------------------------------------------------------------
// Augmentation

std::array<Variant, 16> augmentation_variants() {
  std::array<Variant, 16> out{};
  std::size_t i = 0;
  for (auto rot : {Rotation::r0, Rotation::r90, Rotation::r180, Rotation::r270}) {
    for (auto flip : {Flip::none, Flip::x, Flip::y, Flip::both}) out[i++] = {rot, flip};
  }
  return out;
}

std::vector<SampleRecord> augment(const SampleRecord& sample, bool dedupe) {
  const std::size_t n = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(sample.dsm.size()))));
  if (n * n != sample.dsm.size() || sample.ortho.size() != sample.dsm.size()) {
    throw Error(ErrorKind::structural, "augmentation needs matching square arrays");
  }
  // a 3x3 array of distinct markers identifies each dihedral element
  const std::array<int, 9> marker{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::vector<int>> seen;
  std::vector<SampleRecord> out;
  out.reserve(16);
  for (const auto& v : augmentation_variants()) {
    if (dedupe) {
      auto key = apply_variant<int>(marker, 3, v);
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(std::move(key));
    }
    SampleRecord copy;
    copy.ortho = apply_variant<unsigned char>(sample.ortho, n, v);
    copy.dsm = apply_variant<float>(sample.dsm, n, v);
    copy.wse = sample.wse;
    copy.stats = sample.stats;
    copy.centroid_lat = sample.centroid_lat;
    copy.centroid_lon = sample.centroid_lon;
    copy.chainage = sample.chainage;
    copy.subset_id = sample.subset_id;
    out.push_back(std::move(copy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sample directories

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kDsmFile = "dsm.f32";
constexpr const char* kOrthoFile = "ortho.pgm";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double meta_number(const json& meta, const char* key, const std::filesystem::path& file) {
  if (!meta.contains(key) || !meta.at(key).is_number()) {
    throw Error(ErrorKind::format, file.string() + ": missing or non-numeric '" + key + "'");
  }
  return meta.at(key).get<double>();
}

std::optional<double> meta_optional(const json& meta, const char* key, const std::filesystem::path& file) {
  if (!meta.contains(key)) throw Error(ErrorKind::format, file.string() + ": missing '" + key + "'");
  if (meta.at(key).is_null()) return std::nullopt;
  return meta_number(meta, key, file);
}

}  // namespace

void write_sample(const SampleRecord& sample, const std::filesystem::path& dir) {
  if (sample.ortho.size() != kPatchPixels || sample.dsm.size() != kPatchPixels) {
    throw Error(ErrorKind::structural, "sample arrays must be 256x256");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  const json meta = {
      {"wse_m", sample.wse},
      {"dsm_mean_m", sample.stats.mean},
      {"dsm_std_m", sample.stats.std},
      {"dsm_min_m", sample.stats.min},
      {"dsm_max_m", sample.stats.max},
      {"centroid_lat", optional_number(sample.centroid_lat)},
      {"centroid_lon", optional_number(sample.centroid_lon)},
      {"chainage_m", sample.chainage},
      {"subset_id", sample.subset_id},
  };
  write_text_file(dir / kMetaFile, meta.dump(2) + "\n");

  std::string raw(kPatchPixels * 4, '\0');
  for (std::size_t i = 0; i < kPatchPixels; ++i) {
    const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(sample.dsm[i]));
    std::memcpy(raw.data() + 4 * i, &bits, 4);
  }
  write_text_file(dir / kDsmFile, raw);
  write_pgm(dir / kOrthoFile, GrayImage{kPatchPx, kPatchPx, sample.ortho});
}

SampleRecord read_sample(const std::filesystem::path& dir) {
  for (const char* name : {kMetaFile, kDsmFile, kOrthoFile}) {
    if (!std::filesystem::is_regular_file(dir / name)) {
      throw Error(ErrorKind::format, (dir / name).string() + ": file missing");
    }
  }
  SampleRecord s;
  const auto meta_path = dir / kMetaFile;
  json meta;
  try {
    meta = json::parse(read_text_file(meta_path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, meta_path.string() + ": " + e.what());
  }
  if (!meta.is_object()) throw Error(ErrorKind::format, meta_path.string() + ": expected a JSON object");
  s.wse = meta_number(meta, "wse_m", meta_path);
  s.stats = {meta_number(meta, "dsm_mean_m", meta_path), meta_number(meta, "dsm_std_m", meta_path),
             meta_number(meta, "dsm_min_m", meta_path), meta_number(meta, "dsm_max_m", meta_path)};
  s.centroid_lat = meta_optional(meta, "centroid_lat", meta_path);
  s.centroid_lon = meta_optional(meta, "centroid_lon", meta_path);
  s.chainage = meta_number(meta, "chainage_m", meta_path);
  if (!meta.contains("subset_id") || !meta.at("subset_id").is_string()) {
    throw Error(ErrorKind::format, meta_path.string() + ": missing or non-string 'subset_id'");
  }
  s.subset_id = meta.at("subset_id").get<std::string>();

  const auto dsm_path = dir / kDsmFile;
  const std::string raw = read_text_file(dsm_path);
  if (raw.size() != kPatchPixels * 4) {
    throw Error(ErrorKind::format, dsm_path.string() + ": expected " + std::to_string(kPatchPixels * 4) + " bytes");
  }
  s.dsm.resize(kPatchPixels);
  for (std::size_t i = 0; i < kPatchPixels; ++i) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, raw.data() + 4 * i, 4);
    s.dsm[i] = std::bit_cast<float>(to_little(bits));
  }

  const auto ortho_path = dir / kOrthoFile;
  GrayImage img;
  try {
    img = read_pgm(ortho_path);
  } catch (const Error& e) {
    throw Error(ErrorKind::format, e.what());
  }
  if (img.width != kPatchPx || img.height != kPatchPx) {
    throw Error(ErrorKind::format, ortho_path.string() + ": expected a 256x256 image");
  }
  s.ortho = std::move(img.pixels);
  try {
    s.validate(1e-4);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::integrity) throw Error(ErrorKind::integrity, dir.string() + ": " + e.what());
    throw Error(ErrorKind::format, dsm_path.string() + ": " + e.what());
  }
  return s;
}

double compute_global_sigma(std::span<const SampleRecord> samples) {
  if (samples.empty()) throw Error(ErrorKind::insufficient_data, "global sigma of an empty dataset");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    for (float v : s.dsm) sum += v;
    count += s.dsm.size();
  }
  if (count == 0) throw Error(ErrorKind::insufficient_data, "dataset has no DSM pixels");
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (const auto& s : samples) {
    for (float v : s.dsm) ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / static_cast<double>(count));
}

Manifest read_manifest(const std::filesystem::path& path) {
  Manifest m;
  try {
    const auto doc = json::parse(read_text_file(path));
    m.samples = doc.at("samples").get<std::vector<std::string>>();
    m.subsets = doc.at("subsets").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  const json doc = {{"samples", manifest.samples}, {"subsets", manifest.subsets}};
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace wsekit
