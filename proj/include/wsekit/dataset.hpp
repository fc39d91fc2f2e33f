#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wsekit {

inline constexpr std::size_t kPatchPx = 256;
inline constexpr std::size_t kPatchPixels = kPatchPx * kPatchPx;

struct DsmStats {
  double mean = 0.0;
  double std = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

DsmStats compute_dsm_stats(std::span<const float> dsm);

/// One machine-learning sample: co-registered 256x256 orthophoto and DSM
/// crops with the ground-truth water surface elevation and metadata.
struct SampleRecord {
  std::vector<unsigned char> ortho;  // row-major, north row first
  std::vector<float> dsm;            // metres MSL, same layout
  double wse = 0.0;
  DsmStats stats;
  std::optional<double> centroid_lat;  // WGS-84 degrees, when known
  std::optional<double> centroid_lon;
  double chainage = 0.0;
  std::string subset_id;

  /// Throws structural/integrity errors when shapes or statistics disagree.
  void validate(double stats_tolerance = 1e-6) const;
};

/// Builds a record and fills `stats` from the DSM.
SampleRecord make_sample(std::vector<unsigned char> ortho, std::vector<float> dsm, double wse, double chainage,
                         std::string subset_id, std::optional<double> centroid_lat = std::nullopt,
                         std::optional<double> centroid_lon = std::nullopt);

struct StandardizationParams {
  double sigma_dsm = 1.197;
  double dsm_denominator_factor = 2.0;
  double mu_ort = 0.449;
  double sigma_ort = 0.226;

  void validate() const;
};

/// (dsm - mean(dsm)) / (factor * sigma_dsm).
std::vector<double> standardize_dsm(std::span<const double> dsm, const StandardizationParams& params = {});
std::vector<double> standardize_dsm(std::span<const float> dsm, const StandardizationParams& params = {});
/// Inverse of standardize_dsm given the sample's original mean.
std::vector<double> destandardize_dsm(std::span<const double> std_dsm, double original_mean,
                                      const StandardizationParams& params = {});
/// (ortho / 255 - mu_ort) / sigma_ort.
std::vector<double> standardize_ortho(std::span<const unsigned char> ortho, const StandardizationParams& params = {});

/// Keeps samples whose DSM range is strictly below `threshold` metres.
bool range_filter(const SampleRecord& sample, double threshold = 4.5);

enum class Rotation { r0, r90, r180, r270 };  // counter-clockwise
enum class Flip { none, x, y, both };         // x mirrors columns, y mirrors rows

/// Rotation is applied first, then the flip.
struct Variant {
  Rotation rotation;
  Flip flip;
};

/// All 16 rotation x flip combinations in emission order (rotation-major).
std::array<Variant, 16> augmentation_variants();

/// Applies a variant to a row-major n x n array.
template <typename T>
std::vector<T> apply_variant(std::span<const T> a, std::size_t n, Variant v) {
  std::vector<T> out(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      // undo the flip to find the rotated-array cell, then undo the rotation
      std::size_t rr = r;
      std::size_t rc = c;
      if (v.flip == Flip::y || v.flip == Flip::both) rr = n - 1 - rr;
      if (v.flip == Flip::x || v.flip == Flip::both) rc = n - 1 - rc;
      std::size_t sr = rr;
      std::size_t sc = rc;
      switch (v.rotation) {
        case Rotation::r0: break;
        case Rotation::r90: sr = rc; sc = n - 1 - rr; break;
        case Rotation::r180: sr = n - 1 - rr; sc = n - 1 - rc; break;
        case Rotation::r270: sr = n - 1 - rc; sc = rr; break;
      }
      out[r * n + c] = a[sr * n + sc];
    }
  }
  return out;
}

/// The 16 augmented copies of a sample (ortho and DSM transformed alike,
/// scalars unchanged). With `dedupe`, only the 8 distinct dihedral
/// transforms are emitted, first occurrence kept.
std::vector<SampleRecord> augment(const SampleRecord& sample, bool dedupe = false);

/// Sample directory: meta.json, dsm.f32 (65536 little-endian float32),
/// ortho.pgm (P5 256x256).
void write_sample(const SampleRecord& sample, const std::filesystem::path& dir);
/// Throws format errors naming the bad file and an integrity error when the
/// stored statistics differ from the array by more than 1e-4.
SampleRecord read_sample(const std::filesystem::path& dir);

/// Pooled population standard deviation of every DSM pixel of every sample.
double compute_global_sigma(std::span<const SampleRecord> samples);

struct Manifest {
  std::vector<std::string> samples;  // sample directories relative to the manifest
  std::vector<std::string> subsets;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace wsekit
