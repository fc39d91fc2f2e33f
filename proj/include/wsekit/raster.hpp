#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace wsekit {

/// North-up affine georeference. The origin is the outer (north-west) corner
/// of pixel (0, 0); rows advance toward decreasing northing.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_size = 1.0;

  struct PixelCoord {
    double col;
    double row;
  };
  struct WorldCoord {
    double x;
    double y;
  };

  /// World position of the corner (col, row); fractional indices allowed.
  WorldCoord pixel_to_world(double col, double row) const noexcept {
    return {origin_x + col * pixel_size, origin_y - row * pixel_size};
  }
  WorldCoord pixel_center(std::size_t col, std::size_t row) const noexcept {
    return pixel_to_world(static_cast<double>(col) + 0.5, static_cast<double>(row) + 0.5);
  }
  PixelCoord world_to_pixel(double x, double y) const noexcept {
    return {(x - origin_x) / pixel_size, (origin_y - y) / pixel_size};
  }
};

/// Axis-aligned rectangle in world coordinates.
struct Box {
  double min_x;
  double min_y;
  double max_x;
  double max_y;

  static Box centered(double cx, double cy, double side) noexcept {
    return {cx - side / 2, cy - side / 2, cx + side / 2, cy + side / 2};
  }
};

/// Immutable georeferenced raster with row-major values (row 0 = north).
class Grid {
 public:
  Grid(std::size_t width, std::size_t height, std::vector<double> values, GeoTransform transform,
       std::optional<double> nodata = std::nullopt);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const GeoTransform& transform() const noexcept { return transform_; }
  const std::optional<double>& nodata() const noexcept { return nodata_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t col, std::size_t row) const { return values_[row * width_ + col]; }
  bool is_nodata(double v) const noexcept { return nodata_ && v == *nodata_; }

  /// Outer extent of the raster in world coordinates.
  Box extent() const noexcept;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
  GeoTransform transform_;
  std::optional<double> nodata_;
};

/// ESRI ASCII grid (ncols, nrows, xllcorner, yllcorner, cellsize, optional
/// NODATA_value; keys case-insensitive).
Grid load_dsm_ascii(const std::filesystem::path& path);
void write_dsm_ascii(const std::filesystem::path& path, const Grid& grid);

/// Binary P5 PGM (maxval 255) georeferenced by a 6-line world file whose
/// C/F terms are the centre of the top-left pixel.
Grid load_ortho_pgm(const std::filesystem::path& path, const std::filesystem::path& worldfile);
void write_ortho_pgm(const std::filesystem::path& path, const std::filesystem::path& worldfile, const Grid& grid);

/// Raw P5 codec shared with the dataset sample format.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<unsigned char> pixels;
};
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Bilinear interpolation between the four pixel centres around (x, y).
/// Throws out_of_bounds outside the pixel-centre hull and nodata when a
/// neighbour with non-zero weight is nodata.
double sample_bilinear(const Grid& grid, double x, double y);

/// Resamples the side x side square around (center_x, center_y) onto an
/// out_px x out_px grid whose pixel centres span the square uniformly.
/// Sample positions inside the outer half pixel of the source are clamped
/// onto the pixel-centre hull (edge replication).
Grid extract_patch(const Grid& grid, double center_x, double center_y, double side = 10.0,
                   std::size_t out_px = 256);

}  // namespace wsekit
