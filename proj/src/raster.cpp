#include "wsekit/raster.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "wsekit/csv.hpp"
#include "wsekit/error.hpp"
#include "wsekit/numfmt.hpp"

namespace wsekit {

Grid::Grid(std::size_t width, std::size_t height, std::vector<double> values, GeoTransform transform,
           std::optional<double> nodata)
    : width_(width), height_(height), values_(std::move(values)), transform_(transform), nodata_(nodata) {
  if (width_ < 2 || height_ < 2) throw Error(ErrorKind::structural, "grid must be at least 2x2");
  if (values_.size() != width_ * height_) {
    throw Error(ErrorKind::structural, "grid has " + std::to_string(values_.size()) + " values, expected " +
                                           std::to_string(width_ * height_));
  }
  if (!(transform_.pixel_size > 0.0) || !std::isfinite(transform_.pixel_size)) {
    throw Error(ErrorKind::structural, "pixel size must be positive");
  }
  for (double v : values_) {
    if (!is_nodata(v) && !std::isfinite(v)) throw Error(ErrorKind::structural, "grid contains non-finite value");
  }
}

Box Grid::extent() const noexcept {
  const auto nw = transform_.pixel_to_world(0, 0);
  const auto se = transform_.pixel_to_world(static_cast<double>(width_), static_cast<double>(height_));
  return {nw.x, se.y, se.x, nw.y};
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool starts_numeric(const std::string& token) {
  if (token.empty()) return false;
  const char c = token.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

}  // namespace

Grid load_dsm_ascii(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::map<std::string, double> header;
  std::string token;
  std::string pending;
  while (in >> token) {
    if (starts_numeric(token)) {
      pending = token;
      break;
    }
    const std::string key = lower(token);
    static const char* known[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw Error(ErrorKind::parse, path.string() + ": unknown header key '" + token + "'");
    }
    std::string value;
    if (!(in >> value)) throw Error(ErrorKind::parse, path.string() + ": missing value for header key '" + token + "'");
    const auto parsed = parse_double(value);
    if (!parsed) throw Error(ErrorKind::parse, path.string() + ": bad value for header key '" + token + "'");
    header[key] = *parsed;
  }
  for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
    if (!header.count(key)) throw Error(ErrorKind::parse, path.string() + ": missing header key '" + key + "'");
  }
  const auto as_count = [&](const char* key) {
    const double v = header.at(key);
    if (v < 1 || v != std::floor(v)) {
      throw Error(ErrorKind::parse, path.string() + ": header key '" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  const std::size_t ncols = as_count("ncols");
  const std::size_t nrows = as_count("nrows");
  const double cellsize = header.at("cellsize");
  if (!(cellsize > 0)) throw Error(ErrorKind::parse, path.string() + ": header key 'cellsize' must be positive");

  std::vector<double> values;
  values.reserve(ncols * nrows);
  if (!pending.empty()) {
    do {
      const auto v = parse_double(pending);
      if (!v) throw Error(ErrorKind::parse, path.string() + ": non-numeric grid value '" + pending + "'");
      values.push_back(*v);
    } while (in >> pending);
  }
  if (values.size() != ncols * nrows) {
    throw Error(ErrorKind::structural, path.string() + ": " + std::to_string(values.size()) + " values for " +
                                           std::to_string(ncols) + "x" + std::to_string(nrows) + " grid");
  }
  std::optional<double> nodata;
  if (header.count("nodata_value")) nodata = header.at("nodata_value");
  const GeoTransform transform{header.at("xllcorner"), header.at("yllcorner") + static_cast<double>(nrows) * cellsize,
                               cellsize};
  return Grid(ncols, nrows, std::move(values), transform, nodata);
}

void write_dsm_ascii(const std::filesystem::path& path, const Grid& grid) {
  const auto& t = grid.transform();
  std::string out;
  out += "ncols " + std::to_string(grid.width()) + "\n";
  out += "nrows " + std::to_string(grid.height()) + "\n";
  out += "xllcorner " + format_exact(t.origin_x) + "\n";
  out += "yllcorner " + format_exact(t.origin_y - static_cast<double>(grid.height()) * t.pixel_size) + "\n";
  out += "cellsize " + format_exact(t.pixel_size) + "\n";
  if (grid.nodata()) out += "NODATA_value " + format_exact(*grid.nodata()) + "\n";
  for (std::size_t r = 0; r < grid.height(); ++r) {
    for (std::size_t c = 0; c < grid.width(); ++c) {
      if (c) out += ' ';
      out += format_exact(grid.at(c, r));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// PGM + world file

namespace {

// Reads the next header token of a PNM file, skipping '#' comments.
std::string pnm_token(const std::string& data, std::size_t& pos) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') ++pos;
  return data.substr(start, pos - start);
}

std::size_t pnm_int(const std::string& data, std::size_t& pos, const std::filesystem::path& path, const char* what) {
  const auto tok = pnm_token(data, pos);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::parse, path.string() + ": bad PGM " + what);
  }
  return v;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string data = read_text_file(path);
  std::size_t pos = 0;
  if (pnm_token(data, pos) != "P5") throw Error(ErrorKind::unsupported_format, path.string() + ": not a P5 PGM");
  GrayImage img;
  img.width = pnm_int(data, pos, path, "width");
  img.height = pnm_int(data, pos, path, "height");
  const std::size_t maxval = pnm_int(data, pos, path, "maxval");
  if (maxval != 255) {
    throw Error(ErrorKind::unsupported_format, path.string() + ": maxval " + std::to_string(maxval) + " (need 255)");
  }
  ++pos;  // single whitespace byte before the raster
  const std::size_t count = img.width * img.height;
  if (pos > data.size() || data.size() - pos < count) {
    throw Error(ErrorKind::structural, path.string() + ": truncated PGM raster");
  }
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                    data.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.pixels.size() != image.width * image.height) throw Error(ErrorKind::structural, "PGM size mismatch");
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(image.pixels.begin(), image.pixels.end());
  write_text_file(path, out);
}

Grid load_ortho_pgm(const std::filesystem::path& path, const std::filesystem::path& worldfile) {
  const auto img = read_pgm(path);
  const std::string wtext = read_text_file(worldfile);
  std::istringstream win(wtext);
  double terms[6];
  for (int i = 0; i < 6; ++i) {
    std::string tok;
    if (!(win >> tok)) throw Error(ErrorKind::parse, worldfile.string() + ": world file needs 6 lines");
    const auto v = parse_double(tok);
    if (!v) throw Error(ErrorKind::parse, worldfile.string() + ": bad world file term '" + tok + "'");
    terms[i] = *v;
  }
  const double a = terms[0], d = terms[1], b = terms[2], e = terms[3], c = terms[4], f = terms[5];
  if (d != 0.0 || b != 0.0) throw Error(ErrorKind::unsupported_geometry, worldfile.string() + ": rotation terms must be zero");
  if (!(a > 0.0) || std::abs(a + e) > 1e-12 * a) {
    throw Error(ErrorKind::unsupported_geometry, worldfile.string() + ": pixels must be square and north-up");
  }
  std::vector<double> values(img.pixels.begin(), img.pixels.end());
  return Grid(img.width, img.height, std::move(values), GeoTransform{c - a / 2, f + a / 2, a});
}

void write_ortho_pgm(const std::filesystem::path& path, const std::filesystem::path& worldfile, const Grid& grid) {
  GrayImage img{grid.width(), grid.height(), {}};
  img.pixels.reserve(grid.values().size());
  for (double v : grid.values()) {
    if (v < 0 || v > 255 || v != std::floor(v)) {
      throw Error(ErrorKind::unsupported_format, "orthophoto values must be integers 0-255");
    }
    img.pixels.push_back(static_cast<unsigned char>(v));
  }
  write_pgm(path, img);
  const auto& t = grid.transform();
  const auto c = t.pixel_center(0, 0);
  write_text_file(worldfile, format_exact(t.pixel_size) + "\n0\n0\n" + format_exact(-t.pixel_size) + "\n" +
                                 format_exact(c.x) + "\n" + format_exact(c.y) + "\n");
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr double kHullEps = 1e-9;

// Bilinear evaluation at fractional pixel-centre coordinates (u, v), which
// must already lie within [0, w-1] x [0, h-1].
double bilinear_at(const Grid& grid, double u, double v) {
  const std::size_t w = grid.width();
  const std::size_t h = grid.height();
  const std::size_t c0 = std::min(static_cast<std::size_t>(std::floor(u)), w - 2);
  const std::size_t r0 = std::min(static_cast<std::size_t>(std::floor(v)), h - 2);
  const double fu = u - static_cast<double>(c0);
  const double fv = v - static_cast<double>(r0);
  const double weights[4] = {(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv};
  const double vals[4] = {grid.at(c0, r0), grid.at(c0 + 1, r0), grid.at(c0, r0 + 1), grid.at(c0 + 1, r0 + 1)};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (weights[i] == 0.0) continue;
    if (grid.is_nodata(vals[i])) throw Error(ErrorKind::nodata, "nodata pixel in bilinear neighbourhood");
    acc += weights[i] * vals[i];
  }
  return acc;
}

}  // namespace

double sample_bilinear(const Grid& grid, double x, double y) {
  const auto p = grid.transform().world_to_pixel(x, y);
  double u = p.col - 0.5;
  double v = p.row - 0.5;
  const double umax = static_cast<double>(grid.width() - 1);
  const double vmax = static_cast<double>(grid.height() - 1);
  if (!(u >= -kHullEps && u <= umax + kHullEps && v >= -kHullEps && v <= vmax + kHullEps)) {
    throw Error(ErrorKind::out_of_bounds, "point (" + format_sig(x) + ", " + format_sig(y) +
                                              ") lies outside the pixel-centre hull");
  }
  u = std::clamp(u, 0.0, umax);
  v = std::clamp(v, 0.0, vmax);
  return bilinear_at(grid, u, v);
}

Grid extract_patch(const Grid& grid, double center_x, double center_y, double side, std::size_t out_px) {
  if (!(side > 0) || out_px < 2) throw Error(ErrorKind::structural, "patch needs side > 0 and at least 2 pixels");
  const Box square = Box::centered(center_x, center_y, side);
  const Box ext = grid.extent();
  const double tol = kHullEps * grid.transform().pixel_size;
  if (square.min_x < ext.min_x - tol || square.max_x > ext.max_x + tol || square.min_y < ext.min_y - tol ||
      square.max_y > ext.max_y + tol) {
    throw Error(ErrorKind::out_of_bounds, "patch square around (" + format_sig(center_x) + ", " +
                                              format_sig(center_y) + ") exceeds raster bounds");
  }
  const double pitch = side / static_cast<double>(out_px);
  const GeoTransform out_t{square.min_x, square.max_y, pitch};
  const double umax = static_cast<double>(grid.width() - 1);
  const double vmax = static_cast<double>(grid.height() - 1);
  std::vector<double> values(out_px * out_px);
  for (std::size_t r = 0; r < out_px; ++r) {
    for (std::size_t c = 0; c < out_px; ++c) {
      const auto w = out_t.pixel_center(c, r);
      const auto p = grid.transform().world_to_pixel(w.x, w.y);
      values[r * out_px + c] = bilinear_at(grid, std::clamp(p.col - 0.5, 0.0, umax), std::clamp(p.row - 0.5, 0.0, vmax));
    }
  }
  return Grid(out_px, out_px, std::move(values), out_t);
}

}  // namespace wsekit
