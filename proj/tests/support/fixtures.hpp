#pragma once

// Synthetic survey fixtures written to disk for the command-line tests.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wsekit/csv.hpp"
#include "wsekit/linear_ref.hpp"
#include "wsekit/raster.hpp"
#include "wsekit/serialize.hpp"

namespace wsekit::testing {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

/// Runs the CLI with `args`, capturing stdout and stderr through files in `scratch`.
inline CommandResult run_cli(const std::string& exe, const std::vector<std::string>& args, const fs::path& scratch) {
  std::string cmd = quote(exe);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto out_path = scratch / "cli_stdout.txt";
  const auto err_path = scratch / "cli_stderr.txt";
  cmd += " >" + quote(out_path.string()) + " 2>" + quote(err_path.string());
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

/// Water-edge fixture: a 0.5 m DSM sloping 0.001 m/m eastward, an edge line
/// along y = 10 from x = 5 to 705, and the matching ground-truth line.
/// Every fortieth column carries +1 m of vegetation.
struct WaterEdgeFixture {
  fs::path dsm;
  fs::path edge;
  fs::path truth;
  fs::path centerline;
};

inline WaterEdgeFixture write_water_edge_fixture(const fs::path& dir, bool vegetation = true) {
  fs::create_directories(dir);
  const std::size_t w = 1440;
  const std::size_t h = 40;
  const GeoTransform t{0.0, 20.0, 0.5};
  std::vector<double> v(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto p = t.pixel_center(c, r);
      v[r * w + c] = 100.0 + 0.001 * p.x + ((vegetation && c % 40 == 3) ? 1.0 : 0.0);
    }
  }
  WaterEdgeFixture f{dir / "dsm.asc", dir / "edge.csv", dir / "truth.json", dir / "centerline.csv"};
  write_dsm_ascii(f.dsm, Grid(w, h, std::move(v), t, -9999.0));
  write_text_file(f.edge, "x,y\n5,10.25\n705,10.25\n");
  write_text_file(f.centerline, "x,y\n0,12\n720,12\n");
  write_json(f.truth, fit_to_json(LinearFit{0.001, 100.0, 2}, {0.0, 720.0}, 0.01));
  return f;
}

/// Dataset fixture: 60 x 20 m at 0.25 m with a gentle floodplain, a river
/// centreline along y = 10 and a 5 m cliff inside the middle square.
struct DatasetFixture {
  fs::path dsm;
  fs::path ortho;
  fs::path centerline;
  fs::path squares;
  fs::path truth_points;
};

inline DatasetFixture write_dataset_fixture(const fs::path& dir, bool edge_square = false) {
  fs::create_directories(dir);
  const std::size_t w = 240;
  const std::size_t h = 80;
  const GeoTransform t{0.0, 20.0, 0.25};
  std::vector<double> z(w * h);
  std::vector<double> g(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const auto p = t.pixel_center(c, r);
      const bool cliff = p.x > 29.0 && p.x < 31.0 && p.y > 8.0 && p.y < 12.0;
      z[r * w + c] = 150.0 - 0.002 * p.x + 0.05 * std::abs(p.y - 10.0) + (cliff ? 5.0 : 0.0);
      g[r * w + c] = static_cast<double>((c * 3 + r * 5) % 256);
    }
  }
  DatasetFixture f{dir / "dsm.asc", dir / "ortho.pgm", dir / "centerline.csv", dir / "squares.csv",
                   dir / "truth_points.csv"};
  write_dsm_ascii(f.dsm, Grid(w, h, std::move(z), t));
  write_ortho_pgm(f.ortho, dir / "ortho.pgw", Grid(w, h, std::move(g), t));
  write_text_file(f.centerline, "x,y\n0,10\n60,10\n");
  std::string squares = "center_x,center_y,sample_id\n10,10,s_a\n30,10,s_cliff\n50,10,s_b\n";
  if (edge_square) squares += "57,10,s_edge\n";
  write_text_file(f.squares, squares);
  std::string pts = "chainage_m,wse_m\n";
  for (int i = 0; i <= 12; ++i) pts += std::to_string(i * 5) + "," + std::to_string(149.5 - 0.002 * i * 5) + "\n";
  write_text_file(f.truth_points, pts);
  return f;
}

}  // namespace wsekit::testing
