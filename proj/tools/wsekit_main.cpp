// wsekit: water surface elevation from UAV photogrammetry.
//
//   wsekit water-edge      --dsm D.asc --edge E.csv [--truth F.json] --out DIR
//   wsekit ground-truth    --points P.csv [--centerline C.csv] --out F.json
//   wsekit extract-dataset --dsm D.asc --ortho O.pgm --centerline C.csv --squares S.csv
//                          --truth-points P.csv --subset-id ID --out DIR
//   wsekit evaluate        --preds P.csv --truth DIR --out DIR
//   wsekit kfold-plan      --manifest M.json --out PLAN.json
//
// Exit codes: 0 success, 1 runtime/data error, 2 usage/config error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wsekit/config.hpp"
#include "wsekit/csv.hpp"
#include "wsekit/dataset.hpp"
#include "wsekit/error.hpp"
#include "wsekit/linear_ref.hpp"
#include "wsekit/numfmt.hpp"
#include "wsekit/pipeline.hpp"
#include "wsekit/raster.hpp"
#include "wsekit/serialize.hpp"
#include "wsekit/svg.hpp"
#include "wsekit/version.hpp"

namespace fs = std::filesystem;
using namespace wsekit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

RunConfig load_config(const std::string& path) { return path.empty() ? RunConfig{} : RunConfig::load(path); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
}

// Truth points as (chainage, wse). Accepts `chainage_m,wse_m`, or `x,y,wse_m`
// projected onto the centreline.
std::vector<Point2> load_truth_points(const fs::path& path, const Polyline* centerline) {
  const auto table = CsvTable::read(path);
  const auto c_wse = table.column("wse_m");
  std::vector<Point2> pts;
  pts.reserve(table.size());
  if (const auto c_ch = table.find_column("chainage_m")) {
    for (std::size_t r = 0; r < table.size(); ++r) pts.push_back({table.number(r, *c_ch), table.number(r, c_wse)});
    return pts;
  }
  const auto cx = table.column("x");
  const auto cy = table.column("y");
  if (!centerline) {
    throw Error(ErrorKind::usage, path.string() + ": x,y truth points need --centerline to assign chainage");
  }
  for (std::size_t r = 0; r < table.size(); ++r) {
    pts.push_back({centerline->project_chainage(table.number(r, cx), table.number(r, cy)), table.number(r, c_wse)});
  }
  return pts;
}

ChartSeries make_series(std::string label, std::string color, ChartSeries::Style style) {
  ChartSeries s;
  s.label = std::move(label);
  s.color = std::move(color);
  s.style = style;
  return s;
}

// ---------------------------------------------------------------------------

struct WaterEdgeArgs {
  std::string dsm, edge, truth, centerline, config, subset_id = "subset", out;
};

int run_water_edge(const WaterEdgeArgs& a) {
  const auto cfg = load_config(a.config);
  const auto dsm = load_dsm_ascii(a.dsm);
  const auto edge = load_polyline_csv(a.edge);
  std::optional<Polyline> centerline;
  if (!a.centerline.empty()) centerline = load_polyline_csv(a.centerline);

  WaterEdgeOptions opts;
  opts.filter = cfg.filter;
  opts.step = cfg.sample_step_m;
  opts.sd_window = cfg.edge_sd_window;
  opts.sd_basis = cfg.sd_basis;
  const auto result = water_edge_workflow(dsm, edge, opts);

  const fs::path out = a.out;
  ensure_dir(out);
  write_series_csv(out / "kept.csv", result.split.kept);
  write_series_csv(out / "removed.csv", result.split.removed);

  std::vector<Point2> kept_pts;
  for (const auto& p : result.split.kept) kept_pts.push_back({p.chainage, p.value});
  std::optional<double> s_e;
  if (kept_pts.size() > 2) s_e = std_error_estimate(kept_pts, result.fit);
  write_json(out / "fit.json",
             fit_to_json(result.fit, {result.split.kept[0].chainage, result.split.kept.points().back().chainage}, s_e));
  write_band_csv(out / "band.csv", result.band);

  Chart chart;
  chart.title = "Water-edge DSM profile before and after FBEWMA filtering";
  auto raw = make_series("removed", "#d62728", ChartSeries::Style::markers);
  for (const auto& p : result.split.removed) {
    raw.x.push_back(p.chainage);
    raw.y.push_back(p.value);
  }
  auto kept = make_series("kept", "#1f77b4", ChartSeries::Style::markers);
  auto line = make_series("linear regression", "#000000", ChartSeries::Style::dashed);
  auto band = make_series("FBEWMSD band", "#ff7f0e", ChartSeries::Style::band);
  for (const auto& b : result.band.points) {
    band.x.push_back(b.chainage);
    band.y.push_back(b.center - b.half_width);
    band.y_upper.push_back(b.center + b.half_width);
  }
  for (const auto& p : result.split.kept) {
    kept.x.push_back(p.chainage);
    kept.y.push_back(p.value);
    line.x.push_back(p.chainage);
    line.y.push_back(result.fit(p.chainage));
  }
  chart.series = {std::move(band), std::move(raw), std::move(kept), std::move(line)};
  write_text_file(out / "water_edge.svg", render_svg(chart));

  if (!a.truth.empty()) {
    const auto truth = load_fit_json(a.truth);
    const auto report =
        evaluate_water_edge(result, truth, centerline ? &*centerline : nullptr, a.subset_id, cfg.uce_bins);
    write_json(out / "report.json", report_to_json(report));
  }
  std::cout << "samples " << result.samples.size() << ", kept " << result.split.kept.size() << ", removed "
            << result.split.removed.size() << ", nodata " << result.nodata_dropped << "\n"
            << "slope " << format_sig(result.fit.slope) << " m/m, intercept " << format_sig(result.fit.intercept)
            << " m\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GroundTruthArgs {
  std::string points, centerline, config, out;
};

int run_ground_truth(const GroundTruthArgs& a) {
  const auto cfg = load_config(a.config);
  std::optional<Polyline> centerline;
  if (!a.centerline.empty()) centerline = load_polyline_csv(a.centerline);
  const auto pts = load_truth_points(a.points, centerline ? &*centerline : nullptr);
  const auto gt = ground_truth_build(pts, cfg.gt_degree, cfg.breakpoints);
  const fs::path out = a.out;
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  write_json(out, fit_to_json(gt.fit, gt.std_error));
  std::cout << "points " << pts.size() << ", S_e " << format_sig(gt.std_error) << " m\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string dsm, ortho, ortho_world, centerline, squares, truth_points, subset_id, config, out;
};

int run_extract_dataset(const ExtractArgs& a) {
  const auto cfg = load_config(a.config);
  const auto dsm = load_dsm_ascii(a.dsm);
  fs::path world = a.ortho_world;
  if (world.empty()) world = fs::path(a.ortho).replace_extension(".pgw");
  const auto ortho = load_ortho_pgm(a.ortho, world);
  const auto centerline = load_polyline_csv(a.centerline);
  const auto truth_pts = load_truth_points(a.truth_points, &centerline);
  const auto gt = ground_truth_build(truth_pts, cfg.gt_degree, cfg.breakpoints);

  // a blank squares file means no samples rather than a malformed table
  const auto squares_text = read_text_file(a.squares);
  const auto squares =
      CsvTable::parse(trim(squares_text).empty() ? std::string("center_x,center_y\n") : squares_text, a.squares);
  const auto c_x = squares.column("center_x");
  const auto c_y = squares.column("center_y");
  const auto c_id = squares.find_column("sample_id");
  const auto c_lat = squares.find_column("centroid_lat");
  const auto c_lon = squares.find_column("centroid_lon");

  const fs::path out = a.out;
  ensure_dir(out);
  write_json(out / (a.subset_id + "_truth_fit.json"), fit_to_json(gt.fit, gt.std_error));

  std::vector<std::string> written;
  std::size_t filtered = 0;
  std::size_t skipped = 0;
  for (std::size_t r = 0; r < squares.size(); ++r) {
    std::string id;
    if (c_id) {
      id = squares.text(r, *c_id);
    } else {
      const auto n = std::to_string(r);
      id = a.subset_id + "_" + std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n;
    }
    try {
      const double cx = squares.number(r, c_x);
      const double cy = squares.number(r, c_y);
      const auto dsm_patch = extract_patch(dsm, cx, cy, cfg.patch_side_m, kPatchPx);
      const auto ortho_patch = extract_patch(ortho, cx, cy, cfg.patch_side_m, kPatchPx);
      std::vector<float> dsm_vals(dsm_patch.values().begin(), dsm_patch.values().end());
      std::vector<unsigned char> ortho_vals;
      ortho_vals.reserve(kPatchPixels);
      for (double v : ortho_patch.values()) {
        ortho_vals.push_back(static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)));
      }
      const double wse = assign_truth(gt.fit, centerline, Box::centered(cx, cy, cfg.patch_side_m), cfg.truth_step_m);
      std::optional<double> lat;
      std::optional<double> lon;
      if (c_lat) lat = squares.number(r, *c_lat);
      if (c_lon) lon = squares.number(r, *c_lon);
      auto sample = make_sample(std::move(ortho_vals), std::move(dsm_vals), wse, centerline.project_chainage(cx, cy),
                                a.subset_id, lat, lon);
      if (!range_filter(sample, cfg.range_threshold_m)) {
        std::cerr << "filtered " << id << ": DSM range " << format_sig(sample.stats.max - sample.stats.min)
                  << " m >= " << format_sig(cfg.range_threshold_m) << " m\n";
        ++filtered;
        continue;
      }
      write_sample(sample, out / id);
      written.push_back(id);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io) throw;
      std::cerr << "skipped " << id << ": " << e.what() << "\n";
      ++skipped;
    }
  }

  Manifest manifest;
  const auto manifest_path = out / "manifest.json";
  if (fs::exists(manifest_path)) manifest = read_manifest(manifest_path);
  for (const auto& id : written) {
    if (std::find(manifest.samples.begin(), manifest.samples.end(), id) == manifest.samples.end()) {
      manifest.samples.push_back(id);
    }
  }
  if (std::find(manifest.subsets.begin(), manifest.subsets.end(), a.subset_id) == manifest.subsets.end()) {
    manifest.subsets.push_back(a.subset_id);
  }
  write_manifest(manifest_path, manifest);
  std::cout << "written " << written.size() << ", filtered " << filtered << ", skipped " << skipped
            << ", ground-truth S_e " << format_sig(gt.std_error) << " m\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string preds, truth, config, out;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto cfg = load_config(a.config);
  const auto rows = load_predictions_csv(a.preds);
  std::map<std::string, PiecewisePolyFit> truth;
  for (const auto& r : rows) {
    if (truth.count(r.subset_id)) continue;
    auto path = fs::path(a.truth) / (r.subset_id + ".json");
    if (!fs::exists(path)) path = fs::path(a.truth) / (r.subset_id + "_truth_fit.json");
    if (!fs::exists(path)) {
      throw Error(ErrorKind::config, "predictions reference unknown subset '" + r.subset_id + "' (no " +
                                         r.subset_id + ".json in " + a.truth + ")");
    }
    truth.emplace(r.subset_id, load_fit_json(path));
  }
  EvaluateOptions opts;
  opts.sd_window = cfg.prediction_sd_window;
  opts.uce_bins = cfg.uce_bins;
  opts.sd_basis = cfg.sd_basis;
  opts.ewma_mode = cfg.filter.ewma_mode;
  const auto evals = evaluate_predictions(rows, truth, opts);

  const fs::path out = a.out;
  ensure_dir(out);
  std::vector<SubsetReport> reports;
  for (const auto& ev : evals) {
    reports.push_back(ev.report);
    const auto& id = ev.report.subset_id;
    write_band_csv(out / (id + "_band.csv"), ev.band);

    const auto& fit_truth = truth.at(id);
    const double lo = ev.rows.front().chainage;
    const double hi = ev.rows.back().chainage;
    auto truth_line = make_series("ground truth", "#000000", ChartSeries::Style::line);
    for (int i = 0; i <= 200; ++i) {
      const double c = lo + (hi - lo) * i / 200.0;
      truth_line.x.push_back(c);
      truth_line.y.push_back(fit_truth(c));
    }
    auto points = make_series("predictions", "#1f77b4", ChartSeries::Style::crosses);
    auto regression = make_series("regression", "#1f77b4", ChartSeries::Style::dashed);
    for (const auto& r : ev.rows) {
      points.x.push_back(r.chainage);
      points.y.push_back(r.wse_pred);
      regression.x.push_back(r.chainage);
      regression.y.push_back(ev.report.fit(r.chainage));
    }
    Chart profile;
    profile.title = id + ": predictions vs ground truth";
    profile.series = {truth_line, points, regression};
    write_text_file(out / (id + "_profile.svg"), render_svg(profile));

    auto band = make_series("FBEWMSD band", "#ff7f0e", ChartSeries::Style::band);
    for (const auto& b : ev.band.points) {
      band.x.push_back(b.chainage);
      band.y.push_back(b.center - b.half_width);
      band.y_upper.push_back(b.center + b.half_width);
    }
    Chart band_chart;
    band_chart.title = id + ": uncertainty band";
    band_chart.series = {std::move(band), std::move(truth_line), std::move(regression), std::move(points)};
    write_text_file(out / (id + "_band.svg"), render_svg(band_chart));

    std::cout << id << ": n " << ev.report.n << ", RMSE points " << format_sig(ev.report.rmse_points_m)
              << " m, RMSE regression " << format_sig(ev.report.rmse_regression_m) << " m, mean uncertainty "
              << format_sig(ev.report.mean_uncertainty_m) << " m, UCE " << format_sig(ev.report.uce_native)
              << " m^2\n";
  }
  write_json(out / "report.json", reports_to_json(reports));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct KfoldArgs {
  std::string manifest, out;
};

int run_kfold_plan(const KfoldArgs& a) {
  const auto manifest = read_manifest(a.manifest);
  const auto plan = kfold_plan(manifest.subsets);
  const fs::path out = a.out;
  if (out.has_parent_path()) ensure_dir(out.parent_path());
  write_json(out, fold_plan_to_json(plan));
  std::cout << plan.folds.size() << " folds\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Water surface elevation from UAV photogrammetric DSMs and orthophotos", "wsekit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  WaterEdgeArgs we;
  auto* cmd_we = app.add_subcommand("water-edge", "FBEWMA-filtered water-edge WSE estimate");
  cmd_we->add_option("--dsm", we.dsm, "DSM as ESRI ASCII grid")->required()->check(CLI::ExistingFile);
  cmd_we->add_option("--edge", we.edge, "water-edge polyline CSV (x,y)")->required()->check(CLI::ExistingFile);
  cmd_we->add_option("--truth", we.truth, "ground-truth fit JSON for scoring")->check(CLI::ExistingFile);
  cmd_we->add_option("--centerline", we.centerline, "centreline CSV; maps samples to truth chainage")
      ->check(CLI::ExistingFile);
  cmd_we->add_option("--subset-id", we.subset_id, "subset id used in the report");
  cmd_we->add_option("--config", we.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd_we->add_option("--out", we.out, "output directory")->required();

  GroundTruthArgs gt;
  auto* cmd_gt = app.add_subcommand("ground-truth", "polynomial ground-truth regression of surveyed WSE points");
  cmd_gt->add_option("--points", gt.points, "CSV with chainage_m,wse_m or x,y,wse_m")->required()->check(CLI::ExistingFile);
  cmd_gt->add_option("--centerline", gt.centerline, "centreline CSV for x,y points")->check(CLI::ExistingFile);
  cmd_gt->add_option("--config", gt.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd_gt->add_option("--out", gt.out, "output fit JSON")->required();

  ExtractArgs ex;
  auto* cmd_ex = app.add_subcommand("extract-dataset", "build machine-learning samples from rasters");
  cmd_ex->add_option("--dsm", ex.dsm, "DSM as ESRI ASCII grid")->required()->check(CLI::ExistingFile);
  cmd_ex->add_option("--ortho", ex.ortho, "orthophoto as P5 PGM")->required()->check(CLI::ExistingFile);
  cmd_ex->add_option("--ortho-world", ex.ortho_world, "world file (default: --ortho with .pgw)")
      ->check(CLI::ExistingFile);
  cmd_ex->add_option("--centerline", ex.centerline, "centreline CSV (x,y)")->required()->check(CLI::ExistingFile);
  cmd_ex->add_option("--squares", ex.squares, "CSV of sample centres (center_x,center_y[,sample_id,...])")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_ex->add_option("--truth-points", ex.truth_points, "surveyed WSE points CSV")->required()->check(CLI::ExistingFile);
  cmd_ex->add_option("--subset-id", ex.subset_id, "survey subset id")->required();
  cmd_ex->add_option("--config", ex.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd_ex->add_option("--out", ex.out, "dataset directory")->required();

  EvaluateArgs ev;
  auto* cmd_ev = app.add_subcommand("evaluate", "score model predictions per subset");
  cmd_ev->add_option("--preds", ev.preds, "predictions CSV")->required()->check(CLI::ExistingFile);
  cmd_ev->add_option("--truth", ev.truth, "directory of <subset_id>.json or <subset_id>_truth_fit.json fits")
      ->required()
      ->check(CLI::ExistingDirectory);
  cmd_ev->add_option("--config", ev.config, "run configuration JSON")->check(CLI::ExistingFile);
  cmd_ev->add_option("--out", ev.out, "output directory")->required();

  KfoldArgs kf;
  auto* cmd_kf = app.add_subcommand("kfold-plan", "leave-one-subset-out fold plan");
  cmd_kf->add_option("--manifest", kf.manifest, "dataset manifest.json")->required()->check(CLI::ExistingFile);
  cmd_kf->add_option("--out", kf.out, "output plan JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_we->parsed()) return run_water_edge(we);
    if (cmd_gt->parsed()) return run_ground_truth(gt);
    if (cmd_ex->parsed()) return run_extract_dataset(ex);
    if (cmd_ev->parsed()) return run_evaluate(ev);
    if (cmd_kf->parsed()) return run_kfold_plan(kf);
  } catch (const Error& e) {
    std::cerr << "wsekit: " << e.what() << "\n";
    return e.kind() == ErrorKind::config || e.kind() == ErrorKind::usage ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "wsekit: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
