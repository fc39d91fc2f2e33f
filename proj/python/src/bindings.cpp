#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

#include "wsekit/dataset.hpp"
#include "wsekit/error.hpp"
#include "wsekit/linear_ref.hpp"
#include "wsekit/metrics.hpp"
#include "wsekit/pipeline.hpp"
#include "wsekit/raster.hpp"
#include "wsekit/regress.hpp"
#include "wsekit/serialize.hpp"
#include "wsekit/smoothing.hpp"
#include "wsekit/version.hpp"

namespace py = pybind11;
using namespace wsekit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<unsigned char, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DoubleArray& a) {
  if (a.ndim() != 1) throw Error(ErrorKind::structural, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> to_square(const std::vector<T>& v, std::size_t n) {
  py::array_t<T> out({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

template <typename T, typename Array>
std::vector<T> patch_values(const Array& a, const char* what) {
  if (a.ndim() != 2 || a.shape(0) != static_cast<py::ssize_t>(kPatchPx) || a.shape(1) != static_cast<py::ssize_t>(kPatchPx)) {
    throw Error(ErrorKind::structural, std::string(what) + " must be a 256x256 array");
  }
  return {a.data(), a.data() + a.size()};
}

ChainageSeries make_series(const DoubleArray& chainage, const DoubleArray& values) {
  const auto c = to_vector(chainage);
  const auto v = to_vector(values);
  if (c.size() != v.size()) throw Error(ErrorKind::structural, "chainage and values differ in length");
  std::vector<SeriesPoint> pts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) pts[i] = {c[i], v[i]};
  return ChainageSeries(std::move(pts));
}

std::vector<Point2> make_points(const DoubleArray& x, const DoubleArray& y) {
  const auto xs = to_vector(x);
  const auto ys = to_vector(y);
  if (xs.size() != ys.size()) throw Error(ErrorKind::structural, "x and y differ in length");
  std::vector<Point2> pts(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], ys[i]};
  return pts;
}

std::vector<EvalPair> make_pairs(const DoubleArray& truth, const DoubleArray& pred, std::optional<DoubleArray> sigma) {
  const auto t = to_vector(truth);
  const auto p = to_vector(pred);
  if (t.size() != p.size()) throw Error(ErrorKind::structural, "truth and pred differ in length");
  std::vector<double> s;
  if (sigma) {
    s = to_vector(*sigma);
    if (s.size() != t.size()) throw Error(ErrorKind::structural, "sigma differs in length");
  }
  std::vector<EvalPair> pairs(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    pairs[i] = {static_cast<double>(i), t[i], p[i], std::nullopt};
    if (sigma) pairs[i].uncertainty = s[i];
  }
  return pairs;
}

py::dict series_dict(const ChainageSeries& s) {
  py::dict d;
  d["chainage"] = to_array(s.chainages());
  d["value"] = to_array(s.values());
  return d;
}

py::dict band_dict(const UncertaintyBand& band) {
  std::vector<double> c, m, h;
  for (const auto& p : band.points) {
    c.push_back(p.chainage);
    m.push_back(p.center);
    h.push_back(p.half_width);
  }
  py::dict d;
  d["chainage"] = to_array(c);
  d["center"] = to_array(m);
  d["half_width"] = to_array(h);
  return d;
}

py::dict report_dict(const SubsetReport& r) {
  return py::module_::import("json").attr("loads")(report_to_json(r).dump());
}

Grid make_grid(const DoubleArray& values, double origin_x, double origin_y, double pixel_size,
               std::optional<double> nodata) {
  if (values.ndim() != 2) throw Error(ErrorKind::structural, "raster values must be 2-D");
  const auto h = static_cast<std::size_t>(values.shape(0));
  const auto w = static_cast<std::size_t>(values.shape(1));
  return Grid(w, h, std::vector<double>(values.data(), values.data() + values.size()),
              GeoTransform{origin_x, origin_y, pixel_size}, nodata);
}

}  // namespace

PYBIND11_MODULE(_wsekit, m) {
  m.doc() = "River water surface elevation toolkit";
  m.attr("__version__") = std::string(kVersion);

  static PyObject* error_type = nullptr;
  error_type = py::exception<Error>(m, "WsekitError", PyExc_RuntimeError).inc_ref().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // --- smoothing -----------------------------------------------------------
  py::enum_<EwmaMode>(m, "EwmaMode").value("adjusted", EwmaMode::adjusted).value("recursive", EwmaMode::recursive);
  py::enum_<Direction>(m, "Direction").value("forward", Direction::forward).value("backward", Direction::backward);
  py::enum_<RejectionMode>(m, "RejectionMode")
      .value("reevaluate", RejectionMode::reevaluate)
      .value("cumulative", RejectionMode::cumulative);

  m.def(
      "ewma",
      [](const DoubleArray& values, double span, Direction direction, EwmaMode mode) {
        const auto v = to_vector(values);
        if (v.empty()) throw Error(ErrorKind::empty_input, "ewma of an empty series");
        return to_array(ewma_values(v, EwmaSpec::from_span(span, mode), direction));
      },
      py::arg("values"), py::arg("span"), py::arg("direction") = Direction::forward, py::arg("mode") = EwmaMode::adjusted);
  m.def(
      "fbewma",
      [](const DoubleArray& values, double span, EwmaMode mode) {
        const auto v = to_vector(values);
        if (v.empty()) throw Error(ErrorKind::empty_input, "fbewma of an empty series");
        return to_array(fbewma_values(v, EwmaSpec::from_span(span, mode)));
      },
      py::arg("values"), py::arg("span"), py::arg("mode") = EwmaMode::adjusted);
  m.def(
      "fbewmsd",
      [](const DoubleArray& values, double window, EwmaMode mode) {
        return to_array(fbewmsd_values(to_vector(values), EwmaSpec::from_span(window, mode)));
      },
      py::arg("values"), py::arg("window"), py::arg("mode") = EwmaMode::adjusted);

  py::class_<FilterParams>(m, "FilterParams")
      .def(py::init<>())
      .def_readwrite("span", &FilterParams::span)
      .def_readwrite("max_dev", &FilterParams::max_dev)
      .def_readwrite("iterations", &FilterParams::iterations)
      .def_readwrite("ewma_mode", &FilterParams::ewma_mode)
      .def_readwrite("rejection", &FilterParams::rejection);

  m.def(
      "reject_outliers",
      [](const DoubleArray& chainage, const DoubleArray& values, const FilterParams& params) {
        const auto split = reject_outliers(make_series(chainage, values), params);
        py::dict d;
        d["kept"] = series_dict(split.kept);
        d["removed"] = series_dict(split.removed);
        d["kept_mask"] = to_array(std::vector<bool>(split.kept_mask.begin(), split.kept_mask.end()));
        d["passes"] = split.passes;
        return d;
      },
      py::arg("chainage"), py::arg("values"), py::arg("params") = FilterParams{});

  // --- regression ----------------------------------------------------------
  py::class_<LinearFit>(m, "LinearFit")
      .def(py::init([](double slope, double intercept, std::size_t n) { return LinearFit{slope, intercept, n}; }),
           py::arg("slope"), py::arg("intercept"), py::arg("n") = 2)
      .def_readonly("slope", &LinearFit::slope)
      .def_readonly("intercept", &LinearFit::intercept)
      .def_readonly("n", &LinearFit::n)
      .def("__call__", [](const LinearFit& f, const DoubleArray& x) {
        auto xs = to_vector(x);
        for (auto& v : xs) v = f(v);
        return to_array(xs);
      })
      .def("__repr__", [](const LinearFit& f) {
        return "LinearFit(slope=" + std::to_string(f.slope) + ", intercept=" + std::to_string(f.intercept) + ")";
      });

  py::class_<PiecewisePolyFit>(m, "PiecewisePolyFit")
      .def_property_readonly("degree", &PiecewisePolyFit::degree)
      .def_property_readonly("breakpoints",
                             [](const PiecewisePolyFit& f) {
                               return std::vector<double>(f.breakpoints().begin(), f.breakpoints().end());
                             })
      .def_property_readonly("n", &PiecewisePolyFit::n)
      .def("predict",
           [](const PiecewisePolyFit& f, double x) {
             const auto p = f.predict(x);
             return py::make_tuple(p.value, p.extrapolated);
           })
      .def("__call__",
           [](const PiecewisePolyFit& f, const DoubleArray& x) {
             auto xs = to_vector(x);
             for (auto& v : xs) v = f(v);
             return to_array(xs);
           })
      .def("to_json", [](const PiecewisePolyFit& f, std::optional<double> s_e) { return fit_to_json(f, s_e).dump(); },
           py::arg("s_e") = std::nullopt);

  m.def("ols_fit", [](const DoubleArray& x, const DoubleArray& y) { return ols_fit(make_points(x, y)); }, py::arg("x"),
        py::arg("y"));
  m.def(
      "poly_fit",
      [](const DoubleArray& x, const DoubleArray& y, std::size_t degree, std::vector<double> breakpoints) {
        return poly_fit(make_points(x, y), degree, breakpoints);
      },
      py::arg("x"), py::arg("y"), py::arg("degree"), py::arg("breakpoints") = std::vector<double>{});
  m.def("std_error_estimate", [](const DoubleArray& x, const DoubleArray& y, const LinearFit& f) {
    return std_error_estimate(make_points(x, y), f);
  });
  m.def("std_error_estimate", [](const DoubleArray& x, const DoubleArray& y, const PiecewisePolyFit& f) {
    return std_error_estimate(make_points(x, y), f);
  });
  m.def("load_fit_json", &load_fit_json, py::arg("path"));
  m.def("fit_from_json", [](const std::string& text) { return fit_from_json(Json::parse(text)); }, py::arg("text"));

  // --- metrics -------------------------------------------------------------
  m.def("rmse", [](const DoubleArray& truth, const DoubleArray& pred) { return rmse(make_pairs(truth, pred, {})); },
        py::arg("truth"), py::arg("pred"));
  m.def(
      "mean_uncertainty",
      [](const DoubleArray& sigma) {
        const auto s = to_vector(sigma);
        std::vector<EvalPair> pairs(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) pairs[i].uncertainty = s[i];
        return mean_uncertainty(pairs);
      },
      py::arg("sigma"));
  m.def(
      "uce",
      [](const DoubleArray& truth, const DoubleArray& pred, const DoubleArray& sigma, std::size_t n_bins) {
        return uce(make_pairs(truth, pred, sigma), n_bins);
      },
      py::arg("truth"), py::arg("pred"), py::arg("sigma"), py::arg("n_bins") = 10);
  m.attr("UCE_CM_SCALE") = kUceCmScale;

  // --- geometry and rasters ------------------------------------------------
  py::class_<Polyline>(m, "Polyline")
      .def(py::init([](const std::vector<std::pair<double, double>>& xy) {
             std::vector<Vertex> vs;
             for (const auto& [x, y] : xy) vs.push_back({x, y});
             return Polyline(std::move(vs));
           }),
           py::arg("vertices"))
      .def_property_readonly("length", &Polyline::length)
      .def("point_at",
           [](const Polyline& l, double c) {
             const auto p = l.point_at(c);
             return py::make_tuple(p.x, p.y);
           })
      .def(
          "densify",
          [](const Polyline& l, double step) {
            const auto pts = l.densify(step);
            py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
            auto r = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < pts.size(); ++i) {
              r(i, 0) = pts[i].chainage;
              r(i, 1) = pts[i].x;
              r(i, 2) = pts[i].y;
            }
            return out;
          },
          py::arg("step") = 0.1)
      .def("project_chainage", &Polyline::project_chainage, py::arg("x"), py::arg("y"))
      .def(
          "clip_chainage_range",
          [](const Polyline& l, double cx, double cy, double side) { return l.clip_chainage_range(Box::centered(cx, cy, side)); },
          py::arg("center_x"), py::arg("center_y"), py::arg("side") = 10.0);
  m.def("load_polyline_csv", &load_polyline_csv, py::arg("path"));

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("values"), py::arg("origin_x"), py::arg("origin_y"), py::arg("pixel_size"),
           py::arg("nodata") = std::nullopt)
      .def_property_readonly("width", &Grid::width)
      .def_property_readonly("height", &Grid::height)
      .def_property_readonly("nodata", &Grid::nodata)
      .def_property_readonly("values",
                             [](const Grid& g) {
                               py::array_t<double> out({static_cast<py::ssize_t>(g.height()), static_cast<py::ssize_t>(g.width())});
                               std::copy(g.values().begin(), g.values().end(), out.mutable_data());
                               return out;
                             })
      .def_property_readonly("transform", [](const Grid& g) {
        const auto& t = g.transform();
        return py::make_tuple(t.origin_x, t.origin_y, t.pixel_size);
      });
  m.def("load_dsm_ascii", &load_dsm_ascii, py::arg("path"));
  m.def("write_dsm_ascii", &write_dsm_ascii, py::arg("path"), py::arg("grid"));
  m.def("load_ortho_pgm", &load_ortho_pgm, py::arg("path"), py::arg("worldfile"));
  m.def("sample_bilinear", &sample_bilinear, py::arg("grid"), py::arg("x"), py::arg("y"));
  m.def(
      "extract_patch",
      [](const Grid& g, double cx, double cy, double side, std::size_t out_px) {
        const auto p = extract_patch(g, cx, cy, side, out_px);
        return to_square(std::vector<double>(p.values().begin(), p.values().end()), out_px);
      },
      py::arg("grid"), py::arg("center_x"), py::arg("center_y"), py::arg("side") = 10.0, py::arg("out_px") = kPatchPx);

  // --- dataset -------------------------------------------------------------
  py::class_<StandardizationParams>(m, "StandardizationParams")
      .def(py::init<>())
      .def_readwrite("sigma_dsm", &StandardizationParams::sigma_dsm)
      .def_readwrite("dsm_denominator_factor", &StandardizationParams::dsm_denominator_factor)
      .def_readwrite("mu_ort", &StandardizationParams::mu_ort)
      .def_readwrite("sigma_ort", &StandardizationParams::sigma_ort);

  py::class_<SampleRecord>(m, "SampleRecord")
      .def(py::init([](const ByteArray& ortho, const FloatArray& dsm, double wse, double chainage, std::string subset_id,
                       std::optional<double> lat, std::optional<double> lon) {
             return make_sample(patch_values<unsigned char>(ortho, "ortho"), patch_values<float>(dsm, "dsm"), wse,
                                chainage, std::move(subset_id), lat, lon);
           }),
           py::arg("ortho"), py::arg("dsm"), py::arg("wse"), py::arg("chainage"), py::arg("subset_id"),
           py::arg("centroid_lat") = std::nullopt, py::arg("centroid_lon") = std::nullopt)
      .def_property_readonly("ortho", [](const SampleRecord& s) { return to_square(s.ortho, kPatchPx); })
      .def_property_readonly("dsm", [](const SampleRecord& s) { return to_square(s.dsm, kPatchPx); })
      .def_readonly("wse", &SampleRecord::wse)
      .def_readonly("chainage", &SampleRecord::chainage)
      .def_readonly("subset_id", &SampleRecord::subset_id)
      .def_readonly("centroid_lat", &SampleRecord::centroid_lat)
      .def_readonly("centroid_lon", &SampleRecord::centroid_lon)
      .def_property_readonly("dsm_mean", [](const SampleRecord& s) { return s.stats.mean; })
      .def_property_readonly("dsm_std", [](const SampleRecord& s) { return s.stats.std; })
      .def_property_readonly("dsm_min", [](const SampleRecord& s) { return s.stats.min; })
      .def_property_readonly("dsm_max", [](const SampleRecord& s) { return s.stats.max; });

  m.def("write_sample", &write_sample, py::arg("sample"), py::arg("dir"));
  m.def("read_sample", &read_sample, py::arg("dir"));
  m.def(
      "standardize_dsm",
      [](const DoubleArray& dsm, const StandardizationParams& p) {
        const std::vector<double> v(dsm.data(), dsm.data() + dsm.size());
        py::array_t<double> out(std::vector<py::ssize_t>(dsm.shape(), dsm.shape() + dsm.ndim()));
        const auto s = standardize_dsm(std::span<const double>(v), p);
        std::copy(s.begin(), s.end(), out.mutable_data());
        return out;
      },
      py::arg("dsm"), py::arg("params") = StandardizationParams{});
  m.def(
      "destandardize_dsm",
      [](const DoubleArray& std_dsm, double mean, const StandardizationParams& p) {
        const std::vector<double> v(std_dsm.data(), std_dsm.data() + std_dsm.size());
        py::array_t<double> out(std::vector<py::ssize_t>(std_dsm.shape(), std_dsm.shape() + std_dsm.ndim()));
        const auto s = destandardize_dsm(v, mean, p);
        std::copy(s.begin(), s.end(), out.mutable_data());
        return out;
      },
      py::arg("std_dsm"), py::arg("original_mean"), py::arg("params") = StandardizationParams{});
  m.def(
      "standardize_ortho",
      [](const ByteArray& ortho, const StandardizationParams& p) {
        const std::vector<unsigned char> v(ortho.data(), ortho.data() + ortho.size());
        py::array_t<double> out(std::vector<py::ssize_t>(ortho.shape(), ortho.shape() + ortho.ndim()));
        const auto s = standardize_ortho(v, p);
        std::copy(s.begin(), s.end(), out.mutable_data());
        return out;
      },
      py::arg("ortho"), py::arg("params") = StandardizationParams{});
  m.def("range_filter", &range_filter, py::arg("sample"), py::arg("threshold") = 4.5);
  m.def("augment", &augment, py::arg("sample"), py::arg("dedupe") = false);
  m.def("compute_global_sigma", [](const std::vector<SampleRecord>& s) { return compute_global_sigma(s); },
        py::arg("samples"));

  py::class_<Manifest>(m, "Manifest")
      .def(py::init([](std::vector<std::string> samples, std::vector<std::string> subsets) {
             return Manifest{std::move(samples), std::move(subsets)};
           }),
           py::arg("samples"), py::arg("subsets"))
      .def_readwrite("samples", &Manifest::samples)
      .def_readwrite("subsets", &Manifest::subsets);
  m.def("read_manifest", &read_manifest, py::arg("path"));
  m.def("write_manifest", &write_manifest, py::arg("path"), py::arg("manifest"));

  // --- pipeline ------------------------------------------------------------
  m.def(
      "ground_truth_build",
      [](const DoubleArray& chainage, const DoubleArray& wse, std::size_t degree, std::vector<double> breakpoints) {
        auto gt = ground_truth_build(make_points(chainage, wse), degree, breakpoints);
        return py::make_tuple(std::move(gt.fit), gt.std_error);
      },
      py::arg("chainage"), py::arg("wse"), py::arg("degree") = 3, py::arg("breakpoints") = std::vector<double>{});
  m.def(
      "assign_truth",
      [](const PiecewisePolyFit& fit, const Polyline& centerline, double cx, double cy, double side, double step) {
        return assign_truth(fit, centerline, Box::centered(cx, cy, side), step);
      },
      py::arg("fit"), py::arg("centerline"), py::arg("center_x"), py::arg("center_y"), py::arg("side") = 10.0,
      py::arg("step") = 0.1);
  m.def(
      "water_edge_workflow",
      [](const Grid& dsm, const Polyline& edge, const FilterParams& filter, double step, std::size_t sd_window) {
        WaterEdgeOptions opts;
        opts.filter = filter;
        opts.step = step;
        opts.sd_window = sd_window;
        const auto r = water_edge_workflow(dsm, edge, opts);
        py::dict d;
        d["kept"] = series_dict(r.split.kept);
        d["removed"] = series_dict(r.split.removed);
        d["fit"] = r.fit;
        d["band"] = band_dict(r.band);
        d["nodata_dropped"] = r.nodata_dropped;
        return d;
      },
      py::arg("dsm"), py::arg("edge"), py::arg("filter") = FilterParams{}, py::arg("step") = 0.1,
      py::arg("sd_window") = 300);

  py::class_<PredictionRow>(m, "PredictionRow")
      .def(py::init([](std::string subset_id, std::string sample_id, double chainage, double wse_pred,
                       std::optional<double> uncertainty) {
             return PredictionRow{std::move(subset_id), std::move(sample_id), chainage, wse_pred, uncertainty};
           }),
           py::arg("subset_id"), py::arg("sample_id"), py::arg("chainage"), py::arg("wse_pred"),
           py::arg("uncertainty") = std::nullopt)
      .def_readwrite("subset_id", &PredictionRow::subset_id)
      .def_readwrite("sample_id", &PredictionRow::sample_id)
      .def_readwrite("chainage", &PredictionRow::chainage)
      .def_readwrite("wse_pred", &PredictionRow::wse_pred)
      .def_readwrite("uncertainty", &PredictionRow::uncertainty);
  m.def("load_predictions_csv", &load_predictions_csv, py::arg("path"));
  m.def(
      "write_predictions_csv",
      [](const std::filesystem::path& path, const std::vector<PredictionRow>& rows) { write_predictions_csv(path, rows); },
      py::arg("path"), py::arg("rows"));
  m.def(
      "evaluate_predictions",
      [](const std::vector<PredictionRow>& rows, const std::map<std::string, PiecewisePolyFit>& truth,
         std::size_t sd_window, std::size_t uce_bins) {
        EvaluateOptions opts;
        opts.sd_window = sd_window;
        opts.uce_bins = uce_bins;
        py::list out;
        for (const auto& ev : evaluate_predictions(rows, truth, opts)) {
          auto d = report_dict(ev.report);
          d["band"] = band_dict(ev.band);
          out.append(d);
        }
        return out;
      },
      py::arg("rows"), py::arg("truth"), py::arg("sd_window") = 10, py::arg("uce_bins") = 10);
  m.def(
      "kfold_plan",
      [](const std::vector<std::string>& ids) {
        py::list out;
        for (const auto& f : kfold_plan(ids).folds) {
          py::dict d;
          d["validation_subset"] = f.validation_subset;
          d["training_subsets"] = f.training_subsets;
          out.append(d);
        }
        return out;
      },
      py::arg("subset_ids"));
}
