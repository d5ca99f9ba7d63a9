#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pelletseg/analysis.hpp"
#include "pelletseg/dataset.hpp"
#include "pelletseg/geometry.hpp"
#include "pelletseg/metrics.hpp"
#include "pelletseg/postproc.hpp"
#include "pelletseg/targets.hpp"

namespace py = pybind11;
using namespace pelletseg;

namespace {

template <typename T>
using CArray = py::array_t<T, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) numpy array -> Grid.
template <typename T>
Grid<T> to_grid(const CArray<T>& a, const char* name) {
  if (a.ndim() != 2 && a.ndim() != 3) {
    throw ShapeError(std::string(name) + ": expected a 2-D or 3-D array, got " + std::to_string(a.ndim()) + "-D");
  }
  const int channels = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  Grid<T> g(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), channels);
  std::copy(a.data(), a.data() + a.size(), g.data().begin());
  return g;
}

template <typename T>
py::array_t<T> from_grid(const Grid<T>& g, bool squeeze = true) {
  std::vector<py::ssize_t> shape = {g.rows(), g.cols()};
  if (!squeeze || g.channels() != 1) shape.push_back(g.channels());
  py::array_t<T> a(shape);
  std::copy(g.data().begin(), g.data().end(), a.mutable_data());
  return a;
}

PixelMask mask_from_array(const CArray<std::uint8_t>& a) {
  if (a.ndim() != 2) throw ShapeError("mask: expected a 2-D array");
  std::vector<Pixel> pixels;
  const auto m = a.unchecked<2>();
  for (py::ssize_t r = 0; r < m.shape(0); ++r) {
    for (py::ssize_t c = 0; c < m.shape(1); ++c) {
      if (m(r, c)) pixels.push_back({static_cast<int>(r), static_cast<int>(c)});
    }
  }
  return PixelMask::from_pixels(pixels);
}

StarPolygon make_polygon(std::pair<int, int> center, std::vector<float> radii) {
  StarPolygon p;
  p.center = {center.first, center.second};
  p.radii = std::move(radii);
  return p;
}

py::dict match_to_dict(const MatchReport& r) {
  py::list pairs;
  for (const auto& p : r.pairs) pairs.append(py::make_tuple(p.pred, p.gt, p.iou));
  py::dict d;
  d["tp"] = r.tp;
  d["fp"] = r.fp;
  d["fn"] = r.fn;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["mean_iou"] = r.mean_iou;
  d["pairs"] = pairs;
  return d;
}

py::dict pixel_to_dict(const PixelMetrics& m) {
  py::list per_class;
  for (const auto& c : m.per_class) {
    py::dict e;
    e["precision"] = c.precision;
    e["recall"] = c.recall;
    e["f1"] = c.f1;
    e["support"] = c.support;
    per_class.append(e);
  }
  py::dict d;
  d["per_class"] = per_class;
  d["confusion"] = m.confusion;
  d["accuracy"] = m.accuracy;
  d["macro_precision"] = m.macro_precision;
  d["macro_recall"] = m.macro_recall;
  d["macro_f1"] = m.macro_f1;
  return d;
}

py::dict measurement_fields(const std::optional<Circle>& circle, const std::optional<double>& px,
                              const std::optional<double>& mm, std::size_t contour_points) {
  py::dict d;
  d["contour_points"] = contour_points;
  if (circle) {
    d["center"] = py::make_tuple(circle->center.row, circle->center.col);
    d["radius_px"] = circle->radius;
  } else {
    d["center"] = py::none();
    d["radius_px"] = py::none();
  }
  d["diameter_px"] = px ? py::object(py::float_(*px)) : py::object(py::none());
  d["diameter_mm"] = mm ? py::object(py::float_(*mm)) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_pelletseg, m) {
  m.doc() = "Star-convex pellet segmentation core";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidParameter>(m, "InvalidParameter", error.ptr());
  py::register_exception<EmptyInput>(m, "EmptyInput", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<CoverageError>(m, "CoverageError", error.ptr());

  m.def(
      "ray_directions",
      [](int n_rays) {
        const RayFan fan = ray_directions(n_rays);
        py::array_t<double> dirs({static_cast<py::ssize_t>(n_rays), py::ssize_t{2}});
        auto d = dirs.mutable_unchecked<2>();
        for (int i = 0; i < n_rays; ++i) {
          d(i, 0) = fan.dirs[i].row;
          d(i, 1) = fan.dirs[i].col;
        }
        return py::make_tuple(py::array_t<double>(fan.angles.size(), fan.angles.data()), dirs);
      },
      py::arg("n_rays"), "Angles and (row, col) unit directions of an evenly spaced ray fan.");

  m.def(
      "star_distances",
      [](const CArray<std::uint32_t>& labels, int n_rays) {
        return from_grid(star_distances(to_grid(labels, "labels"), ray_directions(n_rays)), false);
      },
      py::arg("labels"), py::arg("n_rays") = 32);

  m.def(
      "boundary_distance", [](const CArray<std::uint32_t>& labels) {
        return from_grid(boundary_distance(to_grid(labels, "labels")));
      },
      py::arg("labels"));

  m.def(
      "object_probability", [](const CArray<std::uint32_t>& labels) {
        return from_grid(object_probability(to_grid(labels, "labels")));
      },
      py::arg("labels"));

  m.def(
      "expand_labels",
      [](const CArray<std::uint32_t>& labels, double radius) {
        return from_grid(expand_labels(to_grid(labels, "labels"), radius));
      },
      py::arg("labels"), py::arg("radius") = kDefaultExpansionRadius);

  m.def(
      "one_hot_types",
      [](const CArray<std::uint8_t>& classes, int n_classes) {
        return from_grid(one_hot_types(to_grid(classes, "classes"), n_classes), false);
      },
      py::arg("classes"), py::arg("n_classes") = kNumClasses);

  m.def(
      "polygon_iou",
      [](std::pair<int, int> center_a, std::vector<float> radii_a, std::pair<int, int> center_b,
         std::vector<float> radii_b) {
        if (radii_a.size() != radii_b.size()) throw ShapeError("polygon_iou: ray counts differ");
        const RayFan fan = ray_directions(static_cast<int>(radii_a.size()));
        return polygon_iou(make_polygon(center_a, std::move(radii_a)), make_polygon(center_b, std::move(radii_b)),
                           fan);
      },
      py::arg("center_a"), py::arg("radii_a"), py::arg("center_b"), py::arg("radii_b"));

  m.def(
      "postprocess",
      [](const CArray<float>& prob, const CArray<float>& dist, const CArray<float>& type_scores,
         double prob_threshold, double nms_threshold, int stride) {
        PredictionMaps maps{to_grid(prob, "prob"), to_grid(dist, "dist"), to_grid(type_scores, "type_scores")};
        const RayFan fan = ray_directions(maps.n_rays());
        InstanceMap inst = [&] {
          py::gil_scoped_release release;
          return postprocess(maps, fan, {prob_threshold, nms_threshold, stride});
        }();
        py::list records;
        for (const auto& r : inst.records) {
          py::dict d;
          d["id"] = r.id;
          d["score"] = r.score;
          d["class"] = std::string(class_name(static_cast<PelletClass>(r.class_id)));
          records.append(d);
        }
        return py::make_tuple(from_grid(inst.labels), records);
      },
      py::arg("prob"), py::arg("dist"), py::arg("type_scores"), py::arg("prob_threshold") = kDefaultProbThreshold,
      py::arg("nms_threshold") = kDefaultNmsThreshold, py::arg("stride") = 1,
      "Candidates, greedy star-polygon NMS and rendering. Returns (labels, records).");

  m.def(
      "min_enclosing_circle",
      [](const CArray<double>& points) {
        if (points.ndim() != 2 || points.shape(1) != 2) throw ShapeError("points: expected an (N, 2) array");
        std::vector<Point2> pts(points.shape(0));
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {points.data()[2 * i], points.data()[2 * i + 1]};
        const Circle c = min_enclosing_circle(pts);
        return py::make_tuple(c.center.row, c.center.col, c.radius);
      },
      py::arg("points"), "Returns (center_row, center_col, radius).");

  m.def(
      "measure_instance",
      [](const CArray<std::uint8_t>& mask, double mm_per_px) {
        const Measurement ms = measure_instance(mask_from_array(mask), mm_per_px);
        return measurement_fields(ms.circle, ms.diameter_px, ms.diameter_mm, ms.contour.size());
      },
      py::arg("mask"), py::arg("mm_per_px"));

  m.def(
      "analyze_instances",
      [](const CArray<std::uint32_t>& labels, const CArray<float>& type_scores, double mm_per_px) {
        const auto instances = analyze_instances(to_grid(labels, "labels"), to_grid(type_scores, "type_scores"),
                                                 mm_per_px);
        py::list out;
        for (const auto& inst : instances) {
          py::dict d = measurement_fields(inst.circle, inst.diameter_px, inst.diameter_mm, inst.contour.size());
          d["id"] = inst.id;
          d["class"] = std::string(class_name(inst.cls));
          d["color"] = std::string(class_color(inst.cls));
          out.append(d);
        }
        return out;
      },
      py::arg("labels"), py::arg("type_scores"), py::arg("mm_per_px"));

  m.def(
      "match_instances",
      [](const CArray<std::uint32_t>& pred, const CArray<std::uint32_t>& gt, double tau) {
        return match_to_dict(match_instances(to_grid(pred, "pred"), to_grid(gt, "gt"), {tau}));
      },
      py::arg("pred"), py::arg("gt"), py::arg("tau") = 0.5);

  m.def(
      "pixel_metrics",
      [](const CArray<std::uint8_t>& pred, const CArray<std::uint8_t>& gt, int n_classes) {
        return pixel_to_dict(pixel_metrics(to_grid(pred, "pred"), to_grid(gt, "gt"), n_classes));
      },
      py::arg("pred"), py::arg("gt"), py::arg("n_classes") = kNumClasses);

  m.def(
      "combined_loss",
      [](double dist, double type, double stardist, double w_dist, double w_type, double w_stardist) {
        return combined_loss(dist, type, stardist, {w_dist, w_type, w_stardist});
      },
      py::arg("dist_loss"), py::arg("type_loss"), py::arg("stardist_loss"), py::arg("w_dist") = 1.0,
      py::arg("w_type") = 1.0, py::arg("w_stardist") = 0.5);

  m.def(
      "wasserstein2_1d", [](std::vector<double> a, std::vector<double> b) { return wasserstein2_1d(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "split_dataset",
      [](std::vector<std::string> ids, const CArray<double>& fractions, double test_fraction, int restarts,
         std::uint64_t seed) {
        if (fractions.ndim() != 2 || fractions.shape(1) != kNumClasses ||
            static_cast<std::size_t>(fractions.shape(0)) != ids.size()) {
          throw ShapeError("fractions: expected an (N, 5) array matching ids");
        }
        std::vector<ImageStats> stats(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) {
          stats[i].id = ids[i];
          for (int k = 0; k < kNumClasses; ++k) stats[i].fractions[k] = fractions.data()[i * kNumClasses + k];
        }
        const SplitAssignment s = split_dataset(stats, test_fraction, restarts, seed);
        py::dict d;
        d["train"] = s.train;
        d["test"] = s.test;
        d["objective"] = s.objective;
        d["class_distance"] = std::vector<double>(s.class_distance.begin() + 1, s.class_distance.end());
        return d;
      },
      py::arg("ids"), py::arg("fractions"), py::arg("test_fraction") = 0.2, py::arg("restarts") = 16,
      py::arg("seed") = 0);

  m.def(
      "srgb_to_lab",
      [](std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        const Lab lab = srgb_to_lab(r, g, b);
        return py::make_tuple(lab.l, lab.a, lab.b);
      },
      py::arg("r"), py::arg("g"), py::arg("b"));

  m.def(
      "luminance_stats",
      [](const CArray<std::uint8_t>& rgb) {
        const LuminanceStats s = luminance_stats(to_grid(rgb, "rgb"));
        return py::make_tuple(s.ref_mean, s.ref_std);
      },
      py::arg("rgb"), "Returns (mean, std) of CIELAB L.");

  m.def(
      "normalize_luminance",
      [](const CArray<std::uint8_t>& rgb, double ref_mean, double ref_std) {
        return from_grid(normalize_luminance(to_grid(rgb, "rgb"), {ref_mean, ref_std}), false);
      },
      py::arg("rgb"), py::arg("ref_mean"), py::arg("ref_std"));

  m.def(
      "synth_scene",
      [](std::uint64_t seed, int rows, int cols, int n_objects, double radius_min, double radius_max, int min_gap) {
        SynthParams p;
        p.rows = rows;
        p.cols = cols;
        p.n_objects = n_objects;
        p.radius_min = radius_min;
        p.radius_max = radius_max;
        p.min_gap = min_gap;
        const SynthScene s = synth_scene(seed, p);
        py::dict d;
        d["labels"] = from_grid(s.labels);
        d["classes"] = from_grid(s.classes);
        d["rgb"] = from_grid(s.rgb, false);
        d["placed"] = s.placed;
        d["incomplete"] = s.incomplete;
        return d;
      },
      py::arg("seed"), py::arg("rows") = 512, py::arg("cols") = 512, py::arg("n_objects") = 20,
      py::arg("radius_min") = 12.0, py::arg("radius_max") = 24.0, py::arg("min_gap") = 3);
}
