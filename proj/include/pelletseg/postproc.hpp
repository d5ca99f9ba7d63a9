#pragma once

#include <span>
#include <vector>

#include "pelletseg/geometry.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

inline constexpr double kDefaultProbThreshold = 0.5;
inline constexpr double kDefaultNmsThreshold = 0.3;
inline constexpr double kDefaultPyramidFloor = 0.01;

/// The three network heads: object probability (H, W), radial distances
/// (H, W, n_rays) and per-class scores (H, W, n_classes) with class 0 as
/// background.
struct PredictionMaps {
  ProbMap prob;
  DistanceMaps dist;
  Grid<float> type_scores;

  int rows() const { return prob.rows(); }
  int cols() const { return prob.cols(); }
  int n_rays() const { return dist.channels(); }
  int n_classes() const { return type_scores.channels(); }

  // Throws ShapeError when the maps disagree with each other or with `fan`.
  void validate(const RayFan& fan) const;
};

/// Candidates in descending score order, ties broken by row-major center.
struct CandidateSet {
  std::vector<StarPolygon> polygons;
};

CandidateSet extract_candidates(const PredictionMaps& maps, const RayFan& fan, double prob_threshold,
                                int stride = 1);

/// Greedy score-ordered suppression: a candidate survives iff its IoU with
/// every previously kept polygon is <= iou_threshold.
std::vector<StarPolygon> nms(const CandidateSet& candidates, const RayFan& fan, double iou_threshold);

struct InstanceRecord {
  Label id = 0;
  float score = 0.0F;
  int class_id = 0;
};

struct InstanceMap {
  LabelMap labels;
  std::vector<InstanceRecord> records;  // records[i].id == i + 1
};

InstanceMap render_instance_map(std::span<const StarPolygon> kept, const RayFan& fan, int rows, int cols);

struct PostprocessParams {
  double prob_threshold = kDefaultProbThreshold;
  double nms_threshold = kDefaultNmsThreshold;
  int stride = 1;
};

InstanceMap postprocess(const PredictionMaps& maps, const RayFan& fan, const PostprocessParams& params = {});

/// Separable tent weights peaking at the tile center, clamped below by `floor`.
Grid<double> pyramid_weight_map(int tile_h, int tile_w, double floor);

struct TileLayout {
  int tile_h = 0;
  int tile_w = 0;
  int stride = 0;
  double weight_floor = kDefaultPyramidFloor;
  std::vector<Pixel> offsets;
};

/// Row-major tile offsets at `stride`, with a final tile flush against each
/// image edge. Tiles larger than the image are clipped to it.
TileLayout make_tile_layout(int rows, int cols, int tile_h, int tile_w, int stride,
                            double weight_floor = kDefaultPyramidFloor);

struct Tile {
  Pixel offset;
  PredictionMaps maps;
};

PredictionMaps crop_maps(const PredictionMaps& maps, Pixel offset, int tile_h, int tile_w);

/// Weighted average of overlapping tiles using pyramid weights. Pixels covered
/// by a single tile take that tile's value unchanged.
PredictionMaps blend_tiles(std::span<const Tile> tiles, const TileLayout& layout, int rows, int cols);

}  // namespace pelletseg
