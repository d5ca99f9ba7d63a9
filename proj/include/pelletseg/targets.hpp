#pragma once

#include "pelletseg/geometry.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

inline constexpr double kDefaultExpansionRadius = 2.0;

/// Per-pixel radial distances (H, W, n_rays). Each ray marches in 1 px steps
/// with nearest-pixel membership and records the last step still inside the
/// pixel's own instance. Background pixels are 0.
DistanceMaps star_distances(const LabelMap& labels, const RayFan& fan);

/// Exact Euclidean distance from each foreground pixel to the nearest pixel
/// carrying a different label. Positions just outside the image count as
/// boundary. Background pixels are 0.
Grid<double> boundary_distance(const LabelMap& labels);

/// boundary_distance normalized by its per-instance maximum.
ProbMap object_probability(const LabelMap& labels);

/// Grows labels into background up to `radius` without merging instances:
/// each background pixel within reach takes the label of its nearest labeled
/// pixel, equidistant ties going to the lower id.
LabelMap expand_labels(const LabelMap& labels, double radius);

/// One-hot type targets (H, W, n_classes) from a class map.
Grid<float> one_hot_types(const Grid<std::uint8_t>& classes, int n_classes);

}  // namespace pelletseg
