#pragma once

#include <map>

#include "pelletseg/geometry.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

// Tight bounding box and pixel count of every nonzero id, ordered by id.
struct InstanceExtent {
  Box box;
  std::size_t area = 0;
};

std::map<Label, InstanceExtent> instance_extents(const LabelMap& labels);
std::map<Label, PixelMask> instance_masks(const LabelMap& labels);

}  // namespace pelletseg
