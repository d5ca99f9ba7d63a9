#include "pelletseg/labels.hpp"

#include <algorithm>

namespace pelletseg {

std::map<Label, InstanceExtent> instance_extents(const LabelMap& labels) {
  std::map<Label, InstanceExtent> out;
  Label last = 0;
  InstanceExtent* cur = nullptr;
  for (int r = 0; r < labels.rows(); ++r) {
    for (int c = 0; c < labels.cols(); ++c) {
      const Label id = labels(r, c);
      if (id == 0) continue;
      if (cur == nullptr || id != last) {
        auto [it, inserted] = out.try_emplace(id, InstanceExtent{Box{r, c, r, c}, 0});
        cur = &it->second;
        last = id;
      }
      Box& b = cur->box;
      b.row0 = std::min(b.row0, r);
      b.row1 = std::max(b.row1, r);
      b.col0 = std::min(b.col0, c);
      b.col1 = std::max(b.col1, c);
      ++cur->area;
    }
  }
  return out;
}

std::map<Label, PixelMask> instance_masks(const LabelMap& labels) {
  std::map<Label, PixelMask> out;
  for (const auto& [id, ext] : instance_extents(labels)) {
    const Box& b = ext.box;
    PixelMask m(b.row0, b.col0, b.row1 - b.row0 + 1, b.col1 - b.col0 + 1);
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        if (labels(r, c) == id) m.set(r, c);
      }
    }
    out.emplace(id, std::move(m));
  }
  return out;
}

}  // namespace pelletseg
