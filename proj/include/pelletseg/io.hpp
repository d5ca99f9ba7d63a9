#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pelletseg/grid.hpp"
#include "pelletseg/postproc.hpp"

namespace pelletseg::io {

namespace fs = std::filesystem;

// Label maps: 16-bit single-channel PNG, pixel value = instance id.
LabelMap read_label_map(const fs::path& path);
void write_label_map(const LabelMap& labels, const fs::path& path);

// Class maps share the 16-bit label container.
ClassMap read_class_map(const fs::path& path);
void write_class_map(const ClassMap& classes, const fs::path& path);

// 8-bit RGB PNG.
RgbImage read_rgb(const fs::path& path);
void write_rgb(const RgbImage& image, const fs::path& path);

// NPY v1.0, little-endian float32, C order.
struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

NpyArray read_npy(const fs::path& path);
void write_npy(const fs::path& path, const std::vector<std::size_t>& shape, std::span<const float> data);

/// A maps directory holds prob.npy (H,W), dist.npy (H,W,R), type.npy (H,W,C)
/// and a maps.txt sidecar recording R, C and the class-name order.
PredictionMaps read_maps(const fs::path& dir, std::optional<int> expected_rays = std::nullopt);
void write_maps(const PredictionMaps& maps, const fs::path& dir);

/// Writes to a temporary sibling then renames it into place.
void write_text_atomic(const fs::path& path, const std::string& text);

}  // namespace pelletseg::io
