#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pelletseg/classes.hpp"
#include "pelletseg/metrics.hpp"

namespace pelletseg {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
  int n_rays = 32;
  double prob_threshold = 0.5;
  double nms_iou_threshold = 0.3;
  double match_tau = 0.5;
  std::optional<double> mm_per_px;
  double expansion_radius_px = 2.0;
  int candidate_stride = 1;
  int tile_h = 256;
  int tile_w = 256;
  int tile_stride = 192;
  double pyramid_floor = 0.01;
  LossWeights loss_weights;
  std::vector<double> bin_edges = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  std::vector<PelletClass> measured_classes = {PelletClass::Nice};
  double test_fraction = 0.2;
  int restarts = 16;
  std::optional<std::uint64_t> seed;

  // Throws InvalidParameter naming the offending key.
  void validate() const;
};

/// Sets one field from its flat-file key. Unknown keys and unparsable values throw.
void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text; blank lines and '#' comments are ignored.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical key=value rendering, one key per line in a fixed order.
std::string config_to_text(const PipelineConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace pelletseg
