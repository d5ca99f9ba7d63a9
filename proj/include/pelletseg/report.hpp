#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pelletseg/analysis.hpp"
#include "pelletseg/config.hpp"
#include "pelletseg/dataset.hpp"
#include "pelletseg/metrics.hpp"
#include "pelletseg/postproc.hpp"

namespace pelletseg {

struct Provenance {
  std::string config_hash;
  std::vector<std::string> inputs;
  std::string tool_version = kToolVersion;
};

Provenance make_provenance(const PipelineConfig& cfg, std::vector<std::string> inputs);

nlohmann::ordered_json to_json(const Provenance& p);
nlohmann::ordered_json to_json(const MatchReport& r);
nlohmann::ordered_json to_json(const PixelMetrics& m);
nlohmann::ordered_json to_json(const SizeReport& r);
nlohmann::ordered_json to_json(const SplitAssignment& s);
nlohmann::ordered_json to_json(const InstanceMap& m);

/// One row per instance: id, class, color, diameter_px, diameter_mm, circle, contour size.
std::string instances_csv(const std::vector<Instance>& instances);

/// image_id followed by per-class fractions and luminance stats.
std::string stats_csv(const std::vector<ImageStats>& stats);
std::vector<ImageStats> parse_stats_csv(const std::string& text);

/// Two columns: image id and subset (train/test).
std::string split_manifest(const SplitAssignment& s);

}  // namespace pelletseg
