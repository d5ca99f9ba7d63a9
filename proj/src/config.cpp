#include "pelletseg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pelletseg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    throw InvalidParameter("config: '" + key + "' expects a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidParameter("config: '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Shortest round-trip decimal so the canonical text (and its hash) is stable.
std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void check_unit(const char* key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidParameter(std::string("config: '") + key + "' must lie in [0, 1]");
}

}  // namespace

void PipelineConfig::validate() const {
  if (n_rays < 3) throw InvalidParameter("config: 'n_rays' must be >= 3");
  check_unit("prob_threshold", prob_threshold);
  check_unit("nms_iou_threshold", nms_iou_threshold);
  check_unit("match_tau", match_tau);
  if (mm_per_px && !(*mm_per_px > 0.0)) throw InvalidParameter("config: 'mm_per_px' must be > 0");
  if (!(expansion_radius_px >= 0.0)) throw InvalidParameter("config: 'expansion_radius_px' must be >= 0");
  if (candidate_stride < 1) throw InvalidParameter("config: 'candidate_stride' must be >= 1");
  if (tile_h < 1 || tile_w < 1) throw InvalidParameter("config: tile dimensions must be >= 1");
  if (tile_stride < 1 || tile_stride > std::min(tile_h, tile_w)) {
    throw InvalidParameter("config: 'tile_stride' must lie in [1, min(tile_h, tile_w)]");
  }
  if (!(pyramid_floor > 0.0 && pyramid_floor <= 1.0)) throw InvalidParameter("config: 'pyramid_floor' must lie in (0, 1]");
  if (loss_weights.dist < 0.0 || loss_weights.type < 0.0 || loss_weights.stardist < 0.0) {
    throw InvalidParameter("config: loss weights must be >= 0");
  }
  if (bin_edges.size() < 2) throw InvalidParameter("config: 'bins' needs at least two edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) throw InvalidParameter("config: 'bins' must be strictly increasing");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidParameter("config: 'test_fraction' must lie in (0, 1)");
  if (restarts < 1) throw InvalidParameter("config: 'restarts' must be >= 1");
}

void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "n_rays") {
    cfg.n_rays = parse_int<int>(key, v);
  } else if (key == "prob_threshold") {
    cfg.prob_threshold = parse_double(key, v);
  } else if (key == "nms_iou_threshold") {
    cfg.nms_iou_threshold = parse_double(key, v);
  } else if (key == "match_tau") {
    cfg.match_tau = parse_double(key, v);
  } else if (key == "mm_per_px") {
    cfg.mm_per_px = parse_double(key, v);
  } else if (key == "expansion_radius_px") {
    cfg.expansion_radius_px = parse_double(key, v);
  } else if (key == "candidate_stride") {
    cfg.candidate_stride = parse_int<int>(key, v);
  } else if (key == "tile_h") {
    cfg.tile_h = parse_int<int>(key, v);
  } else if (key == "tile_w") {
    cfg.tile_w = parse_int<int>(key, v);
  } else if (key == "tile_stride") {
    cfg.tile_stride = parse_int<int>(key, v);
  } else if (key == "pyramid_floor") {
    cfg.pyramid_floor = parse_double(key, v);
  } else if (key == "w_dist") {
    cfg.loss_weights.dist = parse_double(key, v);
  } else if (key == "w_type") {
    cfg.loss_weights.type = parse_double(key, v);
  } else if (key == "w_stardist") {
    cfg.loss_weights.stardist = parse_double(key, v);
  } else if (key == "bins") {
    cfg.bin_edges.clear();
    for (const auto& item : split_list(v)) cfg.bin_edges.push_back(parse_double(key, item));
  } else if (key == "measured_classes") {
    cfg.measured_classes.clear();
    for (const auto& item : split_list(v)) {
      const auto cls = parse_class(item);
      if (!cls || *cls == PelletClass::Background) {
        throw InvalidParameter("config: unknown pellet class '" + item + "' (expected nice, ugly, big, joint)");
      }
      cfg.measured_classes.push_back(*cls);
    }
  } else if (key == "test_fraction") {
    cfg.test_fraction = parse_double(key, v);
  } else if (key == "restarts") {
    cfg.restarts = parse_int<int>(key, v);
  } else if (key == "seed") {
    cfg.seed = parse_int<std::uint64_t>(key, v);
  } else {
    throw InvalidParameter("config: unknown key '" + key + "'");
  }
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter("config line " + std::to_string(lineno) + ": expected key=value");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const PipelineConfig& cfg) {
  std::string out;
  auto put = [&out](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  put("n_rays", std::to_string(cfg.n_rays));
  put("prob_threshold", fmt_double(cfg.prob_threshold));
  put("nms_iou_threshold", fmt_double(cfg.nms_iou_threshold));
  put("match_tau", fmt_double(cfg.match_tau));
  if (cfg.mm_per_px) put("mm_per_px", fmt_double(*cfg.mm_per_px));
  put("expansion_radius_px", fmt_double(cfg.expansion_radius_px));
  put("candidate_stride", std::to_string(cfg.candidate_stride));
  put("tile_h", std::to_string(cfg.tile_h));
  put("tile_w", std::to_string(cfg.tile_w));
  put("tile_stride", std::to_string(cfg.tile_stride));
  put("pyramid_floor", fmt_double(cfg.pyramid_floor));
  put("w_dist", fmt_double(cfg.loss_weights.dist));
  put("w_type", fmt_double(cfg.loss_weights.type));
  put("w_stardist", fmt_double(cfg.loss_weights.stardist));
  std::string bins;
  for (std::size_t i = 0; i < cfg.bin_edges.size(); ++i) bins += (i ? "," : "") + fmt_double(cfg.bin_edges[i]);
  put("bins", bins);
  std::string classes;
  for (std::size_t i = 0; i < cfg.measured_classes.size(); ++i) {
    classes += (i ? "," : "") + std::string(class_name(cfg.measured_classes[i]));
  }
  put("measured_classes", classes);
  put("test_fraction", fmt_double(cfg.test_fraction));
  put("restarts", std::to_string(cfg.restarts));
  if (cfg.seed) put("seed", std::to_string(*cfg.seed));
  return out;
}

std::string config_hash(const PipelineConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pelletseg
