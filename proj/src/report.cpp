#include "pelletseg/report.hpp"

#include <charconv>
#include <sstream>

namespace pelletseg {

using nlohmann::ordered_json;

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Provenance make_provenance(const PipelineConfig& cfg, std::vector<std::string> inputs) {
  return {config_hash(cfg), std::move(inputs), kToolVersion};
}

ordered_json to_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"inputs", p.inputs}, {"tool_version", p.tool_version}};
}

ordered_json to_json(const MatchReport& r) {
  ordered_json pairs = ordered_json::array();
  for (const auto& m : r.pairs) pairs.push_back({{"pred", m.pred}, {"gt", m.gt}, {"iou", m.iou}});
  return {{"tp", r.tp},         {"fp", r.fp},         {"fn", r.fn},
          {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"mean_iou", r.mean_iou},   {"pairs", pairs}};
}

ordered_json to_json(const PixelMetrics& m) {
  ordered_json per_class = ordered_json::object();
  for (std::size_t k = 0; k < m.per_class.size(); ++k) {
    const std::string name = k < kClassNames.size() ? std::string(kClassNames[k]) : "class" + std::to_string(k);
    const auto& s = m.per_class[k];
    per_class[name] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
  }
  ordered_json out = {{"accuracy", m.accuracy},
                      {"macro_precision", m.macro_precision},
                      {"macro_recall", m.macro_recall},
                      {"macro_f1", m.macro_f1}};
  // Model selection in the original workflow keyed on the ugly class.
  if (m.per_class.size() > static_cast<std::size_t>(PelletClass::Ugly)) {
    out["ugly_f1"] = m.per_class[static_cast<int>(PelletClass::Ugly)].f1;
  }
  out["per_class"] = per_class;
  out["confusion"] = m.confusion;
  return out;
}

ordered_json to_json(const SizeReport& r) {
  ordered_json hist = ordered_json::array();
  for (const auto& h : r.histograms) {
    hist.push_back({{"class", class_name(h.cls)},
                    {"counts", h.counts},
                    {"underflow", h.underflow},
                    {"overflow", h.overflow}});
  }
  ordered_json counts = ordered_json::object();
  for (int k = 1; k < kNumClasses; ++k) counts[std::string(kClassNames[k])] = r.counts[k];
  return {{"bin_edges_mm", r.bin_edges}, {"histograms", hist}, {"counts", counts}, {"rejected", r.rejected}};
}

ordered_json to_json(const SplitAssignment& s) {
  ordered_json dist = ordered_json::object();
  for (int k = 1; k < kNumClasses; ++k) dist[std::string(kClassNames[k])] = s.class_distance[k];
  return {{"objective", s.objective}, {"class_w2", dist}, {"train", s.train}, {"test", s.test}};
}

ordered_json to_json(const InstanceMap& m) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : m.records) {
    const std::string cls = r.class_id >= 0 && r.class_id < kNumClasses ? std::string(kClassNames[r.class_id])
                                                                       : std::to_string(r.class_id);
    arr.push_back({{"id", r.id}, {"score", r.score}, {"class", cls}});
  }
  return arr;
}

std::string instances_csv(const std::vector<Instance>& instances) {
  std::string out = "id,class,color,contour_points,center_row,center_col,diameter_px,diameter_mm\n";
  for (const auto& inst : instances) {
    out += std::to_string(inst.id) + "," + std::string(class_name(inst.cls)) + "," +
           std::string(class_color(inst.cls)) + "," + std::to_string(inst.contour.size()) + ",";
    if (inst.circle) {
      out += num(inst.circle->center.row) + "," + num(inst.circle->center.col) + "," + num(*inst.diameter_px) + "," +
             num(*inst.diameter_mm) + "\n";
    } else {
      out += ",,,\n";
    }
  }
  return out;
}

std::string stats_csv(const std::vector<ImageStats>& stats) {
  std::string out = "image_id";
  for (int k = 0; k < kNumClasses; ++k) out += ",frac_" + std::string(kClassNames[k]);
  out += ",lum_mean,lum_std\n";
  for (const auto& s : stats) {
    out += s.id;
    for (double f : s.fractions) out += "," + num(f);
    out += "," + num(s.lum_mean) + "," + num(s.lum_std) + "\n";
  }
  return out;
}

std::vector<ImageStats> parse_stats_csv(const std::string& text) {
  std::vector<ImageStats> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("image_id", 0) == 0)) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 1 + kNumClasses && cells.size() != 3 + kNumClasses) {
      throw FormatError("stats CSV line " + std::to_string(lineno) + ": expected " +
                        std::to_string(1 + kNumClasses) + " or " + std::to_string(3 + kNumClasses) +
                        " columns, found " + std::to_string(cells.size()));
    }
    auto parse = [&](const std::string& v) {
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
      if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw FormatError("stats CSV line " + std::to_string(lineno) + ": bad number '" + v + "'");
      }
      return d;
    };
    ImageStats s;
    s.id = cells[0];
    for (int k = 0; k < kNumClasses; ++k) {
      s.fractions[k] = parse(cells[1 + k]);
      if (s.fractions[k] < 0.0 || s.fractions[k] > 1.0) {
        throw FormatError("stats CSV line " + std::to_string(lineno) + ": fraction outside [0, 1]");
      }
    }
    if (cells.size() == 3 + kNumClasses) {
      s.lum_mean = parse(cells[1 + kNumClasses]);
      s.lum_std = parse(cells[2 + kNumClasses]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string split_manifest(const SplitAssignment& s) {
  std::string out;
  for (const auto& id : s.train) out += id + "\ttrain\n";
  for (const auto& id : s.test) out += id + "\ttest\n";
  return out;
}

}  // namespace pelletseg
