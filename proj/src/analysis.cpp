#include "pelletseg/analysis.hpp"

#include <algorithm>
#include <set>

#include "pelletseg/labels.hpp"

namespace pelletseg {

PelletClass classify_instance(const PixelMask& mask, const Grid<float>& type_scores) {
  if (mask.empty()) throw EmptyInput("classify_instance: empty mask");
  const int n = type_scores.channels();
  if (n < 2 || n > kNumClasses) {
    throw InvalidParameter("classify_instance: expected 2.." + std::to_string(kNumClasses) +
                           " type channels, got " + std::to_string(n));
  }
  std::array<std::size_t, kNumClasses> votes{};
  std::array<double, kNumClasses> sums{};
  for (const Pixel& p : mask.pixels()) {
    if (!type_scores.in_bounds(p.row, p.col)) {
      throw ShapeError("classify_instance: mask pixel outside the type map");
    }
    const auto s = type_scores.pixel(p.row, p.col);
    int best = 0;
    for (int k = 0; k < n; ++k) {
      sums[k] += s[k];
      if (s[k] > s[best]) best = k;
    }
    if (best != 0) ++votes[best];
  }
  int winner = 1;
  for (int k = 2; k < n; ++k) {
    if (votes[k] > votes[winner] || (votes[k] == votes[winner] && sums[k] > sums[winner])) winner = k;
  }
  return static_cast<PelletClass>(winner);
}

Measurement measure_instance(const PixelMask& mask, double mm_per_px) {
  if (mask.empty()) throw EmptyInput("measure_instance: empty mask");
  if (!(mm_per_px > 0.0)) throw InvalidParameter("measure_instance: mm_per_px must be > 0");
  Measurement m;
  m.contour = trace_contour(mask).points;
  const std::set<Pixel> distinct(m.contour.begin(), m.contour.end());
  if (distinct.size() < kMinContourPoints) return m;

  std::vector<Point2> pts;
  pts.reserve(distinct.size());
  for (const Pixel& p : distinct) pts.push_back({double(p.row), double(p.col)});
  const Circle c = min_enclosing_circle(pts);
  m.circle = c;
  m.diameter_px = 2.0 * c.radius;
  m.diameter_mm = *m.diameter_px * mm_per_px;
  return m;
}

std::vector<Instance> analyze_instances(const LabelMap& labels, const Grid<float>& type_scores,
                                        double mm_per_px) {
  require_same_extent(labels, type_scores, "analyze_instances");
  std::vector<Instance> out;
  for (auto& [id, mask] : instance_masks(labels)) {
    Instance inst;
    inst.id = id;
    inst.cls = classify_instance(mask, type_scores);
    Measurement m = measure_instance(mask, mm_per_px);
    inst.contour = std::move(m.contour);
    inst.circle = m.circle;
    inst.diameter_px = m.diameter_px;
    inst.diameter_mm = m.diameter_mm;
    inst.mask = std::move(mask);
    out.push_back(std::move(inst));
  }
  return out;
}

SizeReport size_report(std::span<const Instance> instances, std::span<const double> bin_edges,
                       std::span<const PelletClass> measured_classes) {
  if (bin_edges.size() < 2) throw InvalidParameter("size_report: need at least two bin edges");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) {
      throw InvalidParameter("size_report: bin edges must be strictly increasing");
    }
  }
  SizeReport report;
  report.bin_edges.assign(bin_edges.begin(), bin_edges.end());
  const std::size_t n_bins = bin_edges.size() - 1;
  for (PelletClass c : measured_classes) {
    if (std::ranges::any_of(report.histograms, [c](const ClassHistogram& h) { return h.cls == c; })) continue;
    report.histograms.push_back({c, std::vector<std::size_t>(n_bins, 0), 0, 0});
  }

  for (const Instance& inst : instances) {
    ++report.counts[static_cast<int>(inst.cls)];
    if (!inst.diameter_mm) {
      report.rejected.push_back(inst.id);
      continue;
    }
    auto hist = std::ranges::find_if(report.histograms,
                                     [&](const ClassHistogram& h) { return h.cls == inst.cls; });
    if (hist == report.histograms.end()) continue;
    const double d = *inst.diameter_mm;
    if (d < bin_edges.front()) {
      ++hist->underflow;
    } else if (d > bin_edges.back()) {
      ++hist->overflow;
    } else {
      auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), d);
      std::size_t bin = static_cast<std::size_t>(it - bin_edges.begin()) - 1;
      bin = std::min(bin, n_bins - 1);  // d == last edge
      ++hist->counts[bin];
    }
  }
  return report;
}

}  // namespace pelletseg
