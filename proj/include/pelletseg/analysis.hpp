#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "pelletseg/classes.hpp"
#include "pelletseg/geometry.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

// Instances whose contour has fewer distinct pixels than this are not sized.
inline constexpr std::size_t kMinContourPoints = 8;

/// Majority vote of per-pixel argmax over the mask, background votes ignored.
/// Ties go to the larger summed score; a mask voting only background falls
/// back to the non-background class with the largest summed score.
PelletClass classify_instance(const PixelMask& mask, const Grid<float>& type_scores);

struct Measurement {
  std::vector<Pixel> contour;
  std::optional<Circle> circle;
  std::optional<double> diameter_px;
  std::optional<double> diameter_mm;

  bool rejected() const { return !circle.has_value(); }
};

Measurement measure_instance(const PixelMask& mask, double mm_per_px);

struct Instance {
  Label id = 0;
  PixelMask mask;
  PelletClass cls = PelletClass::Background;
  std::vector<Pixel> contour;
  std::optional<Circle> circle;
  std::optional<double> diameter_px;
  std::optional<double> diameter_mm;
};

/// Classify and measure every instance of a label map.
std::vector<Instance> analyze_instances(const LabelMap& labels, const Grid<float>& type_scores,
                                        double mm_per_px);

struct ClassHistogram {
  PelletClass cls = PelletClass::Nice;
  std::vector<std::size_t> counts;  // one per bin
  std::size_t underflow = 0;        // diameters below the first edge
  std::size_t overflow = 0;         // diameters above the last edge
};

struct SizeReport {
  std::vector<double> bin_edges;
  std::vector<ClassHistogram> histograms;
  std::array<std::size_t, kNumClasses> counts{};
  std::vector<Label> rejected;
};

/// Bins are half-open [lo, hi) except the last, which is closed.
SizeReport size_report(std::span<const Instance> instances, std::span<const double> bin_edges,
                       std::span<const PelletClass> measured_classes = std::array{PelletClass::Nice});

}  // namespace pelletseg
