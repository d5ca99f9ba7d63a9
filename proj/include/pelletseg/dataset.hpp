#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pelletseg/classes.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

// ---------------------------------------------------------------------------
// Pixel-distribution statistics and stratified splitting

/// Fraction of all pixels carrying each class id; index 0 is background.
using ClassFractions = std::array<double, kNumClasses>;

ClassFractions class_pixel_fractions(const ClassMap& classes);

struct ImageStats {
  std::string id;
  ClassFractions fractions{};
  double lum_mean = 0.0;  // CIELAB L
  double lum_std = 0.0;
};

/// Exact L2-Wasserstein distance between two empirical 1-D distributions,
/// integrating the squared difference of their quantile functions.
double wasserstein2_1d(std::span<const double> a, std::span<const double> b);

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::array<double, kNumClasses> class_distance{};  // per-class W2; background entry unused
  double objective = 0.0;                             // max over pellet classes
  std::vector<double> start_objectives;               // per restart, before refinement
  std::vector<double> restart_objectives;             // per restart, after refinement
};

/// Worst-class W2 between train and test fraction samples. `is_test[i]`
/// marks image i as test.
double split_objective(std::span<const ImageStats> stats, const std::vector<char>& is_test,
                       std::array<double, kNumClasses>* per_class = nullptr);

/// Test-set size used for `n` images: round(fraction * n) clamped to [1, n-1].
std::size_t test_count(std::size_t n, double test_fraction);

/// Random starting partitions refined by best-improvement pair swaps until no
/// swap lowers the objective. When the number of distinct partitions does not
/// exceed `restarts`, every partition is used as a start once.
SplitAssignment split_dataset(std::span<const ImageStats> stats, double test_fraction, int restarts,
                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Luminance normalization

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB (8-bit) to CIELAB, D65 white.
Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);
/// CIELAB to 8-bit sRGB, rounding and clamping each channel.
std::array<std::uint8_t, 3> lab_to_srgb(const Lab& lab);

struct LuminanceStats {
  double ref_mean = 50.0;
  double ref_std = 15.0;
};

/// Mean and population standard deviation of L over an RGB image.
LuminanceStats luminance_stats(const RgbImage& image);

/// Affinely remaps L to the reference mean and spread, keeping a and b.
RgbImage normalize_luminance(const RgbImage& image, const LuminanceStats& ref);

ImageStats image_stats(std::string id, const ClassMap& classes, const RgbImage* rgb = nullptr);

// ---------------------------------------------------------------------------
// Synthetic scenes

struct SynthParams {
  int rows = 512;
  int cols = 512;
  int n_objects = 20;
  std::array<double, kNumClasses - 1> class_mix = {0.55, 0.2, 0.1, 0.15};  // nice, ugly, big, joint
  double radius_min = 12.0;
  double radius_max = 24.0;
  int min_gap = 3;
  int max_attempts_per_object = 200;
};

struct SynthScene {
  LabelMap labels;
  ClassMap classes;
  RgbImage rgb;
  std::vector<Pixel> centers;               // index i is label i + 1
  std::vector<PelletClass> object_classes;  // index i is label i + 1
  int placed = 0;
  bool incomplete = false;  // fewer than n_objects could be placed
};

/// Deterministic scene of non-overlapping star-convex blobs whose masks are
/// separated by more than `min_gap` pixels.
SynthScene synth_scene(std::uint64_t seed, const SynthParams& params);

// Small portable generator so seeded outputs are identical across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

}  // namespace pelletseg
