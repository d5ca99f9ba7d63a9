#include <algorithm>
#include <cmath>
#include <numbers>

#include "pelletseg/dataset.hpp"

namespace pelletseg {

namespace {

struct BlobShape {
  double base = 0.0;
  std::array<double, 2> amp{};    // 2nd and 3rd harmonic
  std::array<double, 2> phase{};

  double radius(double theta) const {
    return base * (1.0 + amp[0] * std::cos(2.0 * theta + phase[0]) + amp[1] * std::cos(3.0 * theta + phase[1]));
  }
  double max_radius() const { return base * (1.0 + amp[0] + amp[1]); }
};

// Per-class tint used for the rendered RGB image.
constexpr std::array<std::array<double, 3>, kNumClasses> kTints = {{
    {0.0, 0.0, 0.0},
    {90.0, 150.0, 80.0},
    {170.0, 80.0, 70.0},
    {130.0, 90.0, 160.0},
    {80.0, 100.0, 170.0},
}};

std::uint8_t noisy(double v, SplitMix64& rng) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + rng.uniform(-6.0, 6.0) + 0.5), 0.0, 255.0));
}

}  // namespace

SynthScene synth_scene(std::uint64_t seed, const SynthParams& params) {
  if (params.rows < 1 || params.cols < 1) throw InvalidParameter("synth_scene: image dimensions must be >= 1");
  if (params.n_objects < 0) throw InvalidParameter("synth_scene: n_objects must be >= 0");
  if (!(params.radius_min > 0.0) || !(params.radius_max >= params.radius_min)) {
    throw InvalidParameter("synth_scene: radius range must be positive and ordered");
  }
  if (params.min_gap < 0) throw InvalidParameter("synth_scene: min_gap must be >= 0");
  double mix_total = 0.0;
  for (double p : params.class_mix) {
    if (p < 0.0) throw InvalidParameter("synth_scene: class probabilities must be >= 0");
    mix_total += p;
  }
  if (std::abs(mix_total - 1.0) > 1e-9) throw InvalidParameter("synth_scene: class probabilities must sum to 1");

  SynthScene scene;
  scene.labels = LabelMap(params.rows, params.cols, 1, 0);
  scene.classes = ClassMap(params.rows, params.cols, 1, 0);
  BinaryMask blocked(params.rows, params.cols, 1, 0);
  SplitMix64 rng(seed);

  // Offsets of the gap disk used to reserve space around placed blobs.
  std::vector<Pixel> gap_disk;
  for (int dr = -params.min_gap; dr <= params.min_gap; ++dr) {
    for (int dc = -params.min_gap; dc <= params.min_gap; ++dc) {
      if (dr * dr + dc * dc <= params.min_gap * params.min_gap) gap_disk.push_back({dr, dc});
    }
  }

  std::vector<Pixel> pixels;
  for (int obj = 0; obj < params.n_objects; ++obj) {
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts_per_object && !placed; ++attempt) {
      BlobShape shape;
      shape.base = rng.uniform(params.radius_min, params.radius_max);
      shape.amp = {rng.uniform(0.0, 0.12), rng.uniform(0.0, 0.08)};
      shape.phase = {rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.0, 2.0 * std::numbers::pi)};
      const int reach = static_cast<int>(std::ceil(shape.max_radius())) + 1;
      if (2 * reach + 1 > params.rows || 2 * reach + 1 > params.cols) continue;
      const int cr = reach + static_cast<int>(rng.below(static_cast<std::size_t>(params.rows - 2 * reach)));
      const int cc = reach + static_cast<int>(rng.below(static_cast<std::size_t>(params.cols - 2 * reach)));

      pixels.clear();
      bool clash = false;
      for (int dr = -reach; dr <= reach && !clash; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          const double d = std::hypot(double(dr), double(dc));
          if (d > shape.radius(std::atan2(double(dr), double(dc)))) continue;
          if (blocked(cr + dr, cc + dc)) {
            clash = true;
            break;
          }
          pixels.push_back({cr + dr, cc + dc});
        }
      }
      if (clash) continue;

      double u = rng.uniform();
      int cls = kNumClasses - 1;
      for (int k = 0; k < kNumClasses - 1; ++k) {
        if (u < params.class_mix[k]) {
          cls = k + 1;
          break;
        }
        u -= params.class_mix[k];
      }

      const Label id = static_cast<Label>(scene.centers.size() + 1);
      for (const Pixel& p : pixels) {
        scene.labels(p.row, p.col) = id;
        scene.classes(p.row, p.col) = static_cast<std::uint8_t>(cls);
        for (const Pixel& o : gap_disk) {
          const int r = p.row + o.row;
          const int c = p.col + o.col;
          if (blocked.in_bounds(r, c)) blocked(r, c) = 1;
        }
      }
      scene.centers.push_back({cr, cc});
      scene.object_classes.push_back(static_cast<PelletClass>(cls));
      placed = true;
    }
    if (!placed) {
      scene.incomplete = true;
      break;
    }
  }
  scene.placed = static_cast<int>(scene.centers.size());

  // Rendering: dark background, class-tinted blobs brightest at their centers.
  scene.rgb = RgbImage(params.rows, params.cols, 3, 0);
  for (int r = 0; r < params.rows; ++r) {
    for (int c = 0; c < params.cols; ++c) {
      const Label id = scene.labels(r, c);
      std::array<double, 3> base = {28.0, 26.0, 24.0};
      if (id != 0) {
        const Pixel ctr = scene.centers[id - 1];
        const double d = std::hypot(double(r - ctr.row), double(c - ctr.col));
        const double shade = 0.55 + 0.45 * std::exp(-d * d / (2.0 * params.radius_max * params.radius_max));
        base = kTints[scene.classes(r, c)];
        for (double& v : base) v *= shade;
      }
      for (int k = 0; k < 3; ++k) scene.rgb(r, c, k) = noisy(base[k], rng);
    }
  }
  return scene;
}

}  // namespace pelletseg
