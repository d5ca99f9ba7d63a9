#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pelletseg/dataset.hpp"
#include "pelletseg/targets.hpp"

using namespace pelletseg;

namespace {

std::vector<ImageStats> corpus(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0, 0.25);
  std::vector<ImageStats> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i].id = "i" + std::to_string(i);
    for (int k = 1; k < kNumClasses; ++k) s[i].fractions[k] = u(rng);
  }
  return s;
}

}  // namespace

TEST(ClassFractions, CountsOverAllPixels) {
  EXPECT_EQ(class_pixel_fractions(ClassMap(4, 4))[1], 0.0);
  ClassMap m(10, 10);
  for (int i = 0; i < 25; ++i) m.data()[i] = 1;
  EXPECT_EQ(class_pixel_fractions(m)[1], 0.25);
  std::mt19937_64 rng(1);
  for (auto& v : m.storage()) v = static_cast<std::uint8_t>(rng() % 5);
  std::array<int, 5> counts{};
  for (auto v : m.data()) ++counts[v];
  const ClassFractions f = class_pixel_fractions(m);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(f[k], counts[k] / 100.0);
}

TEST(Wasserstein, ClosedForms) {
  const std::vector<double> a = {0.3, 0.1, 0.7};
  EXPECT_EQ(wasserstein2_1d(a, a), 0.0);
  EXPECT_NEAR(wasserstein2_1d(std::vector<double>{0.2}, std::vector<double>{0.5}), 0.3, 1e-15);
  EXPECT_NEAR(wasserstein2_1d(std::vector<double>{0, 1}, std::vector<double>{0, 2}), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(wasserstein2_1d(std::vector<double>{}, a), EmptyInput);
}

TEST(Wasserstein, MetricProperties) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 9;
    std::vector<double> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    EXPECT_EQ(wasserstein2_1d(a, b), wasserstein2_1d(b, a));
    EXPECT_LE(wasserstein2_1d(a, c), wasserstein2_1d(a, b) + wasserstein2_1d(b, c) + 1e-9);
    const double shift = u(rng);
    std::vector<double> as = a, bs = b;
    for (auto& v : as) v += shift;
    for (auto& v : bs) v += shift;
    EXPECT_NEAR(wasserstein2_1d(as, bs), wasserstein2_1d(a, b), 1e-9);
    EXPECT_NEAR(wasserstein2_1d(a, b), oracle::w2_quantile(a, b), 1e-9);
  }
  EXPECT_NEAR(wasserstein2_1d(std::vector<double>{0.4}, std::vector<double>{0.4 + 0.3}), 0.3, 1e-12);
}

TEST(SplitDataset, TwoIdenticalImages) {
  std::vector<ImageStats> s(2);
  s[0].id = "a";
  s[1].id = "b";
  s[0].fractions = s[1].fractions = {0.5, 0.2, 0.1, 0.1, 0.1};
  const SplitAssignment r = split_dataset(s, 0.5, 4, 1);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.train.size(), 1U);
  EXPECT_EQ(r.test.size(), 1U);
}

TEST(SplitDataset, DuplicatedPairsReachZero) {
  std::mt19937_64 rng(3);
  auto s = corpus(rng, 8);
  for (std::size_t i = 1; i < 8; i += 2) s[i].fractions = s[i - 1].fractions;
  const SplitAssignment r = split_dataset(s, 0.5, 4, 9);
  EXPECT_NEAR(r.objective, 0.0, 1e-15);
}

TEST(SplitDataset, PartitionAndFractionInvariants) {
  std::mt19937_64 rng(4);
  const auto s = corpus(rng, 23);
  const SplitAssignment r = split_dataset(s, 0.3, 6, 11);
  std::set<std::string> ids(r.train.begin(), r.train.end());
  for (const auto& id : r.test) EXPECT_TRUE(ids.insert(id).second);
  EXPECT_EQ(ids.size(), 23U);
  EXPECT_LE(std::abs(double(r.test.size()) - 0.3 * 23), 1.0);
  // Descent never ends above its own starting point.
  ASSERT_EQ(r.start_objectives.size(), r.restart_objectives.size());
  for (std::size_t i = 0; i < r.start_objectives.size(); ++i) {
    EXPECT_LE(r.restart_objectives[i], r.start_objectives[i]);
  }
  std::vector<std::array<double, 5>> f;
  std::vector<bool> test(23);
  for (std::size_t i = 0; i < s.size(); ++i) {
    f.push_back(s[i].fractions);
    test[i] = std::find(r.test.begin(), r.test.end(), s[i].id) != r.test.end();
  }
  EXPECT_NEAR(r.objective, oracle::split_objective(f, test), 1e-12);
}

TEST(SplitDataset, DeterministicGivenSeed) {
  std::mt19937_64 rng(5);
  const auto s = corpus(rng, 15);
  const SplitAssignment a = split_dataset(s, 0.2, 5, 77), b = split_dataset(s, 0.2, 5, 77);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(SplitDataset, DegenerateInputs) {
  std::mt19937_64 rng(6);
  const auto s = corpus(rng, 5);
  EXPECT_THROW(split_dataset(std::span(s).first(1), 0.5, 3, 1), InvalidParameter);
  EXPECT_THROW(split_dataset(s, 0.0, 3, 1), InvalidParameter);
  EXPECT_THROW(split_dataset(s, 1.0, 3, 1), InvalidParameter);
  EXPECT_THROW(split_dataset(s, 0.5, 0, 1), InvalidParameter);
}

TEST(Color, KnownLabValues) {
  const Lab white = srgb_to_lab(255, 255, 255);
  EXPECT_NEAR(white.l, 100.0, 1e-3);
  EXPECT_NEAR(white.a, 0.0, 1e-3);
  EXPECT_NEAR(white.b, 0.0, 1e-3);
  const Lab black = srgb_to_lab(0, 0, 0);
  EXPECT_NEAR(black.l, 0.0, 1e-9);
  const Lab red = srgb_to_lab(255, 0, 0);
  EXPECT_NEAR(red.l, 53.24, 0.01);
  EXPECT_NEAR(red.a, 80.09, 0.01);
  EXPECT_NEAR(red.b, 67.20, 0.01);
}

TEST(Color, RoundTripWithinOne) {
  for (int r = 0; r < 256; r += 17) {
    for (int g = 0; g < 256; g += 15) {
      for (int b = 0; b < 256; b += 13) {
        const auto back = lab_to_srgb(srgb_to_lab(r, g, b));
        EXPECT_LE(std::abs(back[0] - r), 1);
        EXPECT_LE(std::abs(back[1] - g), 1);
        EXPECT_LE(std::abs(back[2] - b), 1);
      }
    }
  }
}

TEST(NormalizeLuminance, UniformGrayToTarget) {
  RgbImage img(8, 8, 3, 119);
  const RgbImage out = normalize_luminance(img, {70.0, 10.0});
  const LuminanceStats s = luminance_stats(out);
  EXPECT_NEAR(s.ref_mean, 70.0, 0.5);
  EXPECT_GT(out(0, 0, 0), 119);
  EXPECT_EQ(out(0, 0, 0), out(7, 7, 2));
}

TEST(NormalizeLuminance, NearIdentityWhenStatsMatch) {
  std::mt19937_64 rng(7);
  RgbImage img(16, 16, 3);
  for (auto& v : img.storage()) v = static_cast<std::uint8_t>(60 + rng() % 120);
  const RgbImage out = normalize_luminance(img, luminance_stats(img));
  for (std::size_t i = 0; i < img.data().size(); ++i) EXPECT_LE(std::abs(int(out.data()[i]) - int(img.data()[i])), 1);
}

TEST(Synth, EmptyScene) {
  const SynthScene s = synth_scene(1, {.rows = 20, .cols = 20, .n_objects = 0});
  EXPECT_EQ(s.placed, 0);
  for (Label v : s.labels.data()) EXPECT_EQ(v, 0U);
}

TEST(Synth, SingleObjectArea) {
  const SynthScene s = synth_scene(2, {.rows = 60, .cols = 60, .n_objects = 1, .radius_min = 10, .radius_max = 10});
  ASSERT_EQ(s.placed, 1);
  std::size_t area = 0;
  for (Label v : s.labels.data()) area += v == 1;
  EXPECT_NEAR(double(area), std::numbers::pi * 100, 0.3 * std::numbers::pi * 100);
}

TEST(Synth, DeterministicAndDisjointWithGap) {
  const SynthParams p{.rows = 200, .cols = 200, .n_objects = 25, .min_gap = 3};
  const SynthScene a = synth_scene(42, p), b = synth_scene(42, p);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.classes, b.classes);
  EXPECT_EQ(a.rgb, b.rgb);
  // Pixels of different objects are more than min_gap apart.
  std::vector<std::pair<Pixel, Label>> fg;
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      if (a.labels(r, c)) fg.push_back({{r, c}, a.labels(r, c)});
    }
  }
  for (const auto& [px, id] : fg) {
    for (int dr = -p.min_gap; dr <= p.min_gap; ++dr) {
      for (int dc = -p.min_gap; dc <= p.min_gap; ++dc) {
        if (dr * dr + dc * dc > p.min_gap * p.min_gap || !a.labels.in_bounds(px.row + dr, px.col + dc)) continue;
        const Label o = a.labels(px.row + dr, px.col + dc);
        EXPECT_TRUE(o == 0 || o == id);
      }
    }
  }
}

TEST(Synth, ObjectsAreStarConvexAboutTheirCenters) {
  const SynthScene s = synth_scene(9, {.rows = 300, .cols = 300, .n_objects = 20});
  // Every ray from the center leaves the object exactly once (fine sub-step march).
  for (std::size_t i = 0; i < s.centers.size(); ++i) {
    const Label id = static_cast<Label>(i + 1);
    const Pixel c = s.centers[i];
    ASSERT_EQ(s.labels(c.row, c.col), id);
    for (int k = 0; k < 64; ++k) {
      const double th = 2 * std::numbers::pi * k / 64;
      int exits = 0;
      bool inside = true;
      for (double t = 0.05; t < 60; t += 0.05) {
        const int r = int(std::floor(c.row + t * std::sin(th) + 0.5)), cc = int(std::floor(c.col + t * std::cos(th) + 0.5));
        const bool now = s.labels.in_bounds(r, cc) && s.labels(r, cc) == id;
        if (inside && !now) ++exits;
        inside = now;
      }
      EXPECT_EQ(exits, 1) << "object " << id << " ray " << k;
    }
  }
}

TEST(Synth, ClassMapFollowsObjects) {
  const SynthScene s = synth_scene(4, {.rows = 150, .cols = 150, .n_objects = 10});
  for (int r = 0; r < 150; ++r) {
    for (int c = 0; c < 150; ++c) {
      const Label id = s.labels(r, c);
      EXPECT_EQ(s.classes(r, c), id ? static_cast<std::uint8_t>(s.object_classes[id - 1]) : 0);
    }
  }
}
