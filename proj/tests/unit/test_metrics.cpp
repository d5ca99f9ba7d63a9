#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pelletseg/metrics.hpp"

using namespace pelletseg;

namespace {

LabelMap boxes(int rows, int cols, const std::vector<std::array<int, 5>>& spec) {
  LabelMap m(rows, cols);
  for (const auto& [id, r0, c0, h, w] : spec) {
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + w; ++c) m(r, c) = static_cast<Label>(id);
    }
  }
  return m;
}

}  // namespace

TEST(MatchInstances, IdenticalMaps) {
  const LabelMap gt = boxes(20, 20, {{1, 0, 0, 5, 5}, {2, 10, 10, 4, 6}});
  const MatchReport r = match_instances(gt, gt);
  EXPECT_EQ(r.tp, 2U);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.mean_iou, 1.0);
  EXPECT_EQ(match_instances(gt, gt, {0.999}).tp, 2U);
}

TEST(MatchInstances, EmptyPrediction) {
  const LabelMap gt = boxes(10, 10, {{1, 0, 0, 3, 3}});
  const MatchReport r = match_instances(LabelMap(10, 10), gt);
  EXPECT_EQ(r.tp, 0U);
  EXPECT_EQ(r.fn, 1U);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.precision, 0.0);
}

TEST(MatchInstances, ShapeMismatch) { EXPECT_THROW(match_instances(LabelMap(3, 3), LabelMap(3, 4)), ShapeError); }

TEST(MatchInstances, OptimalBeatsGreedy) {
  // A greedy match on the largest IoU would pair 1-1 and leave 2 unmatched.
  std::vector<double> w = {0.7, 0.6, 0.65, 0.0};
  const auto pairs = optimal_assignment(w, 2, 2, 0.5);
  EXPECT_EQ(pairs, (std::vector<std::pair<int, int>>{{0, 1}, {1, 0}}));
}

TEST(MatchInstances, CountsAndRelabelInvariance) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pos(0, 30), ext(2, 8);
  for (int t = 0; t < 30; ++t) {
    std::vector<std::array<int, 5>> g, p;
    for (int i = 1; i <= 5; ++i) {
      g.push_back({i, pos(rng), pos(rng), ext(rng), ext(rng)});
      p.push_back({i, pos(rng), pos(rng), ext(rng), ext(rng)});
    }
    const LabelMap gt = boxes(40, 40, g), pred = boxes(40, 40, p);
    const MatchReport r = match_instances(pred, gt, {0.1});
    const auto table = oracle::iou_table(pred, gt);
    std::set<Label> np, ng;
    for (const auto& [k, v] : table) {
      np.insert(k.first);
      ng.insert(k.second);
    }
    EXPECT_EQ(r.tp + r.fp, np.size());
    EXPECT_EQ(r.tp + r.fn, ng.size());
    for (const auto& pr : r.pairs) EXPECT_GT(pr.iou, 0.1);

    LabelMap relabeled = pred;
    for (auto& v : relabeled.storage()) v = v ? 100 - v : 0;
    const MatchReport r2 = match_instances(relabeled, gt, {0.1});
    EXPECT_EQ(r2.tp, r.tp);
    EXPECT_DOUBLE_EQ(r2.mean_iou, r.mean_iou);
  }
}

TEST(PixelMetrics, IdenticalMaps) {
  ClassMap a(4, 4);
  for (std::size_t i = 0; i < 16; ++i) a.data()[i] = static_cast<std::uint8_t>(i % 5);
  const PixelMetrics m = pixel_metrics(a, a);
  EXPECT_EQ(m.accuracy, 1.0);
  for (const auto& c : m.per_class) EXPECT_EQ(c.f1, 1.0);
}

TEST(PixelMetrics, AllBackgroundPrediction) {
  ClassMap gt(4, 4);
  for (int c = 0; c < 4; ++c) gt(0, c) = gt(1, c) = 1;
  const PixelMetrics m = pixel_metrics(ClassMap(4, 4), gt);
  EXPECT_EQ(m.accuracy, 0.5);
  EXPECT_EQ(m.per_class[1].recall, 0.0);
}

TEST(PixelMetrics, MacroF1Bounded) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    ClassMap a(6, 6), b(6, 6);
    for (auto& v : a.storage()) v = static_cast<std::uint8_t>(rng() % 5);
    for (auto& v : b.storage()) v = static_cast<std::uint8_t>(rng() % 5);
    const PixelMetrics m = pixel_metrics(a, b);
    double lo = 1, hi = 0;
    for (const auto& c : m.per_class) {
      if (!c.support) continue;
      lo = std::min(lo, c.f1);
      hi = std::max(hi, c.f1);
    }
    EXPECT_GE(m.macro_f1, lo - 1e-15);
    EXPECT_LE(m.macro_f1, hi + 1e-15);
  }
}

TEST(PixelMetrics, ShapeMismatch) { EXPECT_THROW(pixel_metrics(ClassMap(2, 2), ClassMap(3, 2)), ShapeError); }

TEST(Losses, MaskedMae) {
  Grid<float> a(2, 2, 3, 1.0F), b(2, 2, 3, 1.0F);
  BinaryMask m(2, 2, 1, 1);
  EXPECT_EQ(masked_mae(a, a, m).value, 0.0);
  for (auto& v : b.storage()) v += 2.0F;
  EXPECT_DOUBLE_EQ(masked_mae(b, a, m).value, 2.0);
  const MaskedLoss empty = masked_mae(a, b, BinaryMask(2, 2));
  EXPECT_TRUE(empty.empty_mask);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_THROW(masked_mae(a, Grid<float>(2, 2, 2), m), ShapeError);
}

TEST(Losses, BceMseClosedForms) {
  BinaryMask m(1, 1, 1, 1);
  EXPECT_NEAR(masked_bce_mse(ProbMap(1, 1, 1, 1.0F), ProbMap(1, 1, 1, 1.0F), m).value, 1e-7, 1e-9);
  EXPECT_NEAR(masked_bce_mse(ProbMap(1, 1, 1, 0.5F), ProbMap(1, 1, 1, 1.0F), m).value, std::log(2.0) + 0.25, 1e-9);
  EXPECT_NEAR(masked_bce_mse(ProbMap(1, 1, 1, 0.5F), ProbMap(1, 1, 1, 0.5F), m).value, std::log(2.0), 1e-9);
}

TEST(Losses, CeDice) {
  Grid<float> perfect(3, 3, 5, 0.0F);
  ClassMap gt(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      gt(r, c) = static_cast<std::uint8_t>((r + c) % 5);
      perfect(r, c, gt(r, c)) = 60.0F;
    }
  }
  BinaryMask m(3, 3, 1, 1);
  EXPECT_LE(masked_ce_dice(perfect, gt, m).value, 1e-5);
  // Uniform prediction: CE term is ln 5.
  const double uniform = masked_ce_dice(Grid<float>(3, 3, 5, 0.0F), gt, m).value;
  EXPECT_GT(uniform, std::log(5.0));
  EXPECT_LT(uniform, std::log(5.0) + 1.0);
}

TEST(Losses, AllNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    ProbMap p(4, 4), g(4, 4);
    Grid<float> s(4, 4, 5);
    ClassMap gc(4, 4);
    BinaryMask m(4, 4);
    for (std::size_t i = 0; i < 16; ++i) {
      p.data()[i] = u(rng);
      g.data()[i] = u(rng);
      gc.data()[i] = static_cast<std::uint8_t>(rng() % 5);
      m.data()[i] = rng() % 2;
    }
    for (auto& v : s.storage()) v = 4 * u(rng) - 2;
    EXPECT_GE(masked_bce_mse(p, g, m).value, 0.0);
    EXPECT_GE(masked_ce_dice(s, gc, m).value, 0.0);
    EXPECT_GE(masked_mae(p, g, m).value, 0.0);
  }
}

TEST(Losses, CombinedWeights) {
  EXPECT_EQ(combined_loss(0, 0, 0), 0.0);
  EXPECT_EQ(combined_loss(1, 1, 1), 2.5);
  EXPECT_NEAR(combined_loss(0.2, 0.4, 0.6), 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(combined_loss(0.2, 0.8, 0.6), 2 * combined_loss(0.1, 0.4, 0.3));
  EXPECT_THROW(combined_loss(-1, 0, 0), InvalidParameter);
}
