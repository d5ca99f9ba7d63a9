#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pelletseg/classes.hpp"
#include "pelletseg/grid.hpp"

namespace pelletseg {

struct MatchConfig {
  double tau = 0.5;
};

struct MatchedPair {
  Label pred = 0;
  Label gt = 0;
  double iou = 0.0;
};

struct MatchReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchedPair> pairs;  // sorted by pred id
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mean_iou = 0.0;  // over matched pairs
};

/// Maximum-weight one-to-one assignment restricted to entries > tau.
/// `weights` is row-major (n_rows x n_cols). Returns (row, col) pairs.
std::vector<std::pair<int, int>> optimal_assignment(const std::vector<double>& weights, int n_rows, int n_cols,
                                                    double tau);

MatchReport match_instances(const LabelMap& pred, const LabelMap& gt, MatchConfig cfg = {});

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // ground-truth pixels
};

struct PixelMetrics {
  std::vector<ClassScores> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [gt][pred]
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Confusion-matrix metrics. Classes without ground-truth support are left out
/// of the macro averages.
PixelMetrics pixel_metrics(const ClassMap& pred, const ClassMap& gt, int n_classes = kNumClasses);

// Loss functions, kept as pure verification oracles.

inline constexpr double kBceEpsilon = 1e-7;
inline constexpr double kDiceSmoothing = 1e-6;

struct MaskedLoss {
  double value = 0.0;
  bool empty_mask = false;
};

MaskedLoss masked_mae(const Grid<float>& pred, const Grid<float>& gt, const BinaryMask& mask);
MaskedLoss masked_bce_mse(const ProbMap& pred, const ProbMap& gt, const BinaryMask& mask);
/// Softmax cross-entropy plus (1 - mean soft Dice over classes present in gt).
MaskedLoss masked_ce_dice(const Grid<float>& scores, const ClassMap& gt, const BinaryMask& mask);

struct LossWeights {
  double dist = 1.0;
  double type = 1.0;
  double stardist = 0.5;
};

double combined_loss(double dist_loss, double type_loss, double stardist_loss, const LossWeights& w = {});

}  // namespace pelletseg
