#include "pelletseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace pelletseg {

namespace {

// Hungarian algorithm (potentials form) minimizing cost on an n x m matrix with n <= m.
// Returns, for each row, its assigned column.
std::vector<int> hungarian_min(const std::vector<double>& cost, int n, int m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::vector<std::pair<int, int>> optimal_assignment(const std::vector<double>& weights, int n_rows, int n_cols,
                                                    double tau) {
  if (static_cast<std::size_t>(n_rows) * n_cols != weights.size()) {
    throw ShapeError("optimal_assignment: weight matrix size does not match dimensions");
  }
  std::vector<std::pair<int, int>> out;
  if (n_rows == 0 || n_cols == 0) return out;
  const bool transpose = n_rows > n_cols;
  const int n = transpose ? n_cols : n_rows;
  const int m = transpose ? n_rows : n_cols;
  // Entries at or below tau become 0 so they never displace an admissible pair.
  std::vector<double> cost(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double w = transpose ? weights[static_cast<std::size_t>(j) * n_cols + i]
                                 : weights[static_cast<std::size_t>(i) * n_cols + j];
      cost[static_cast<std::size_t>(i) * m + j] = w > tau ? -w : 0.0;
    }
  }
  const auto assign = hungarian_min(cost, n, m);
  for (int i = 0; i < n; ++i) {
    const int j = assign[i];
    if (j < 0) continue;
    const int row = transpose ? j : i;
    const int col = transpose ? i : j;
    if (weights[static_cast<std::size_t>(row) * n_cols + col] > tau) out.emplace_back(row, col);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MatchReport match_instances(const LabelMap& pred, const LabelMap& gt, MatchConfig cfg) {
  require_same_extent(pred, gt, "match_instances");
  if (!(cfg.tau >= 0.0 && cfg.tau <= 1.0)) throw InvalidParameter("match_instances: tau must lie in [0, 1]");

  std::map<Label, std::size_t> pred_area, gt_area;
  std::unordered_map<std::uint64_t, std::size_t> overlap;
  const auto p = pred.data();
  const auto g = gt.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != 0) ++pred_area[p[i]];
    if (g[i] != 0) ++gt_area[g[i]];
    if (p[i] != 0 && g[i] != 0) ++overlap[(static_cast<std::uint64_t>(p[i]) << 32) | g[i]];
  }

  std::vector<Label> pred_ids, gt_ids;
  std::map<Label, int> pred_index, gt_index;
  for (const auto& [id, a] : pred_area) {
    pred_index[id] = static_cast<int>(pred_ids.size());
    pred_ids.push_back(id);
  }
  for (const auto& [id, a] : gt_area) {
    gt_index[id] = static_cast<int>(gt_ids.size());
    gt_ids.push_back(id);
  }
  const int np = static_cast<int>(pred_ids.size());
  const int ng = static_cast<int>(gt_ids.size());
  std::vector<double> iou(static_cast<std::size_t>(np) * ng, 0.0);
  for (const auto& [key, inter] : overlap) {
    const Label pid = static_cast<Label>(key >> 32);
    const Label gid = static_cast<Label>(key & 0xFFFFFFFFULL);
    const double uni = static_cast<double>(pred_area[pid] + gt_area[gid] - inter);
    iou[static_cast<std::size_t>(pred_index[pid]) * ng + gt_index[gid]] = static_cast<double>(inter) / uni;
  }

  MatchReport rep;
  double iou_sum = 0.0;
  for (const auto& [i, j] : optimal_assignment(iou, np, ng, cfg.tau)) {
    const double v = iou[static_cast<std::size_t>(i) * ng + j];
    rep.pairs.push_back({pred_ids[i], gt_ids[j], v});
    iou_sum += v;
  }
  rep.tp = rep.pairs.size();
  rep.fp = static_cast<std::size_t>(np) - rep.tp;
  rep.fn = static_cast<std::size_t>(ng) - rep.tp;
  rep.precision = safe_ratio(double(rep.tp), double(rep.tp + rep.fp));
  rep.recall = safe_ratio(double(rep.tp), double(rep.tp + rep.fn));
  rep.f1 = f1_of(rep.precision, rep.recall);
  rep.mean_iou = rep.tp > 0 ? iou_sum / double(rep.tp) : 0.0;
  return rep;
}

PixelMetrics pixel_metrics(const ClassMap& pred, const ClassMap& gt, int n_classes) {
  require_same_extent(pred, gt, "pixel_metrics");
  if (n_classes < 1) throw InvalidParameter("pixel_metrics: n_classes must be >= 1");
  PixelMetrics m;
  m.confusion.assign(n_classes, std::vector<std::size_t>(n_classes, 0));
  const auto p = pred.data();
  const auto g = gt.data();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] >= n_classes || g[i] >= n_classes) {
      throw InvalidParameter("pixel_metrics: class id out of range");
    }
    ++m.confusion[g[i]][p[i]];
    if (p[i] == g[i]) ++correct;
  }
  m.accuracy = p.empty() ? 0.0 : double(correct) / double(p.size());

  int included = 0;
  m.per_class.resize(n_classes);
  for (int k = 0; k < n_classes; ++k) {
    std::size_t tp = m.confusion[k][k], col = 0, row = 0;
    for (int j = 0; j < n_classes; ++j) {
      row += m.confusion[k][j];
      col += m.confusion[j][k];
    }
    ClassScores& s = m.per_class[k];
    s.support = row;
    s.precision = safe_ratio(double(tp), double(col));
    s.recall = safe_ratio(double(tp), double(row));
    s.f1 = f1_of(s.precision, s.recall);
    if (row > 0) {
      ++included;
      m.macro_precision += s.precision;
      m.macro_recall += s.recall;
      m.macro_f1 += s.f1;
    }
  }
  if (included > 0) {
    m.macro_precision /= included;
    m.macro_recall /= included;
    m.macro_f1 /= included;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Losses

namespace {

void check_mask(const BinaryMask& mask, int rows, int cols, const char* what) {
  if (!mask.same_extent(rows, cols) || mask.channels() != 1) {
    throw ShapeError(std::string(what) + ": mask shape mismatch");
  }
}

}  // namespace

MaskedLoss masked_mae(const Grid<float>& pred, const Grid<float>& gt, const BinaryMask& mask) {
  require_same_extent(pred, gt, "masked_mae");
  if (pred.channels() != gt.channels()) throw ShapeError("masked_mae: channel mismatch");
  check_mask(mask, pred.rows(), pred.cols(), "masked_mae");
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < pred.rows(); ++r) {
    for (int c = 0; c < pred.cols(); ++c) {
      if (!mask(r, c)) continue;
      const auto a = pred.pixel(r, c);
      const auto b = gt.pixel(r, c);
      for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(double(a[k]) - double(b[k]));
      n += a.size();
    }
  }
  if (n == 0) return {0.0, true};
  return {sum / double(n), false};
}

MaskedLoss masked_bce_mse(const ProbMap& pred, const ProbMap& gt, const BinaryMask& mask) {
  require_same_extent(pred, gt, "masked_bce_mse");
  if (pred.channels() != 1 || gt.channels() != 1) throw ShapeError("masked_bce_mse: expected single-channel maps");
  check_mask(mask, pred.rows(), pred.cols(), "masked_bce_mse");
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < pred.rows(); ++r) {
    for (int c = 0; c < pred.cols(); ++c) {
      if (!mask(r, c)) continue;
      const double p = std::clamp(double(pred(r, c)), kBceEpsilon, 1.0 - kBceEpsilon);
      const double g = gt(r, c);
      sum += -(g * std::log(p) + (1.0 - g) * std::log(1.0 - p)) + (p - g) * (p - g);
      ++n;
    }
  }
  if (n == 0) return {0.0, true};
  return {sum / double(n), false};
}

MaskedLoss masked_ce_dice(const Grid<float>& scores, const ClassMap& gt, const BinaryMask& mask) {
  require_same_extent(scores, gt, "masked_ce_dice");
  check_mask(mask, scores.rows(), scores.cols(), "masked_ce_dice");
  const int n_classes = scores.channels();
  std::vector<double> prob(n_classes), inter(n_classes, 0.0), psum(n_classes, 0.0), gsum(n_classes, 0.0);
  double ce = 0.0;
  std::size_t n = 0;
  for (int r = 0; r < scores.rows(); ++r) {
    for (int c = 0; c < scores.cols(); ++c) {
      if (!mask(r, c)) continue;
      const int label = gt(r, c);
      if (label >= n_classes) throw InvalidParameter("masked_ce_dice: class id out of range");
      const auto s = scores.pixel(r, c);
      const double peak = *std::max_element(s.begin(), s.end());
      double z = 0.0;
      for (int k = 0; k < n_classes; ++k) {
        prob[k] = std::exp(double(s[k]) - peak);
        z += prob[k];
      }
      for (int k = 0; k < n_classes; ++k) {
        prob[k] /= z;
        psum[k] += prob[k];
      }
      ce += -(double(s[label]) - peak - std::log(z));
      inter[label] += prob[label];
      gsum[label] += 1.0;
      ++n;
    }
  }
  if (n == 0) return {0.0, true};
  double dice = 0.0;
  int present = 0;
  for (int k = 0; k < n_classes; ++k) {
    if (gsum[k] == 0.0) continue;
    dice += (2.0 * inter[k] + kDiceSmoothing) / (psum[k] + gsum[k] + kDiceSmoothing);
    ++present;
  }
  return {ce / double(n) + (1.0 - dice / present), false};
}

double combined_loss(double dist_loss, double type_loss, double stardist_loss, const LossWeights& w) {
  if (dist_loss < 0.0 || type_loss < 0.0 || stardist_loss < 0.0) {
    throw InvalidParameter("combined_loss: loss components must be >= 0");
  }
  if (w.dist < 0.0 || w.type < 0.0 || w.stardist < 0.0) {
    throw InvalidParameter("combined_loss: loss weights must be >= 0");
  }
  return w.dist * dist_loss + w.type * type_loss + w.stardist * stardist_loss;
}

}  // namespace pelletseg
