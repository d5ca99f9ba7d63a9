#include <algorithm>
#include <cmath>
#include <limits>

#include "pelletseg/dataset.hpp"

namespace pelletseg {

ClassFractions class_pixel_fractions(const ClassMap& classes) {
  ClassFractions f{};
  const auto data = classes.data();
  if (data.empty()) return f;
  std::array<std::size_t, kNumClasses> counts{};
  for (std::uint8_t v : data) {
    if (v >= kNumClasses) throw InvalidParameter("class_pixel_fractions: class id out of range");
    ++counts[v];
  }
  for (int k = 0; k < kNumClasses; ++k) f[k] = double(counts[k]) / double(data.size());
  return f;
}

double wasserstein2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptyInput("wasserstein2_1d: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  double total = 0.0;
  if (n == m) {
    for (std::size_t i = 0; i < n; ++i) total += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(total / double(n));
  }
  // Walk the merged quantile breakpoints i/n and j/m; compare via integer
  // cross-multiplication so equal breakpoints are detected exactly.
  std::size_t i = 0, j = 0;
  double u = 0.0;
  while (i < n && j < m) {
    const std::size_t lhs = (i + 1) * m;
    const std::size_t rhs = (j + 1) * n;
    const double next = lhs <= rhs ? double(i + 1) / double(n) : double(j + 1) / double(m);
    const double diff = x[i] - y[j];
    total += (next - u) * diff * diff;
    u = next;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
  return std::sqrt(total);
}

double split_objective(std::span<const ImageStats> stats, const std::vector<char>& is_test,
                       std::array<double, kNumClasses>* per_class) {
  double worst = 0.0;
  std::vector<double> train, test;
  for (int k = 1; k < kNumClasses; ++k) {
    train.clear();
    test.clear();
    for (std::size_t i = 0; i < stats.size(); ++i) {
      (is_test[i] ? test : train).push_back(stats[i].fractions[k]);
    }
    const double d = wasserstein2_1d(train, test);
    if (per_class) (*per_class)[k] = d;
    worst = std::max(worst, d);
  }
  return worst;
}

std::size_t test_count(std::size_t n, double test_fraction) {
  const auto k = static_cast<long long>(std::llround(test_fraction * double(n)));
  return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(n) - 1));
}

namespace {

// Number of k-subsets of n, saturating at `cap`.
std::size_t binomial_capped(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * double(n - k + i) / double(i);
    if (c > double(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(c));
}

// Enumerates all k-subsets of {0..n-1} as membership vectors in lexicographic order.
std::vector<std::vector<char>> all_partitions(std::size_t n, std::size_t k) {
  std::vector<std::vector<char>> out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<char> mask(n, 0);
    for (std::size_t i : idx) mask[i] = 1;
    out.push_back(std::move(mask));
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

double refine_by_swaps(std::span<const ImageStats> stats, std::vector<char>& is_test) {
  double best = split_objective(stats, is_test);
  while (best > 0.0) {
    double candidate = best;
    std::size_t swap_a = 0, swap_b = 0;
    for (std::size_t a = 0; a < is_test.size(); ++a) {
      if (is_test[a]) continue;
      for (std::size_t b = 0; b < is_test.size(); ++b) {
        if (!is_test[b]) continue;
        std::swap(is_test[a], is_test[b]);
        const double obj = split_objective(stats, is_test);
        std::swap(is_test[a], is_test[b]);
        if (obj < candidate) {
          candidate = obj;
          swap_a = a;
          swap_b = b;
        }
      }
    }
    if (!(candidate < best)) break;
    std::swap(is_test[swap_a], is_test[swap_b]);
    best = candidate;
  }
  return best;
}

}  // namespace

SplitAssignment split_dataset(std::span<const ImageStats> stats, double test_fraction, int restarts,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidParameter("split_dataset: test_fraction must lie in (0, 1)");
  }
  if (stats.size() < 2) throw InvalidParameter("split_dataset: need at least two images");
  if (restarts < 1) throw InvalidParameter("split_dataset: restarts must be >= 1");
  const std::size_t n = stats.size();
  const std::size_t k = test_count(n, test_fraction);

  std::vector<std::vector<char>> starts;
  if (binomial_capped(n, k, static_cast<std::size_t>(restarts)) <= static_cast<std::size_t>(restarts)) {
    starts = all_partitions(n, k);
  } else {
    SplitMix64 rng(seed);
    std::vector<std::size_t> order(n);
    for (int r = 0; r < restarts; ++r) {
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
      std::vector<char> mask(n, 0);
      for (std::size_t i = 0; i < k; ++i) mask[order[i]] = 1;
      starts.push_back(std::move(mask));
    }
  }

  SplitAssignment out;
  out.objective = std::numeric_limits<double>::infinity();
  std::vector<char> best_mask;
  for (auto& mask : starts) {
    out.start_objectives.push_back(split_objective(stats, mask));
    const double obj = refine_by_swaps(stats, mask);
    out.restart_objectives.push_back(obj);
    if (obj < out.objective) {
      out.objective = obj;
      best_mask = mask;
    }
  }
  split_objective(stats, best_mask, &out.class_distance);
  for (std::size_t i = 0; i < n; ++i) (best_mask[i] ? out.test : out.train).push_back(stats[i].id);
  return out;
}

}  // namespace pelletseg
