#include "pelletseg/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pelletseg/labels.hpp"

namespace pelletseg {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// Felzenszwalb-Huttenlocher squared distance transform of a sampled function.
void squared_edt_1d(std::span<const double> f, std::span<double> d, std::vector<int>& v,
                    std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;  // z[0] is -inf, so k never drops below 0
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), inf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

}  // namespace

DistanceMaps star_distances(const LabelMap& labels, const RayFan& fan) {
  const int rows = labels.rows();
  const int cols = labels.cols();
  DistanceMaps out(rows, cols, fan.n_rays, 0.0F);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Label id = labels(r, c);
      if (id == 0) continue;
      auto dst = out.pixel(r, c);
      for (int k = 0; k < fan.n_rays; ++k) {
        const double dr = fan.dirs[k].row;
        const double dc = fan.dirs[k].col;
        int t = 1;
        while (true) {
          const int qr = round_half_up(r + t * dr);
          const int qc = round_half_up(c + t * dc);
          if (!labels.in_bounds(qr, qc) || labels(qr, qc) != id) break;
          ++t;
        }
        dst[k] = static_cast<float>(t - 1);
      }
    }
  }
  return out;
}

Grid<double> boundary_distance(const LabelMap& labels) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Grid<double> out(labels.rows(), labels.cols(), 1, 0.0);
  std::vector<double> f, col_in, col_out, z;
  std::vector<int> v;
  for (const auto& [id, ext] : instance_extents(labels)) {
    // A one-pixel ring around the tight box is entirely non-member, so the
    // nearest non-member of any member always lies inside the padded box.
    const int r0 = ext.box.row0 - 1;
    const int c0 = ext.box.col0 - 1;
    const int h = ext.box.row1 - ext.box.row0 + 3;
    const int w = ext.box.col1 - ext.box.col0 + 3;
    f.assign(static_cast<std::size_t>(h) * w, 0.0);
    for (int i = 1; i < h - 1; ++i) {
      for (int j = 1; j < w - 1; ++j) {
        if (labels(r0 + i, c0 + j) == id) f[static_cast<std::size_t>(i) * w + j] = inf;
      }
    }
    col_in.resize(h);
    col_out.resize(h);
    for (int j = 0; j < w; ++j) {
      for (int i = 0; i < h; ++i) col_in[i] = f[static_cast<std::size_t>(i) * w + j];
      squared_edt_1d(col_in, col_out, v, z);
      for (int i = 0; i < h; ++i) f[static_cast<std::size_t>(i) * w + j] = col_out[i];
    }
    std::vector<double> row_out(w);
    for (int i = 1; i < h - 1; ++i) {
      std::span<const double> row_in(f.data() + static_cast<std::size_t>(i) * w, w);
      squared_edt_1d(row_in, row_out, v, z);
      for (int j = 1; j < w - 1; ++j) {
        if (labels(r0 + i, c0 + j) == id) out(r0 + i, c0 + j) = std::sqrt(row_out[j]);
      }
    }
  }
  return out;
}

ProbMap object_probability(const LabelMap& labels) {
  const Grid<double> dist = boundary_distance(labels);
  ProbMap out(labels.rows(), labels.cols(), 1, 0.0F);
  for (const auto& [id, ext] : instance_extents(labels)) {
    const Box& b = ext.box;
    double peak = 0.0;
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        if (labels(r, c) == id) peak = std::max(peak, dist(r, c));
      }
    }
    for (int r = b.row0; r <= b.row1; ++r) {
      for (int c = b.col0; c <= b.col1; ++c) {
        if (labels(r, c) == id) out(r, c) = static_cast<float>(dist(r, c) / peak);
      }
    }
  }
  return out;
}

LabelMap expand_labels(const LabelMap& labels, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("expand_labels: radius must be finite and >= 0");
  }
  LabelMap out = labels;
  const int reach = static_cast<int>(std::floor(radius));
  if (reach == 0) return out;  // no lattice offset lies within a radius below 1

  // Offsets within the disk, grouped by squared distance.
  struct Offset {
    int d2, dr, dc;
  };
  std::vector<Offset> offsets;
  const double r2 = radius * radius;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const int d2 = dr * dr + dc * dc;
      if (d2 > 0 && static_cast<double>(d2) <= r2) offsets.push_back({d2, dr, dc});
    }
  }
  std::sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) { return a.d2 < b.d2; });

  for (int r = 0; r < labels.rows(); ++r) {
    for (int c = 0; c < labels.cols(); ++c) {
      if (labels(r, c) != 0) continue;
      Label best = 0;
      std::size_t i = 0;
      while (i < offsets.size() && best == 0) {
        const int d2 = offsets[i].d2;
        for (; i < offsets.size() && offsets[i].d2 == d2; ++i) {
          const int qr = r + offsets[i].dr;
          const int qc = c + offsets[i].dc;
          if (!labels.in_bounds(qr, qc)) continue;
          const Label id = labels(qr, qc);
          if (id != 0 && (best == 0 || id < best)) best = id;
        }
      }
      out(r, c) = best;
    }
  }
  return out;
}

Grid<float> one_hot_types(const Grid<std::uint8_t>& classes, int n_classes) {
  if (n_classes < 1) throw InvalidParameter("one_hot_types: n_classes must be >= 1");
  Grid<float> out(classes.rows(), classes.cols(), n_classes, 0.0F);
  for (int r = 0; r < classes.rows(); ++r) {
    for (int c = 0; c < classes.cols(); ++c) {
      const int k = classes(r, c);
      if (k >= n_classes) {
        throw InvalidParameter("one_hot_types: class id " + std::to_string(k) + " out of range");
      }
      out(r, c, k) = 1.0F;
    }
  }
  return out;
}

}  // namespace pelletseg
