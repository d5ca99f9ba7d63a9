#include "pelletseg/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pelletseg {

RayFan ray_directions(int n_rays) {
  if (n_rays < 3) {
    throw InvalidParameter("ray_directions: n_rays must be >= 3, got " + std::to_string(n_rays));
  }
  RayFan fan;
  fan.n_rays = n_rays;
  fan.angles.resize(n_rays);
  fan.dirs.resize(n_rays);
  for (int k = 0; k < n_rays; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_rays;
    fan.angles[k] = theta;
    fan.dirs[k] = {std::sin(theta), std::cos(theta)};
  }
  return fan;
}

// ---------------------------------------------------------------------------
// SpanRaster / PixelMask

std::size_t SpanRaster::area() const {
  std::size_t n = 0;
  for (const auto& s : spans) n += static_cast<std::size_t>(s.col1 - s.col0 + 1);
  return n;
}

Box SpanRaster::bounds() const {
  if (spans.empty()) return {};
  Box b{spans.front().row, spans.front().col0, spans.back().row, spans.front().col1};
  for (const auto& s : spans) {
    b.col0 = std::min(b.col0, s.col0);
    b.col1 = std::max(b.col1, s.col1);
  }
  return b;
}

PixelMask::PixelMask(int row0, int col0, int rows, int cols)
    : row0_(row0), col0_(col0), rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw InvalidParameter("PixelMask: negative extent");
  bits_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

PixelMask PixelMask::from_pixels(std::span<const Pixel> pixels) {
  if (pixels.empty()) return {};
  Box b{pixels[0].row, pixels[0].col, pixels[0].row, pixels[0].col};
  for (const auto& p : pixels) {
    b.row0 = std::min(b.row0, p.row);
    b.row1 = std::max(b.row1, p.row);
    b.col0 = std::min(b.col0, p.col);
    b.col1 = std::max(b.col1, p.col);
  }
  PixelMask m(b.row0, b.col0, b.row1 - b.row0 + 1, b.col1 - b.col0 + 1);
  for (const auto& p : pixels) m.set(p.row, p.col);
  return m;
}

PixelMask PixelMask::from_raster(const SpanRaster& raster) {
  if (raster.spans.empty()) return {};
  const Box b = raster.bounds();
  PixelMask m(b.row0, b.col0, b.row1 - b.row0 + 1, b.col1 - b.col0 + 1);
  for (const auto& s : raster.spans) {
    for (int c = s.col0; c <= s.col1; ++c) m.set(s.row, c);
  }
  return m;
}

bool PixelMask::contains(int r, int c) const {
  const int lr = r - row0_;
  const int lc = c - col0_;
  if (lr < 0 || lc < 0 || lr >= rows_ || lc >= cols_) return false;
  return bits_[static_cast<std::size_t>(lr) * cols_ + lc] != 0;
}

void PixelMask::set(int r, int c) {
  const int lr = r - row0_;
  const int lc = c - col0_;
  if (lr < 0 || lc < 0 || lr >= rows_ || lc >= cols_) {
    throw InvalidParameter("PixelMask::set: pixel outside mask extent");
  }
  auto& bit = bits_[static_cast<std::size_t>(lr) * cols_ + lc];
  if (bit == 0) {
    bit = 1;
    ++count_;
  }
}

std::vector<Pixel> PixelMask::pixels() const {
  std::vector<Pixel> out;
  out.reserve(count_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (bits_[static_cast<std::size_t>(r) * cols_ + c]) out.push_back({row0_ + r, col0_ + c});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rasterization

namespace {

// Trig noise can leave an axis-aligned vertex a few ulps off a pixel center,
// which would flip the closed-boundary test.
double snap(double x) {
  const double n = std::nearbyint(x);
  return std::abs(x - n) < 1e-9 ? n : x;
}

}  // namespace

std::vector<Point2> polygon_vertices(const StarPolygon& poly, const RayFan& fan) {
  if (static_cast<int>(poly.radii.size()) != fan.n_rays) {
    throw InvalidParameter("star polygon has " + std::to_string(poly.radii.size()) +
                           " radii but the ray fan has " + std::to_string(fan.n_rays));
  }
  std::vector<Point2> v(fan.n_rays);
  for (int k = 0; k < fan.n_rays; ++k) {
    const double r = poly.radii[k];
    v[k] = {snap(poly.center.row + r * fan.dirs[k].row), snap(poly.center.col + r * fan.dirs[k].col)};
  }
  return v;
}

namespace {

Box vertex_bounds(std::span<const Point2> v) {
  double rmin = v[0].row, rmax = v[0].row, cmin = v[0].col, cmax = v[0].col;
  for (const auto& p : v) {
    rmin = std::min(rmin, p.row);
    rmax = std::max(rmax, p.row);
    cmin = std::min(cmin, p.col);
    cmax = std::max(cmax, p.col);
  }
  return {static_cast<int>(std::ceil(rmin)), static_cast<int>(std::ceil(cmin)),
          static_cast<int>(std::floor(rmax)), static_cast<int>(std::floor(cmax))};
}

bool is_integral(double x) { return std::floor(x) == x; }

}  // namespace

Box polygon_bounds(const StarPolygon& poly, const RayFan& fan) {
  const auto v = polygon_vertices(poly, fan);
  return vertex_bounds(v);
}

SpanRaster rasterize_spans(const StarPolygon& poly, const RayFan& fan, ClipBounds clip) {
  const auto v = polygon_vertices(poly, fan);
  for (float r : poly.radii) {
    if (!std::isfinite(r) || r < 0.0F) throw InvalidParameter("rasterize: radii must be finite and >= 0");
  }
  SpanRaster out;
  const Box b = vertex_bounds(v);
  const int row_lo = std::max(b.row0, 0);
  const int row_hi = std::min(b.row1, clip.rows - 1);
  const int col_hi = clip.cols - 1;
  const std::size_t n = v.size();

  std::vector<double> xs;
  std::vector<std::pair<int, int>> runs;
  for (int y = row_lo; y <= row_hi; ++y) {
    xs.clear();
    runs.clear();
    const double fy = y;
    for (std::size_t k = 0; k < n; ++k) {
      const Point2& a = v[k];
      const Point2& e = v[(k + 1) % n];
      if ((a.row <= fy && fy < e.row) || (e.row <= fy && fy < a.row)) {
        xs.push_back(a.col + (fy - a.row) * (e.col - a.col) / (e.row - a.row));
      } else if (a.row == fy && e.row == fy) {
        const double lo = std::min(a.col, e.col);
        const double hi = std::max(a.col, e.col);
        runs.emplace_back(static_cast<int>(std::ceil(lo)), static_cast<int>(std::floor(hi)));
      }
      // Vertices on this row are on the boundary even when no edge crossing is counted.
      if (a.row == fy && is_integral(a.col)) {
        const int c = static_cast<int>(a.col);
        runs.emplace_back(c, c);
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      runs.emplace_back(static_cast<int>(std::ceil(xs[i])), static_cast<int>(std::floor(xs[i + 1])));
    }
    std::sort(runs.begin(), runs.end());
    bool open = false;
    SpanRaster::Span cur{y, 0, -1};
    for (auto [c0, c1] : runs) {
      c0 = std::max(c0, 0);
      c1 = std::min(c1, col_hi);
      if (c1 < c0) continue;
      if (open && c0 <= cur.col1 + 1) {
        cur.col1 = std::max(cur.col1, c1);
      } else {
        if (open) out.spans.push_back(cur);
        cur = {y, c0, c1};
        open = true;
      }
    }
    if (open) out.spans.push_back(cur);
  }
  return out;
}

PixelMask rasterize_polygon(const StarPolygon& poly, const RayFan& fan, ClipBounds clip) {
  return PixelMask::from_raster(rasterize_spans(poly, fan, clip));
}

std::size_t raster_intersection(const SpanRaster& a, const SpanRaster& b) {
  std::size_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < a.spans.size() && j < b.spans.size()) {
    const auto& sa = a.spans[i];
    const auto& sb = b.spans[j];
    if (sa.row < sb.row) {
      ++i;
    } else if (sb.row < sa.row) {
      ++j;
    } else {
      const int lo = std::max(sa.col0, sb.col0);
      const int hi = std::min(sa.col1, sb.col1);
      if (hi >= lo) inter += static_cast<std::size_t>(hi - lo + 1);
      if (sa.col1 < sb.col1) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  return inter;
}

double polygon_iou(const StarPolygon& a, const StarPolygon& b, const RayFan& fan) {
  const auto ra = rasterize_spans(a, fan);
  const auto rb = rasterize_spans(b, fan);
  const std::size_t inter = raster_intersection(ra, rb);
  const std::size_t uni = ra.area() + rb.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// Contour tracing

namespace {

// Moore neighborhood, clockwise on screen starting from west.
constexpr std::array<Pixel, 8> kMoore = {{{0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}}};

int moore_index(int dr, int dc) {
  for (int i = 0; i < 8; ++i) {
    if (kMoore[i].row == dr && kMoore[i].col == dc) return i;
  }
  return -1;
}

std::size_t component_size(const PixelMask& mask, Pixel start) {
  PixelMask seen(mask.row0(), mask.col0(), mask.rows(), mask.cols());
  std::vector<Pixel> stack{start};
  seen.set(start.row, start.col);
  std::size_t n = 0;
  while (!stack.empty()) {
    const Pixel p = stack.back();
    stack.pop_back();
    ++n;
    for (const auto& d : kMoore) {
      const Pixel q{p.row + d.row, p.col + d.col};
      if (mask.contains(q) && !seen.contains(q)) {
        seen.set(q.row, q.col);
        stack.push_back(q);
      }
    }
  }
  return n;
}

}  // namespace

ContourTrace trace_contour(const PixelMask& mask) {
  if (mask.empty()) throw EmptyInput("trace_contour: empty mask");

  Pixel start{};
  bool found = false;
  for (int r = 0; r < mask.rows() && !found; ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      if (mask.contains(mask.row0() + r, mask.col0() + c)) {
        start = {mask.row0() + r, mask.col0() + c};
        found = true;
        break;
      }
    }
  }

  ContourTrace out;
  out.multiple_components = component_size(mask, start) != mask.count();
  out.points.push_back(start);

  Pixel p = start;
  int back = 0;  // west of the start pixel is outside the mask
  bool have_first = false;
  Pixel first_next{};
  // Upper bound on steps: every pixel can be entered from at most 4 directions.
  const std::size_t max_steps = 4 * mask.count() + 8;
  for (std::size_t step = 0; step < max_steps; ++step) {
    int dir = -1;
    for (int i = 1; i <= 8; ++i) {
      const int d = (back + i) % 8;
      if (mask.contains(p.row + kMoore[d].row, p.col + kMoore[d].col)) {
        dir = d;
        break;
      }
    }
    if (dir < 0) return out;  // isolated pixel

    const Pixel q{p.row + kMoore[dir].row, p.col + kMoore[dir].col};
    if (!have_first) {
      first_next = q;
      have_first = true;
    } else if (p == start && q == first_next) {
      out.points.pop_back();  // drop the repeated start pixel
      return out;
    }
    const Pixel b{p.row + kMoore[(dir + 7) % 8].row, p.col + kMoore[(dir + 7) % 8].col};
    back = moore_index(b.row - q.row, b.col - q.col);
    p = q;
    out.points.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimum enclosing circle (randomized incremental)

namespace {

constexpr double kContainEps = 1e-10;

bool covers(const Circle& c, const Point2& p) {
  return std::hypot(p.row - c.center.row, p.col - c.center.col) <= c.radius + kContainEps;
}

Circle circle_from(const Point2& a, const Point2& b) {
  const Point2 m{(a.row + b.row) / 2.0, (a.col + b.col) / 2.0};
  return {m, std::hypot(a.row - b.row, a.col - b.col) / 2.0};
}

Circle circle_from(const Point2& a, const Point2& b, const Point2& c) {
  const double bx = b.col - a.col, by = b.row - a.row;
  const double cx = c.col - a.col, cy = c.row - a.row;
  const double d = 2.0 * (bx * cy - by * cx);
  if (std::abs(d) < 1e-14) {
    Circle best = circle_from(a, b);
    for (const Circle& cand : {circle_from(a, c), circle_from(b, c)}) {
      if (cand.radius > best.radius) best = cand;
    }
    return best;
  }
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {{a.row + uy, a.col + ux}, std::hypot(ux, uy)};
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Circle min_enclosing_circle(std::span<const Point2> points) {
  if (points.empty()) throw EmptyInput("min_enclosing_circle: no points");
  std::vector<Point2> p(points.begin(), points.end());
  // Fixed-seed shuffle keeps the result a pure function of the input.
  std::uint64_t state = 0x243F6A8885A308D3ULL;
  for (std::size_t i = p.size(); i > 1; --i) {
    std::swap(p[i - 1], p[splitmix64(state) % i]);
  }

  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (covers(c, p[i])) continue;
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (covers(c, p[j])) continue;
      c = circle_from(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!covers(c, p[k])) c = circle_from(p[i], p[j], p[k]);
      }
    }
  }
  return c;
}

}  // namespace pelletseg
