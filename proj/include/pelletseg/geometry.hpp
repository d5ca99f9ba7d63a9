#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pelletseg/grid.hpp"

namespace pelletseg {

/// Evenly spaced ray directions. Ray 0 points along +columns and angles grow
/// toward +rows, i.e. clockwise on screen.
struct RayFan {
  int n_rays = 0;
  std::vector<double> angles;
  std::vector<Point2> dirs;  // (sin, cos) in (row, col)
};

RayFan ray_directions(int n_rays);

struct StarPolygon {
  Pixel center;
  std::vector<float> radii;
  float score = 1.0F;
  int class_id = 0;
};

struct Circle {
  Point2 center;
  double radius = 0.0;
};

struct Box {
  int row0 = 0;
  int col0 = 0;
  int row1 = -1;  // inclusive
  int col1 = -1;

  bool empty() const { return row1 < row0 || col1 < col0; }
  bool intersects(const Box& o) const {
    return !(o.row0 > row1 || o.row1 < row0 || o.col0 > col1 || o.col1 < col0);
  }
};

// Clip window for rasterization; the default is effectively unbounded.
struct ClipBounds {
  int rows = std::numeric_limits<int>::max() / 4;
  int cols = std::numeric_limits<int>::max() / 4;
};

/// Run-length raster: inclusive column intervals, ordered by row then column,
/// disjoint and non-adjacent within a row.
struct SpanRaster {
  struct Span {
    int row;
    int col0;
    int col1;
  };
  std::vector<Span> spans;

  std::size_t area() const;
  Box bounds() const;
};

/// Tight bit mask of member pixels, stored relative to its bounding box origin.
class PixelMask {
 public:
  PixelMask() = default;
  PixelMask(int row0, int col0, int rows, int cols);

  static PixelMask from_pixels(std::span<const Pixel> pixels);
  static PixelMask from_raster(const SpanRaster& raster);

  int row0() const { return row0_; }
  int col0() const { return col0_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return count_ == 0; }
  std::size_t count() const { return count_; }

  bool contains(int r, int c) const;
  bool contains(Pixel p) const { return contains(p.row, p.col); }
  void set(int r, int c);
  std::vector<Pixel> pixels() const;

 private:
  int row0_ = 0;
  int col0_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> bits_;
};

std::vector<Point2> polygon_vertices(const StarPolygon& poly, const RayFan& fan);

/// Vertex bounding box, snapped inward to pixel centers.
Box polygon_bounds(const StarPolygon& poly, const RayFan& fan);

/// Pixels whose centers lie inside the closed star polygon (even-odd rule,
/// centers exactly on an edge count as inside).
SpanRaster rasterize_spans(const StarPolygon& poly, const RayFan& fan, ClipBounds clip = {});
PixelMask rasterize_polygon(const StarPolygon& poly, const RayFan& fan, ClipBounds clip = {});

std::size_t raster_intersection(const SpanRaster& a, const SpanRaster& b);
double polygon_iou(const StarPolygon& a, const StarPolygon& b, const RayFan& fan);

struct ContourTrace {
  std::vector<Pixel> points;
  bool multiple_components = false;
};

/// Moore-neighbor outer boundary trace, clockwise from the top-most then
/// left-most pixel. The returned cycle is implicitly closed.
ContourTrace trace_contour(const PixelMask& mask);

Circle min_enclosing_circle(std::span<const Point2> points);

}  // namespace pelletseg
