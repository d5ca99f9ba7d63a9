#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pelletseg/geometry.hpp"

using namespace pelletseg;

namespace {

StarPolygon uniform_polygon(Pixel center, int n, float r, float score = 1.0F) {
  StarPolygon p;
  p.center = center;
  p.radii.assign(n, r);
  p.score = score;
  return p;
}

std::set<Pixel> as_set(const PixelMask& m) {
  const auto px = m.pixels();
  return {px.begin(), px.end()};
}

}  // namespace

TEST(RayDirections, FourRaysAreAxisAligned) {
  const RayFan fan = ray_directions(4);
  const std::vector<Point2> expected = {{0, 1}, {1, 0}, {0, -1}, {-1, 0}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(fan.dirs[k].row, expected[k].row, 1e-12);
    EXPECT_NEAR(fan.dirs[k].col, expected[k].col, 1e-12);
  }
}

TEST(RayDirections, ThirtyTwoRaysAreEvenlySpaced) {
  const RayFan fan = ray_directions(32);
  ASSERT_EQ(fan.dirs.size(), 32U);
  for (int k = 1; k < 32; ++k) EXPECT_NEAR((fan.angles[k] - fan.angles[k - 1]) * 180 / std::numbers::pi, 11.25, 1e-12);
}

TEST(RayDirections, RejectsFewerThanThree) {
  EXPECT_THROW(ray_directions(2), InvalidParameter);
  EXPECT_THROW(ray_directions(0), InvalidParameter);
}

TEST(RayDirections, UnitNormAndZeroSum) {
  for (int n = 3; n <= 64; ++n) {
    const RayFan fan = ray_directions(n);
    double sr = 0, sc = 0;
    for (const auto& d : fan.dirs) {
      EXPECT_NEAR(std::hypot(d.row, d.col), 1.0, 1e-12);
      sr += d.row;
      sc += d.col;
    }
    EXPECT_LT(std::hypot(sr, sc), 1e-9) << n;
  }
}

TEST(Rasterize, ZeroRadiiGiveCenterPixel) {
  const RayFan fan = ray_directions(32);
  const PixelMask m = rasterize_polygon(uniform_polygon({7, 9}, 32, 0.0F), fan);
  ASSERT_EQ(m.count(), 1U);
  EXPECT_TRUE(m.contains(7, 9));
}

TEST(Rasterize, FourRayDiamondMatchesBruteForce) {
  const RayFan fan = ray_directions(4);
  const StarPolygon p = uniform_polygon({20, 20}, 4, 5.0F);
  const auto got = as_set(rasterize_polygon(p, fan));
  std::set<Pixel> diamond;
  for (int r = 10; r <= 30; ++r) {
    for (int c = 10; c <= 30; ++c) {
      if (std::abs(r - 20) + std::abs(c - 20) <= 5) diamond.insert({r, c});
    }
  }
  EXPECT_EQ(got, diamond);
  EXPECT_EQ(got, oracle::raster(p.center, p.radii));
}

TEST(Rasterize, DiskAreaCloseToAnalytic) {
  const RayFan fan = ray_directions(32);
  const PixelMask m = rasterize_polygon(uniform_polygon({30, 30}, 32, 10.0F), fan);
  EXPECT_NEAR(static_cast<double>(m.count()), std::numbers::pi * 100, 0.05 * std::numbers::pi * 100);
}

TEST(Rasterize, RandomPolygonsMatchPointInPolygonOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 60; ++t) {
    const int n = 3 + t % 30;
    const RayFan fan = ray_directions(n);
    StarPolygon p;
    p.center = {25, 25};
    for (int k = 0; k < n; ++k) p.radii.push_back(static_cast<float>(1 + 15 * u(rng)));
    EXPECT_EQ(as_set(rasterize_polygon(p, fan)), oracle::raster(p.center, p.radii)) << "case " << t;
  }
}

TEST(Rasterize, TranslationEquivariant) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const RayFan fan = ray_directions(16);
  for (int t = 0; t < 20; ++t) {
    StarPolygon p;
    p.center = {30, 30};
    for (int k = 0; k < 16; ++k) p.radii.push_back(static_cast<float>(3 + 10 * u(rng)));
    StarPolygon q = p;
    const int dr = static_cast<int>(u(rng) * 20) - 10, dc = static_cast<int>(u(rng) * 20) - 10;
    q.center = {30 + dr, 30 + dc};
    std::set<Pixel> shifted;
    for (const auto& px : rasterize_polygon(p, fan).pixels()) shifted.insert({px.row + dr, px.col + dc});
    EXPECT_EQ(as_set(rasterize_polygon(q, fan)), shifted);
  }
}

TEST(Rasterize, ClipsToImageBounds) {
  const RayFan fan = ray_directions(32);
  const PixelMask m = rasterize_polygon(uniform_polygon({0, 0}, 32, 5.0F), fan, {10, 10});
  for (const auto& px : m.pixels()) {
    EXPECT_GE(px.row, 0);
    EXPECT_GE(px.col, 0);
  }
  EXPECT_TRUE(m.contains(0, 0));
  EXPECT_FALSE(m.contains(-1, 0));
}

TEST(PolygonIou, IdentityAndDisjoint) {
  const RayFan fan = ray_directions(32);
  const StarPolygon a = uniform_polygon({20, 20}, 32, 6.0F);
  EXPECT_EQ(polygon_iou(a, a, fan), 1.0);
  EXPECT_EQ(polygon_iou(a, uniform_polygon({80, 80}, 32, 6.0F), fan), 0.0);
}

TEST(PolygonIou, OffsetDisksMatchPixelCount) {
  const RayFan fan = ray_directions(32);
  const StarPolygon a = uniform_polygon({30, 30}, 32, 10.0F);
  const StarPolygon b = uniform_polygon({30, 40}, 32, 10.0F);
  const double ref = oracle::set_iou(oracle::raster(a.center, a.radii), oracle::raster(b.center, b.radii));
  EXPECT_EQ(polygon_iou(a, b, fan), ref);
}

TEST(PolygonIou, Symmetric) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  const RayFan fan = ray_directions(12);
  for (int t = 0; t < 50; ++t) {
    StarPolygon a, b;
    a.center = {20 + int(u(rng) * 10), 20 + int(u(rng) * 10)};
    b.center = {20 + int(u(rng) * 10), 20 + int(u(rng) * 10)};
    for (int k = 0; k < 12; ++k) {
      a.radii.push_back(float(2 + 8 * u(rng)));
      b.radii.push_back(float(2 + 8 * u(rng)));
    }
    EXPECT_EQ(polygon_iou(a, b, fan), polygon_iou(b, a, fan));
  }
}

TEST(TraceContour, SinglePixel) {
  const std::vector<Pixel> px = {{3, 4}};
  const ContourTrace t = trace_contour(PixelMask::from_pixels(px));
  ASSERT_EQ(t.points.size(), 1U);
  EXPECT_EQ(t.points[0], (Pixel{3, 4}));
  EXPECT_FALSE(t.multiple_components);
}

TEST(TraceContour, SquareBorderClockwise) {
  std::vector<Pixel> px;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) px.push_back({r, c});
  }
  const ContourTrace t = trace_contour(PixelMask::from_pixels(px));
  const std::vector<Pixel> expected = {{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}};
  EXPECT_EQ(t.points, expected);
}

TEST(TraceContour, EmptyMaskThrows) { EXPECT_THROW(trace_contour(PixelMask{}), EmptyInput); }

TEST(TraceContour, FlagsMultipleComponents) {
  const std::vector<Pixel> px = {{0, 0}, {0, 1}, {5, 5}};
  const ContourTrace t = trace_contour(PixelMask::from_pixels(px));
  EXPECT_TRUE(t.multiple_components);
  for (const auto& p : t.points) EXPECT_LT(p.row, 2);
}

TEST(TraceContour, RandomBlobBoundarySetAndAdjacency) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 30; ++t) {
    // Star-convex blob from a random polygon raster, so it is one component.
    const int n = 8;
    StarPolygon p;
    p.center = {20, 20};
    for (int k = 0; k < n; ++k) p.radii.push_back(float(3 + 10 * u(rng)));
    const PixelMask mask = rasterize_polygon(p, ray_directions(n));
    const ContourTrace tr = trace_contour(mask);
    std::set<Pixel> expected;
    for (const auto& px : mask.pixels()) {
      const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        if (!mask.contains(px.row + dr[k], px.col + dc[k])) expected.insert(px);
      }
    }
    const std::set<Pixel> got(tr.points.begin(), tr.points.end());
    EXPECT_EQ(got, expected) << "case " << t;
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
      const Pixel a = tr.points[i], b = tr.points[(i + 1) % tr.points.size()];
      EXPECT_LE(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)), 1);
    }
  }
}

TEST(MinEnclosingCircle, TrivialCases) {
  const std::vector<Point2> one = {{3.5, -2}};
  const Circle c1 = min_enclosing_circle(one);
  EXPECT_EQ(c1.radius, 0.0);
  EXPECT_EQ(c1.center.row, 3.5);
  const std::vector<Point2> two = {{0, 0}, {0, 4}};
  const Circle c2 = min_enclosing_circle(two);
  EXPECT_NEAR(c2.center.row, 0, 1e-12);
  EXPECT_NEAR(c2.center.col, 2, 1e-12);
  EXPECT_NEAR(c2.radius, 2, 1e-12);
  EXPECT_THROW(min_enclosing_circle(std::vector<Point2>{}), EmptyInput);
}

TEST(MinEnclosingCircle, EquilateralTriangle) {
  const double s = 7.0;
  const std::vector<Point2> tri = {{0, 0}, {0, s}, {s * std::sqrt(3.0) / 2, s / 2}};
  EXPECT_NEAR(min_enclosing_circle(tri).radius, s / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(oracle::min_enclosing_radius(tri), s / std::sqrt(3.0), 1e-9);
}

TEST(MinEnclosingCircle, BoundsAgainstPairwiseDistances) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int t = 0; t < 200; ++t) {
    std::vector<Point2> pts(2 + t % 20);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const Circle c = min_enclosing_circle(pts);
    double dmax = 0, cr = 0, cc = 0;
    for (const auto& p : pts) {
      cr += p.row / pts.size();
      cc += p.col / pts.size();
      for (const auto& q : pts) dmax = std::max(dmax, std::hypot(p.row - q.row, p.col - q.col));
    }
    double far = 0;
    for (const auto& p : pts) far = std::max(far, std::hypot(p.row - cr, p.col - cc));
    EXPECT_GE(c.radius, dmax / 2 - 1e-9);
    EXPECT_LE(c.radius, far + dmax / 2 + 1e-9);
    EXPECT_NEAR(c.radius, oracle::min_enclosing_radius(pts), 1e-9);
  }
}
