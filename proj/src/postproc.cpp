#include "pelletseg/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace pelletseg {

void PredictionMaps::validate(const RayFan& fan) const {
  if (prob.channels() != 1) throw ShapeError("prediction maps: probability map must have one channel");
  require_same_extent(prob, dist, "prediction maps (prob vs dist)");
  require_same_extent(prob, type_scores, "prediction maps (prob vs type)");
  if (dist.channels() != fan.n_rays) {
    throw ShapeError("prediction maps: distance map has " + std::to_string(dist.channels()) +
                     " rays but the configured fan has " + std::to_string(fan.n_rays));
  }
}

CandidateSet extract_candidates(const PredictionMaps& maps, const RayFan& fan, double prob_threshold,
                                int stride) {
  if (!(prob_threshold >= 0.0 && prob_threshold <= 1.0)) {
    throw InvalidParameter("extract_candidates: prob_threshold must lie in [0, 1]");
  }
  if (stride < 1) throw InvalidParameter("extract_candidates: stride must be >= 1");
  maps.validate(fan);

  CandidateSet out;
  const int n_classes = maps.n_classes();
  for (int r = 0; r < maps.rows(); r += stride) {
    for (int c = 0; c < maps.cols(); c += stride) {
      const float p = maps.prob(r, c);
      if (!(p >= prob_threshold)) continue;
      StarPolygon poly;
      poly.center = {r, c};
      const auto d = maps.dist.pixel(r, c);
      poly.radii.assign(d.begin(), d.end());
      poly.score = p;
      if (n_classes > 1) {
        const auto t = maps.type_scores.pixel(r, c);
        int best = 1;
        for (int k = 2; k < n_classes; ++k) {
          if (t[k] > t[best]) best = k;
        }
        poly.class_id = best;
      }
      out.polygons.push_back(std::move(poly));
    }
  }
  // Row-major generation order plus a stable sort gives the tie rule.
  std::stable_sort(out.polygons.begin(), out.polygons.end(),
                   [](const StarPolygon& a, const StarPolygon& b) { return a.score > b.score; });
  return out;
}

std::vector<StarPolygon> nms(const CandidateSet& candidates, const RayFan& fan, double iou_threshold) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw InvalidParameter("nms: iou_threshold must lie in [0, 1]");
  }
  struct Kept {
    SpanRaster raster;
    Box box;
    std::size_t area;
  };
  std::vector<Kept> kept;
  std::vector<StarPolygon> out;
  for (const auto& cand : candidates.polygons) {
    const Box cand_box = polygon_bounds(cand, fan);
    SpanRaster raster;
    bool rastered = false;
    bool suppressed = false;
    for (const auto& k : kept) {
      if (!k.box.intersects(cand_box)) continue;
      if (!rastered) {
        raster = rasterize_spans(cand, fan);
        rastered = true;
      }
      const std::size_t inter = raster_intersection(raster, k.raster);
      const std::size_t uni = raster.area() + k.area - inter;
      const double iou = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
      if (iou > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (suppressed) continue;
    if (!rastered) raster = rasterize_spans(cand, fan);
    const std::size_t area = raster.area();
    const Box box = raster.bounds();
    kept.push_back({std::move(raster), box, area});
    out.push_back(cand);
  }
  return out;
}

InstanceMap render_instance_map(std::span<const StarPolygon> kept, const RayFan& fan, int rows, int cols) {
  InstanceMap out;
  out.labels = LabelMap(rows, cols, 1, 0);
  out.records.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Label id = static_cast<Label>(i + 1);
    // Earlier polygons score higher, so they keep contested pixels.
    for (const auto& s : rasterize_spans(kept[i], fan, {rows, cols}).spans) {
      for (int c = s.col0; c <= s.col1; ++c) {
        if (out.labels(s.row, c) == 0) out.labels(s.row, c) = id;
      }
    }
    out.records.push_back({id, kept[i].score, kept[i].class_id});
  }
  return out;
}

InstanceMap postprocess(const PredictionMaps& maps, const RayFan& fan, const PostprocessParams& params) {
  const auto candidates = extract_candidates(maps, fan, params.prob_threshold, params.stride);
  const auto kept = nms(candidates, fan, params.nms_threshold);
  return render_instance_map(kept, fan, maps.rows(), maps.cols());
}

// ---------------------------------------------------------------------------
// Tiling

namespace {

double tent(int i, int n) {
  if (n == 1) return 1.0;
  return 1.0 - std::abs(2.0 * i - (n - 1)) / (n - 1);
}

std::vector<int> tile_positions(int extent, int tile, int stride) {
  std::vector<int> pos;
  if (tile >= extent) return {0};
  for (int p = 0; p + tile < extent; p += stride) pos.push_back(p);
  pos.push_back(extent - tile);
  return pos;
}

}  // namespace

Grid<double> pyramid_weight_map(int tile_h, int tile_w, double floor) {
  if (tile_h < 1 || tile_w < 1) throw InvalidParameter("pyramid_weight_map: tile dimensions must be >= 1");
  if (!(floor > 0.0 && floor <= 1.0)) throw InvalidParameter("pyramid_weight_map: floor must lie in (0, 1]");
  Grid<double> w(tile_h, tile_w, 1, 0.0);
  for (int r = 0; r < tile_h; ++r) {
    const double wr = tent(r, tile_h);
    for (int c = 0; c < tile_w; ++c) w(r, c) = std::max(floor, wr * tent(c, tile_w));
  }
  return w;
}

TileLayout make_tile_layout(int rows, int cols, int tile_h, int tile_w, int stride, double weight_floor) {
  if (rows < 1 || cols < 1 || tile_h < 1 || tile_w < 1) {
    throw InvalidParameter("make_tile_layout: image and tile dimensions must be >= 1");
  }
  if (stride < 1 || stride > std::min(tile_h, tile_w)) {
    throw InvalidParameter("make_tile_layout: stride must lie in [1, min(tile_h, tile_w)]");
  }
  TileLayout layout;
  layout.tile_h = std::min(tile_h, rows);
  layout.tile_w = std::min(tile_w, cols);
  layout.stride = stride;
  layout.weight_floor = weight_floor;
  for (int r : tile_positions(rows, layout.tile_h, stride)) {
    for (int c : tile_positions(cols, layout.tile_w, stride)) layout.offsets.push_back({r, c});
  }
  return layout;
}

PredictionMaps crop_maps(const PredictionMaps& maps, Pixel offset, int tile_h, int tile_w) {
  if (offset.row < 0 || offset.col < 0 || offset.row + tile_h > maps.rows() ||
      offset.col + tile_w > maps.cols()) {
    throw InvalidParameter("crop_maps: crop window exceeds the maps");
  }
  auto crop = [&](const Grid<float>& g) {
    Grid<float> out(tile_h, tile_w, g.channels());
    for (int r = 0; r < tile_h; ++r) {
      for (int c = 0; c < tile_w; ++c) {
        const auto src = g.pixel(offset.row + r, offset.col + c);
        std::copy(src.begin(), src.end(), out.pixel(r, c).begin());
      }
    }
    return out;
  };
  return {crop(maps.prob), crop(maps.dist), crop(maps.type_scores)};
}

PredictionMaps blend_tiles(std::span<const Tile> tiles, const TileLayout& layout, int rows, int cols) {
  if (tiles.empty()) throw CoverageError("blend_tiles: no tiles, pixel (0, 0) is not covered");
  const int n_rays = tiles[0].maps.n_rays();
  const int n_classes = tiles[0].maps.n_classes();
  for (const auto& t : tiles) {
    if (std::find(layout.offsets.begin(), layout.offsets.end(), t.offset) == layout.offsets.end()) {
      throw InvalidParameter("blend_tiles: tile offset (" + std::to_string(t.offset.row) + ", " +
                             std::to_string(t.offset.col) + ") is not part of the layout");
    }
    if (t.offset.row + t.maps.rows() > rows || t.offset.col + t.maps.cols() > cols) {
      throw InvalidParameter("blend_tiles: tile extends past the image");
    }
    if (t.maps.n_rays() != n_rays || t.maps.n_classes() != n_classes || t.maps.prob.channels() != 1 ||
        !t.maps.prob.same_extent(t.maps.dist) || !t.maps.prob.same_extent(t.maps.type_scores)) {
      throw ShapeError("blend_tiles: tiles disagree on map shapes");
    }
  }

  // A canonical accumulation order makes the result independent of input order.
  std::vector<std::size_t> order(tiles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tiles[a].offset != tiles[b].offset) return tiles[a].offset < tiles[b].offset;
    return a < b;
  });

  std::map<std::pair<int, int>, Grid<double>> weights;
  auto weight_for = [&](const PredictionMaps& m) -> const Grid<double>& {
    auto key = std::make_pair(m.rows(), m.cols());
    auto it = weights.find(key);
    if (it == weights.end()) {
      it = weights.emplace(key, pyramid_weight_map(m.rows(), m.cols(), layout.weight_floor)).first;
    }
    return it->second;
  };

  PredictionMaps out{ProbMap(rows, cols, 1), DistanceMaps(rows, cols, n_rays), Grid<float>(rows, cols, n_classes)};
  const int channels = 1 + n_rays + n_classes;
  constexpr int kBand = 64;
  std::vector<double> acc, wsum;
  std::vector<int> count, sole;
  for (int band0 = 0; band0 < rows; band0 += kBand) {
    const int band1 = std::min(rows, band0 + kBand);
    const std::size_t band_px = static_cast<std::size_t>(band1 - band0) * cols;
    acc.assign(band_px * channels, 0.0);
    wsum.assign(band_px, 0.0);
    count.assign(band_px, 0);
    sole.assign(band_px, -1);
    for (std::size_t ti : order) {
      const Tile& t = tiles[ti];
      const int r_lo = std::max(band0, t.offset.row);
      const int r_hi = std::min(band1, t.offset.row + t.maps.rows());
      if (r_lo >= r_hi) continue;
      const Grid<double>& w = weight_for(t.maps);
      for (int r = r_lo; r < r_hi; ++r) {
        const int lr = r - t.offset.row;
        for (int lc = 0; lc < t.maps.cols(); ++lc) {
          const int c = t.offset.col + lc;
          const std::size_t px = static_cast<std::size_t>(r - band0) * cols + c;
          const double wt = w(lr, lc);
          double* a = acc.data() + px * channels;
          a[0] += wt * t.maps.prob(lr, lc);
          const auto d = t.maps.dist.pixel(lr, lc);
          for (int k = 0; k < n_rays; ++k) a[1 + k] += wt * d[k];
          const auto ty = t.maps.type_scores.pixel(lr, lc);
          for (int k = 0; k < n_classes; ++k) a[1 + n_rays + k] += wt * ty[k];
          wsum[px] += wt;
          ++count[px];
          sole[px] = static_cast<int>(ti);
        }
      }
    }
    for (int r = band0; r < band1; ++r) {
      for (int c = 0; c < cols; ++c) {
        const std::size_t px = static_cast<std::size_t>(r - band0) * cols + c;
        if (count[px] == 0) {
          throw CoverageError("blend_tiles: pixel (" + std::to_string(r) + ", " + std::to_string(c) +
                              ") is not covered by any tile");
        }
        if (count[px] == 1) {
          const Tile& t = tiles[sole[px]];
          const int lr = r - t.offset.row;
          const int lc = c - t.offset.col;
          out.prob(r, c) = t.maps.prob(lr, lc);
          std::ranges::copy(t.maps.dist.pixel(lr, lc), out.dist.pixel(r, c).begin());
          std::ranges::copy(t.maps.type_scores.pixel(lr, lc), out.type_scores.pixel(r, c).begin());
          continue;
        }
        const double* a = acc.data() + px * channels;
        const double total = wsum[px];
        out.prob(r, c) = static_cast<float>(a[0] / total);
        for (int k = 0; k < n_rays; ++k) out.dist(r, c, k) = static_cast<float>(a[1 + k] / total);
        for (int k = 0; k < n_classes; ++k) out.type_scores(r, c, k) = static_cast<float>(a[1 + n_rays + k] / total);
      }
    }
  }
  return out;
}

}  // namespace pelletseg
