#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "awing/heatmap_codec.hpp"
#include "awing/types.hpp"

namespace awing {

/// One boundary polyline through landmark indices; closed polylines also
/// join the last index back to the first.
struct BoundarySegment {
  std::vector<std::size_t> indices;
  bool closed = false;

  friend bool operator==(const BoundarySegment&, const BoundarySegment&) = default;
};

struct BoundarySchema {
  std::vector<BoundarySegment> segments;

  void validate(std::size_t landmark_count) const {
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto& seg = segments[s];
      if (seg.indices.size() < 2) throw DomainError("boundary segment " + std::to_string(s) + " has fewer than 2 points");
      for (std::size_t idx : seg.indices) {
        if (idx >= landmark_count) {
          throw DomainError("boundary segment " + std::to_string(s) + " references landmark " + std::to_string(idx) +
                            " of " + std::to_string(landmark_count));
        }
      }
    }
  }

  friend bool operator==(const BoundarySchema&, const BoundarySchema&) = default;
};

/// Schema for the 5-point synthetic face (0 left eye, 1 right eye, 2 nose,
/// 3 left mouth corner, 4 right mouth corner): eye line, nose-mouth chevron, lip line.
inline BoundarySchema five_point_schema() {
  return BoundarySchema{{{{0, 1}, false}, {{3, 2, 4}, false}, {{3, 4}, false}}};
}

/// One segment per non-empty line: "open|closed i j k ...". '#' starts a comment.
inline BoundarySchema parse_boundary_schema(std::istream& in) {
  BoundarySchema schema;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string flag;
    if (!(ss >> flag)) continue;
    BoundarySegment seg;
    if (flag == "closed") {
      seg.closed = true;
    } else if (flag != "open") {
      throw ParseError("schema line " + std::to_string(lineno) + ": expected open|closed, got '" + flag + "'");
    }
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || tok.front() == '-') {
        throw ParseError("schema line " + std::to_string(lineno) + ": bad landmark index '" + tok + "'");
      }
      seg.indices.push_back(v);
    }
    schema.segments.push_back(std::move(seg));
  }
  return schema;
}

inline std::string format_boundary_schema(const BoundarySchema& schema) {
  std::string out;
  for (const auto& seg : schema.segments) {
    out += seg.closed ? "closed" : "open";
    for (std::size_t i : seg.indices) out += " " + std::to_string(i);
    out += '\n';
  }
  return out;
}

/// Sets the pixels of the straight segment a→b, sampled at unit steps along
/// the major axis and rounded to the nearest pixel.
inline void rasterize_line(Grid& grid, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::max(std::abs(dx), std::abs(dy)))));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps);
    const std::size_t col = nearest_pixel(a.x + t * dx, grid.width());
    const std::size_t row = nearest_pixel(a.y + t * dy, grid.height());
    grid(row, col) = 1.0;
  }
}

struct BoundaryRaster {
  Grid grid;
  std::vector<std::string> warnings;
};

/// Binary raster of one segment; empty (with a warning) if any of its
/// landmarks is not visible.
inline BoundaryRaster rasterize_segment(const LandmarkSet& landmarks, const BoundarySegment& seg, Frame frame) {
  BoundaryRaster out{Grid(frame), {}};
  for (std::size_t idx : seg.indices) {
    if (landmarks.visibility(idx) != Visibility::Visible) {
      out.warnings.push_back("boundary segment skipped: landmark " + std::to_string(idx) + " is not visible");
      return out;
    }
  }
  for (std::size_t k = 0; k + 1 < seg.indices.size(); ++k) {
    rasterize_line(out.grid, landmarks[seg.indices[k]], landmarks[seg.indices[k + 1]]);
  }
  if (seg.closed && seg.indices.size() > 2) {
    rasterize_line(out.grid, landmarks[seg.indices.back()], landmarks[seg.indices.front()]);
  }
  return out;
}

inline BoundaryRaster rasterize_boundary(const LandmarkSet& landmarks, const BoundarySchema& schema, Frame frame) {
  schema.validate(landmarks.size());
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    if (landmarks.visibility(i) == Visibility::Visible && !frame.contains(landmarks[i].x, landmarks[i].y)) {
      throw OutOfFrameError("landmark " + std::to_string(i) + " outside boundary frame " + to_string(frame));
    }
  }
  BoundaryRaster out{Grid(frame), {}};
  for (const auto& seg : schema.segments) {
    auto part = rasterize_segment(landmarks, seg, frame);
    auto dst = out.grid.values();
    auto src = part.grid.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
    out.warnings.insert(out.warnings.end(), part.warnings.begin(), part.warnings.end());
  }
  return out;
}

namespace detail {

/// Exact 1D squared distance transform (lower envelope of parabolas) over
/// `f`, where +inf marks cells with no site.
inline void squared_edt_1d(const double* f, std::size_t n, std::size_t stride, double* out, std::vector<std::size_t>& v,
                           std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.clear();
  z.clear();
  for (std::size_t q = 0; q < n; ++q) {
    const double fq = f[q * stride];
    if (fq == inf) continue;
    const double qd = static_cast<double>(q);
    while (!v.empty()) {
      const double p = static_cast<double>(v.back());
      const double s = ((fq + qd * qd) - (f[v.back() * stride] + p * p)) / (2.0 * qd - 2.0 * p);
      if (s <= z.back()) {
        v.pop_back();
        z.pop_back();
      } else {
        v.push_back(q);
        z.push_back(s);
        break;
      }
    }
    if (v.empty()) {
      v.push_back(q);
      z.push_back(-inf);
    }
  }
  if (v.empty()) {
    for (std::size_t q = 0; q < n; ++q) out[q * stride] = inf;
    return;
  }
  std::size_t k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double qd = static_cast<double>(q);
    while (k + 1 < v.size() && z[k + 1] < qd) ++k;
    const double d = qd - static_cast<double>(v[k]);
    out[q * stride] = d * d + f[v[k] * stride];
  }
}

}  // namespace detail

/// Squared Euclidean distance from every pixel to the nearest nonzero pixel
/// of `raster`; +inf everywhere if the raster is empty.
inline Grid squared_distance_transform(const Grid& raster) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t h = raster.height();
  const std::size_t w = raster.width();
  Grid f(raster.frame());
  auto src = raster.values();
  auto fv = f.values();
  for (std::size_t i = 0; i < src.size(); ++i) fv[i] = src[i] != 0.0 ? 0.0 : inf;

  Grid cols(raster.frame());
  std::vector<std::size_t> v;
  std::vector<double> z;
  v.reserve(std::max(h, w));
  z.reserve(std::max(h, w));
  for (std::size_t c = 0; c < w; ++c) {
    detail::squared_edt_1d(fv.data() + c, h, w, cols.values().data() + c, v, z);
  }
  Grid out(raster.frame());
  for (std::size_t r = 0; r < h; ++r) {
    detail::squared_edt_1d(cols.values().data() + r * w, w, 1, out.values().data() + r * w, v, z);
  }
  return out;
}

inline constexpr double kDefaultBoundarySigma = 1.0;

/// exp(-D²/(2σ²)) of the distance D to the raster, cut to 0 beyond D = 3σ.
inline Grid boundary_heatmap(const Grid& raster, double sigma = kDefaultBoundarySigma) {
  if (!(sigma > 0.0)) throw DomainError("boundary sigma must be positive");
  const Grid d2 = squared_distance_transform(raster);
  Grid out(raster.frame());
  const double cutoff2 = 9.0 * sigma * sigma;
  const double denom = 2.0 * sigma * sigma;
  auto src = d2.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] > cutoff2 ? 0.0 : std::exp(-src[i] / denom);
  }
  return out;
}

/// Pixelwise maximum; an empty list yields an all-zero grid of `frame`.
inline Grid merge_boundaries(std::span<const Grid> per_segment, Frame frame) {
  Grid out(frame);
  auto dst = out.values();
  for (const auto& g : per_segment) {
    if (g.frame() != frame) throw ShapeError("boundary grid " + to_string(g.frame()) + " != " + to_string(frame));
    auto src = g.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

/// Full boundary channel: one heatmap per segment, merged by maximum.
inline BoundaryRaster boundary_channel(const LandmarkSet& landmarks, const BoundarySchema& schema, Frame frame,
                                       double sigma = kDefaultBoundarySigma) {
  schema.validate(landmarks.size());
  std::vector<Grid> parts;
  std::vector<std::string> warnings;
  for (const auto& seg : schema.segments) {
    auto raster = rasterize_segment(landmarks, seg, frame);
    warnings.insert(warnings.end(), raster.warnings.begin(), raster.warnings.end());
    parts.push_back(boundary_heatmap(raster.grid, sigma));
  }
  return {merge_boundaries(parts, frame), std::move(warnings)};
}

/// Landmark heatmaps plus the merged boundary channel as the last channel.
inline HeatmapStack render_with_boundary(const LandmarkSet& landmarks, const BoundarySchema& schema, Frame frame,
                                         const GaussianSpec& kernel = {}, double boundary_sigma = kDefaultBoundarySigma,
                                         FramePolicy policy = FramePolicy::Reject) {
  const HeatmapStack marks = render_heatmap(landmarks, frame, kernel, policy);
  HeatmapStack out(marks.channels() + 1, frame, true);
  std::copy(marks.values().begin(), marks.values().end(), out.values().begin());
  out.set_channel(marks.channels(), boundary_channel(landmarks, schema, frame, boundary_sigma).grid);
  return out;
}

}  // namespace awing
