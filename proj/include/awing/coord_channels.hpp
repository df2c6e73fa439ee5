#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "awing/types.hpp"

namespace awing {

inline constexpr double kBoundaryCoordThreshold = 0.05;

/// Coordinate planes appended to features before a convolution.
/// cx, cy in [-1, 1]; radius is 0 at the frame center and 1 at the corners;
/// bx, by are cx, cy restricted to pixels the boundary prediction marks.
struct CoordChannels {
  Grid cx;
  Grid cy;
  Grid radius;
  Grid bx;
  Grid by;

  Frame frame() const noexcept { return cx.frame(); }
};

inline CoordChannels make_xy_radius(Frame frame) {
  if (frame.height < 2 || frame.width < 2) {
    throw DomainError("coordinate channels need at least 2 pixels per axis, got " + to_string(frame));
  }
  CoordChannels out{Grid(frame), Grid(frame), Grid(frame), Grid(frame), Grid(frame)};
  const double sx = 2.0 / static_cast<double>(frame.width - 1);
  const double sy = 2.0 / static_cast<double>(frame.height - 1);
  const double root2 = std::sqrt(2.0);
  for (std::size_t r = 0; r < frame.height; ++r) {
    const double y = static_cast<double>(r) * sy - 1.0;
    for (std::size_t c = 0; c < frame.width; ++c) {
      const double x = static_cast<double>(c) * sx - 1.0;
      out.cx(r, c) = x;
      out.cy(r, c) = y;
      out.radius(r, c) = std::sqrt(x * x + y * y) / root2;
    }
  }
  return out;
}

/// Fills bx, by: cx, cy where boundary_pred >= threshold, 0 elsewhere.
inline CoordChannels mask_boundary_coords(CoordChannels coords, const Grid& boundary_pred,
                                          double threshold = kBoundaryCoordThreshold) {
  if (boundary_pred.frame() != coords.frame()) {
    throw ShapeError("boundary prediction " + to_string(boundary_pred.frame()) + " != coordinate frame " +
                     to_string(coords.frame()));
  }
  auto b = boundary_pred.values();
  auto cx = coords.cx.values();
  auto cy = coords.cy.values();
  auto bx = coords.bx.values();
  auto by = coords.by.values();
  for (std::size_t i = 0; i < b.size(); ++i) {
    const bool on = b[i] >= threshold;
    bx[i] = on ? cx[i] : 0.0;
    by[i] = on ? cy[i] : 0.0;
  }
  return coords;
}

/// Which coordinate planes to append. Appended in the order cx, cy, radius, bx, by.
struct CoordSelection {
  bool cx = false;
  bool cy = false;
  bool radius = false;
  bool bx = false;
  bool by = false;

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(cx) + static_cast<std::size_t>(cy) + static_cast<std::size_t>(radius) +
           static_cast<std::size_t>(bx) + static_cast<std::size_t>(by);
  }
  bool any() const noexcept { return count() > 0; }
  bool needs_boundary() const noexcept { return bx || by; }

  static CoordSelection none() { return {}; }
  static CoordSelection xy_radius() { return {true, true, true, false, false}; }
  static CoordSelection all() { return {true, true, true, true, true}; }

  friend bool operator==(const CoordSelection&, const CoordSelection&) = default;
};

/// Parses a comma-separated subset of {cx, cy, radius, bx, by}, or "none"/"all".
inline CoordSelection parse_coord_selection(std::string_view text) {
  CoordSelection sel;
  if (text.empty() || text == "none") return sel;
  if (text == "all") return CoordSelection::all();
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string_view tok = text.substr(start, end - start);
    if (tok == "cx") sel.cx = true;
    else if (tok == "cy") sel.cy = true;
    else if (tok == "radius") sel.radius = true;
    else if (tok == "bx") sel.bx = true;
    else if (tok == "by") sel.by = true;
    else throw ParseError("unknown coordinate channel '" + std::string(tok) + "'");
    start = end + 1;
  }
  return sel;
}

inline std::string to_string(const CoordSelection& s) {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(s.cx, "cx");
  add(s.cy, "cy");
  add(s.radius, "radius");
  add(s.bx, "bx");
  add(s.by, "by");
  return out.empty() ? "none" : out;
}

inline HeatmapStack concat_channels(const HeatmapStack& input, const CoordChannels& coords, CoordSelection selection) {
  if (selection.any() && coords.frame() != input.frame()) {
    throw ShapeError("coordinate channels " + to_string(coords.frame()) + " != input " + to_string(input.frame()));
  }
  if (!selection.any()) return input;
  HeatmapStack out(input.channels() + selection.count(), input.frame());
  auto src = input.values();
  std::copy(src.begin(), src.end(), out.values().begin());
  std::size_t next = input.channels();
  auto append = [&](bool on, const Grid& g) {
    if (on) out.set_channel(next++, g);
  };
  append(selection.cx, coords.cx);
  append(selection.cy, coords.cy);
  append(selection.radius, coords.radius);
  append(selection.bx, coords.bx);
  append(selection.by, coords.by);
  return out;
}

}  // namespace awing
