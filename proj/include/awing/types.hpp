#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "awing/error.hpp"

namespace awing {

/// Height and width of a pixel grid. Pixel (row, col) has its center at the
/// continuous coordinate (x = col, y = row).
struct Frame {
  std::size_t height = 0;
  std::size_t width = 0;

  constexpr std::size_t area() const noexcept { return height * width; }
  constexpr bool contains(double x, double y) const noexcept {
    return x >= 0.0 && y >= 0.0 && x < static_cast<double>(width) && y < static_cast<double>(height);
  }
  friend constexpr bool operator==(const Frame&, const Frame&) = default;
};

inline std::string to_string(const Frame& f) {
  return std::to_string(f.height) + "x" + std::to_string(f.width);
}

/// Single H×W plane of doubles, row-major.
class Grid {
 public:
  Grid() = default;
  explicit Grid(Frame frame, double fill = 0.0) : frame_(frame), data_(frame.area(), fill) {}

  Frame frame() const noexcept { return frame_; }
  std::size_t height() const noexcept { return frame_.height; }
  std::size_t width() const noexcept { return frame_.width; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t row, std::size_t col) { return data_[row * frame_.width + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * frame_.width + col]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Frame frame_{};
  std::vector<double> data_;
};

/// C×H×W stack of planes. Used for ground-truth and predicted heatmaps as
/// well as for generic feature grids. Ground-truth producers keep every
/// value in [0, 1]; predictions are not constrained.
class HeatmapStack {
 public:
  HeatmapStack() = default;
  HeatmapStack(std::size_t channels, Frame frame, bool has_boundary_channel = false)
      : channels_(channels),
        frame_(frame),
        has_boundary_channel_(has_boundary_channel),
        data_(channels * frame.area(), 0.0) {
    if (has_boundary_channel && channels == 0) {
      throw ShapeError("boundary channel requested on an empty stack");
    }
  }

  std::size_t channels() const noexcept { return channels_; }
  Frame frame() const noexcept { return frame_; }
  std::size_t height() const noexcept { return frame_.height; }
  std::size_t width() const noexcept { return frame_.width; }
  std::size_t size() const noexcept { return data_.size(); }
  bool has_boundary_channel() const noexcept { return has_boundary_channel_; }
  /// Channels that carry one landmark each (the boundary channel, if any, is last).
  std::size_t landmark_channels() const noexcept { return channels_ - (has_boundary_channel_ ? 1 : 0); }

  double& operator()(std::size_t c, std::size_t row, std::size_t col) {
    return data_[(c * frame_.height + row) * frame_.width + col];
  }
  double operator()(std::size_t c, std::size_t row, std::size_t col) const {
    return data_[(c * frame_.height + row) * frame_.width + col];
  }

  std::span<double> channel(std::size_t c) { return std::span<double>(data_).subspan(c * frame_.area(), frame_.area()); }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * frame_.area(), frame_.area());
  }

  Grid channel_grid(std::size_t c) const {
    Grid g(frame_);
    auto src = channel(c);
    std::copy(src.begin(), src.end(), g.values().begin());
    return g;
  }

  void set_channel(std::size_t c, const Grid& g) {
    if (g.frame() != frame_) throw ShapeError("channel frame " + to_string(g.frame()) + " != " + to_string(frame_));
    auto dst = channel(c);
    std::copy(g.values().begin(), g.values().end(), dst.begin());
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const HeatmapStack& other) const noexcept {
    return channels_ == other.channels_ && frame_ == other.frame_;
  }

  /// True when every value lies in [0, 1].
  bool is_normalized() const noexcept {
    for (double v : data_) {
      if (!(v >= 0.0 && v <= 1.0)) return false;
    }
    return true;
  }

  friend bool operator==(const HeatmapStack&, const HeatmapStack&) = default;

 private:
  std::size_t channels_ = 0;
  Frame frame_{};
  bool has_boundary_channel_ = false;
  std::vector<double> data_;
};

inline void require_same_shape(const HeatmapStack& a, const HeatmapStack& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + std::to_string(a.channels()) + "x" + to_string(a.frame()) +
                     " != " + std::to_string(b.channels()) + "x" + to_string(b.frame()));
  }
}

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Point&, const Point&) = default;
};

/// Annotation state per point, numbered as in the annotation file format.
enum class Visibility : std::uint8_t { Unlabeled = 0, Occluded = 1, Visible = 2 };

/// Ordered, fixed-size set of 2D landmarks in the pixel coordinates of a
/// frame. Visible points are guaranteed to lie inside the frame.
class LandmarkSet {
 public:
  LandmarkSet() = default;
  LandmarkSet(Frame frame, std::vector<Point> points, std::vector<Visibility> visibility = {})
      : frame_(frame), points_(std::move(points)), visibility_(std::move(visibility)) {
    if (visibility_.empty()) visibility_.assign(points_.size(), Visibility::Visible);
    if (visibility_.size() != points_.size()) {
      throw ShapeError("visibility count " + std::to_string(visibility_.size()) + " != point count " +
                       std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (visibility_[i] == Visibility::Visible && !frame_.contains(points_[i].x, points_[i].y)) {
        throw OutOfFrameError("landmark " + std::to_string(i) + " at (" + std::to_string(points_[i].x) + ", " +
                              std::to_string(points_[i].y) + ") outside frame " + to_string(frame_));
      }
    }
  }

  Frame frame() const noexcept { return frame_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const noexcept { return points_; }
  Visibility visibility(std::size_t i) const { return visibility_[i]; }
  std::span<const Visibility> visibilities() const noexcept { return visibility_; }
  bool is_labeled(std::size_t i) const { return visibility_[i] != Visibility::Unlabeled; }

  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;

 private:
  Frame frame_{};
  std::vector<Point> points_;
  std::vector<Visibility> visibility_;
};

}  // namespace awing
