#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "awing/loss_map.hpp"
#include "awing/types.hpp"

namespace awing {

/// Truncated Gaussian used to render one landmark.
struct GaussianSpec {
  std::size_t size = 7;  ///< odd side length of the square support
  double sigma = 1.0;
  /// false: the Gaussian is centered on the rounded pixel (peak exactly 1).
  /// true: centered on the true sub-pixel position, sampled at pixel centers.
  bool subpixel = false;

  void validate() const {
    if (size == 0 || size % 2 == 0) throw DomainError("Gaussian support must be odd, got " + std::to_string(size));
    if (!(sigma > 0.0)) throw DomainError("Gaussian sigma must be positive");
  }
};

enum class FramePolicy { Reject, Clamp };

/// Nearest pixel index with ties toward the larger index, clamped into [0, extent).
inline std::size_t nearest_pixel(double v, std::size_t extent) {
  const double r = std::floor(v + 0.5);
  if (r <= 0.0) return 0;
  const auto idx = static_cast<std::size_t>(r);
  return std::min(idx, extent - 1);
}

namespace detail {

inline void splat_gaussian(std::span<double> plane, Frame frame, double x, double y, const GaussianSpec& kernel) {
  const std::size_t cx = nearest_pixel(x, frame.width);
  const std::size_t cy = nearest_pixel(y, frame.height);
  const double mx = kernel.subpixel ? x : static_cast<double>(cx);
  const double my = kernel.subpixel ? y : static_cast<double>(cy);
  const auto half = static_cast<std::ptrdiff_t>(kernel.size / 2);
  const double denom = 2.0 * kernel.sigma * kernel.sigma;
  for (std::ptrdiff_t dy = -half; dy <= half; ++dy) {
    const std::ptrdiff_t r = static_cast<std::ptrdiff_t>(cy) + dy;
    if (r < 0 || r >= static_cast<std::ptrdiff_t>(frame.height)) continue;
    for (std::ptrdiff_t dx = -half; dx <= half; ++dx) {
      const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(cx) + dx;
      if (c < 0 || c >= static_cast<std::ptrdiff_t>(frame.width)) continue;
      const double ex = static_cast<double>(c) - mx;
      const double ey = static_cast<double>(r) - my;
      const double v = std::exp(-(ex * ex + ey * ey) / denom);
      double& dst = plane[static_cast<std::size_t>(r) * frame.width + static_cast<std::size_t>(c)];
      dst = std::max(dst, v);
    }
  }
}

}  // namespace detail

/// One channel per landmark. Unlabeled points leave their channel at zero.
inline HeatmapStack render_heatmap(const LandmarkSet& landmarks, Frame frame, const GaussianSpec& kernel = {},
                                   FramePolicy policy = FramePolicy::Reject) {
  kernel.validate();
  if (frame.area() == 0) throw DomainError("cannot render into an empty frame");
  HeatmapStack out(landmarks.size(), frame);
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    if (!landmarks.is_labeled(i)) continue;
    double x = landmarks[i].x;
    double y = landmarks[i].y;
    if (!frame.contains(x, y)) {
      if (policy == FramePolicy::Reject) {
        throw OutOfFrameError("landmark " + std::to_string(i) + " outside render frame " + to_string(frame));
      }
      x = std::clamp(x, 0.0, static_cast<double>(frame.width - 1));
      y = std::clamp(y, 0.0, static_cast<double>(frame.height - 1));
    }
    detail::splat_gaussian(out.channel(i), frame, x, y, kernel);
  }
  return out;
}

struct DecodedLandmarks {
  LandmarkSet landmarks;
  /// Per channel: the channel was all zero and the frame center was returned.
  std::vector<bool> degenerate;

  bool any_degenerate() const { return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end(); }
};

namespace detail {

/// +0.25 toward the larger axis neighbor; 0 if they tie or either is off-frame.
inline double quarter_shift(std::span<const double> plane, std::size_t stride, std::size_t idx, std::size_t pos,
                            std::size_t extent) {
  if (pos == 0 || pos + 1 >= extent) return 0.0;
  const double lo = plane[idx - stride];
  const double hi = plane[idx + stride];
  if (hi > lo) return 0.25;
  if (lo > hi) return -0.25;
  return 0.0;
}

}  // namespace detail

/// Argmax per landmark channel refined by a quarter pixel toward the second
/// highest 4-neighbor, independently per axis. The boundary channel, if
/// present, is not decoded.
inline DecodedLandmarks decode_landmarks(const HeatmapStack& pred) {
  if (pred.landmark_channels() == 0) throw ShapeError("decode needs at least one landmark channel");
  const Frame frame = pred.frame();
  std::vector<Point> points;
  std::vector<bool> degenerate;
  points.reserve(pred.landmark_channels());
  for (std::size_t c = 0; c < pred.landmark_channels(); ++c) {
    auto plane = pred.channel(c);
    const bool all_zero = std::all_of(plane.begin(), plane.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
      points.push_back({(static_cast<double>(frame.width) - 1.0) / 2.0, (static_cast<double>(frame.height) - 1.0) / 2.0});
      degenerate.push_back(true);
      continue;
    }
    const auto best = static_cast<std::size_t>(std::max_element(plane.begin(), plane.end()) - plane.begin());
    const std::size_t row = best / frame.width;
    const std::size_t col = best % frame.width;
    const double dx = detail::quarter_shift(plane, 1, best, col, frame.width);
    const double dy = detail::quarter_shift(plane, frame.width, best, row, frame.height);
    points.push_back({static_cast<double>(col) + dx, static_cast<double>(row) + dy});
    degenerate.push_back(false);
  }
  return {LandmarkSet(frame, std::move(points)), std::move(degenerate)};
}

/// Plain argmax without refinement; the baseline the quarter-pixel rule improves on.
inline Point argmax_location(std::span<const double> plane, Frame frame) {
  const auto best = static_cast<std::size_t>(std::max_element(plane.begin(), plane.end()) - plane.begin());
  return {static_cast<double>(best % frame.width), static_cast<double>(best / frame.width)};
}

enum class PixelClass : std::uint8_t { Background = 0, DifficultBackground = 1, Foreground = 2 };

class PixelClassMap {
 public:
  PixelClassMap(std::size_t channels, Frame frame)
      : channels_(channels), frame_(frame), classes_(channels * frame.area(), PixelClass::Background) {}

  std::size_t channels() const noexcept { return channels_; }
  Frame frame() const noexcept { return frame_; }
  PixelClass operator[](std::size_t i) const { return classes_[i]; }
  PixelClass at(std::size_t c, std::size_t row, std::size_t col) const {
    return classes_[(c * frame_.height + row) * frame_.width + col];
  }
  void set(std::size_t i, PixelClass k) { classes_[i] = k; }

  std::size_t count(std::size_t c, PixelClass k) const {
    auto begin = classes_.begin() + static_cast<std::ptrdiff_t>(c * frame_.area());
    return static_cast<std::size_t>(std::count(begin, begin + static_cast<std::ptrdiff_t>(frame_.area()), k));
  }

 private:
  std::size_t channels_;
  Frame frame_;
  std::vector<PixelClass> classes_;
};

/// Foreground where gt > 0; difficult background where gt = 0 but the 3×3
/// dilation is positive; background elsewhere.
inline PixelClassMap classify_pixels(const HeatmapStack& gt) {
  PixelClassMap out(gt.channels(), gt.frame());
  const HeatmapStack dilated = gray_dilate_3x3(gt);
  auto g = gt.values();
  auto d = dilated.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0) {
      out.set(i, PixelClass::Foreground);
    } else if (d[i] > 0.0) {
      out.set(i, PixelClass::DifficultBackground);
    }
  }
  return out;
}

}  // namespace awing
