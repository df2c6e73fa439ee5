#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "awing/types.hpp"

namespace awing {

inline constexpr double kDefaultMaskThreshold = 0.2;
inline constexpr double kDefaultMapWeight = 10.0;

/// Per-channel 3×3 neighborhood maximum. The window is clipped at the frame
/// edge, so a corner pixel takes the max over 4 cells.
inline HeatmapStack gray_dilate_3x3(const HeatmapStack& gt) {
  HeatmapStack out(gt.channels(), gt.frame(), gt.has_boundary_channel());
  const std::size_t h = gt.height();
  const std::size_t w = gt.width();
  // Separable: row max followed by column max.
  std::vector<double> rows(gt.frame().area());
  for (std::size_t c = 0; c < gt.channels(); ++c) {
    auto src = gt.channel(c);
    for (std::size_t r = 0; r < h; ++r) {
      const double* in = src.data() + r * w;
      double* tmp = rows.data() + r * w;
      for (std::size_t x = 0; x < w; ++x) {
        double m = in[x];
        if (x > 0) m = std::max(m, in[x - 1]);
        if (x + 1 < w) m = std::max(m, in[x + 1]);
        tmp[x] = m;
      }
    }
    auto dst = out.channel(c);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t x = 0; x < w; ++x) {
        double m = rows[r * w + x];
        if (r > 0) m = std::max(m, rows[(r - 1) * w + x]);
        if (r + 1 < h) m = std::max(m, rows[(r + 1) * w + x]);
        dst[r * w + x] = m;
      }
    }
  }
  return out;
}

/// Binary C×H×W mask marking foreground and difficult-background pixels,
/// together with the scalar weight W applied as (W·M + 1).
class WeightMask {
 public:
  WeightMask() = default;
  WeightMask(std::size_t channels, Frame frame, double weight)
      : channels_(channels), frame_(frame), weight_(weight), bits_(channels * frame.area(), 0) {
    if (!(weight > 0.0)) throw DomainError("weight map scalar must be positive");
  }

  std::size_t channels() const noexcept { return channels_; }
  Frame frame() const noexcept { return frame_; }
  double weight() const noexcept { return weight_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool on) { bits_[i] = on ? 1 : 0; }
  bool at(std::size_t c, std::size_t row, std::size_t col) const {
    return bits_[(c * frame_.height + row) * frame_.width + col] != 0;
  }

  std::size_t support() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  /// Per-pixel multiplier W·M + 1.
  double multiplier(std::size_t i) const { return bits_[i] ? weight_ + 1.0 : 1.0; }

  /// Mask as a 0/1 stack, e.g. for dumping.
  HeatmapStack as_stack() const {
    HeatmapStack s(channels_, frame_);
    auto v = s.values();
    for (std::size_t i = 0; i < bits_.size(); ++i) v[i] = bits_[i] ? 1.0 : 0.0;
    return s;
  }

  /// W·M + 1 as a stack.
  HeatmapStack multiplier_stack() const {
    HeatmapStack s(channels_, frame_);
    auto v = s.values();
    for (std::size_t i = 0; i < bits_.size(); ++i) v[i] = multiplier(i);
    return s;
  }

 private:
  std::size_t channels_ = 0;
  Frame frame_{};
  double weight_ = kDefaultMapWeight;
  std::vector<std::uint8_t> bits_;
};

inline WeightMask build_mask(const HeatmapStack& gt, double weight = kDefaultMapWeight,
                             double threshold = kDefaultMaskThreshold) {
  WeightMask mask(gt.channels(), gt.frame(), weight);
  const HeatmapStack dilated = gray_dilate_3x3(gt);
  auto d = dilated.values();
  for (std::size_t i = 0; i < d.size(); ++i) mask.set(i, d[i] >= threshold);
  return mask;
}

struct WeightedLoss {
  HeatmapStack values;
  double mean = 0.0;
};

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

/// out = loss ⊗ (W·M + 1), then the mean over every element.
inline WeightedLoss apply_weighted_loss(const HeatmapStack& loss_grid, const WeightMask& mask) {
  if (loss_grid.channels() != mask.channels() || loss_grid.frame() != mask.frame()) {
    throw ShapeError("loss grid and weight mask differ in shape");
  }
  WeightedLoss out{HeatmapStack(loss_grid.channels(), loss_grid.frame(), loss_grid.has_boundary_channel()), 0.0};
  auto src = loss_grid.values();
  auto dst = out.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * mask.multiplier(i);
  out.mean = mean_of(dst);
  return out;
}

/// Continuous multiplier gt·W + 1 with no dilation or threshold.
inline HeatmapStack baseline_weight_map(const HeatmapStack& gt, double weight = kDefaultMapWeight) {
  if (!(weight > 0.0)) throw DomainError("weight map scalar must be positive");
  HeatmapStack out(gt.channels(), gt.frame(), gt.has_boundary_channel());
  auto src = gt.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * weight + 1.0;
  return out;
}

/// Elementwise loss ⊗ multiplier followed by the mean; pairs with
/// baseline_weight_map or WeightMask::multiplier_stack.
inline WeightedLoss apply_weight_map(const HeatmapStack& loss_grid, const HeatmapStack& multiplier) {
  require_same_shape(loss_grid, multiplier, "apply_weight_map");
  WeightedLoss out{HeatmapStack(loss_grid.channels(), loss_grid.frame(), loss_grid.has_boundary_channel()), 0.0};
  auto src = loss_grid.values();
  auto m = multiplier.values();
  auto dst = out.values.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * m[i];
  out.mean = mean_of(dst);
  return out;
}

}  // namespace awing
