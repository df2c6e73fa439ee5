#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "awing/boundary.hpp"
#include "awing/heatmap_codec.hpp"
#include "awing/types.hpp"

namespace awing::trainer {

/// Canonical 5-point face on a 64×64 frame: left eye, right eye, nose,
/// left mouth corner, right mouth corner, as offsets from the frame center.
inline constexpr std::array<Point, 5> kFaceTemplate{{{-10.0, -8.0}, {10.0, -8.0}, {0.0, 3.0}, {-8.0, 12.0}, {8.0, 12.0}}};

/// Blob appearance per landmark so each point is locally identifiable.
inline constexpr std::array<double, 5> kBlobAmplitude{1.0, 0.45, 0.75, 0.6, 0.9};
inline constexpr std::array<double, 5> kBlobSigma{1.2, 1.2, 1.6, 1.0, 1.0};

struct SyntheticSpec {
  Frame frame{64, 64};
  double margin = 4.0;        ///< minimum landmark distance to the frame edge, px
  double scale_jitter = 0.12; ///< relative, uniform ±
  double rotation_deg = 12.0; ///< uniform ±
  double shift = 6.0;         ///< px on a 64-px frame, uniform ±
  double point_jitter = 0.8;  ///< per-point Gaussian std, px
  double noise = 0.05;        ///< additive Gaussian pixel noise std
  double stroke_gain = 0.35;  ///< intensity of the boundary strokes in the input
  GaussianSpec kernel{};
  double boundary_sigma = kDefaultBoundarySigma;
  BoundarySchema schema = five_point_schema();
};

struct SyntheticSample {
  HeatmapStack input;      ///< 1×H×W grayscale
  LandmarkSet landmarks;
  HeatmapStack heatmaps;   ///< 5 landmark channels + boundary channel
};

namespace detail {

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Deterministic in (seed, index, spec).
inline SyntheticSample generate_sample(std::uint64_t seed, std::uint64_t index, const SyntheticSpec& spec = {}) {
  const Frame frame = spec.frame;
  if (frame.width < 2 * spec.margin + 2 || frame.height < 2 * spec.margin + 2) {
    throw DomainError("synthetic frame " + to_string(frame) + " too small for margin");
  }
  auto rng = detail::sample_rng(seed, index);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double frame_scale = static_cast<double>(std::min(frame.width, frame.height)) / 64.0;
  const double scale = frame_scale * (1.0 + spec.scale_jitter * unit(rng));
  const double angle = spec.rotation_deg * unit(rng) * std::numbers::pi / 180.0;
  const double tx = (static_cast<double>(frame.width) - 1.0) / 2.0 + spec.shift * frame_scale * unit(rng);
  const double ty = (static_cast<double>(frame.height) - 1.0) / 2.0 + spec.shift * frame_scale * unit(rng);
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);

  std::vector<Point> pts;
  pts.reserve(kFaceTemplate.size());
  for (const Point& p : kFaceTemplate) {
    double x = tx + scale * (ca * p.x - sa * p.y) + spec.point_jitter * gauss(rng);
    double y = ty + scale * (sa * p.x + ca * p.y) + spec.point_jitter * gauss(rng);
    x = std::clamp(x, spec.margin, static_cast<double>(frame.width) - 1.0 - spec.margin);
    y = std::clamp(y, spec.margin, static_cast<double>(frame.height) - 1.0 - spec.margin);
    pts.push_back({x, y});
  }
  LandmarkSet landmarks(frame, std::move(pts));

  HeatmapStack image(1, frame);
  auto px = image.values();
  const Grid strokes = boundary_heatmap(rasterize_boundary(landmarks, spec.schema, frame).grid, 0.8);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = spec.stroke_gain * strokes.values()[i];
  for (std::size_t k = 0; k < landmarks.size(); ++k) {
    const double amp = kBlobAmplitude[k % kBlobAmplitude.size()];
    const double s = kBlobSigma[k % kBlobSigma.size()];
    const double denom = 2.0 * s * s;
    for (std::size_t r = 0; r < frame.height; ++r) {
      const double dy = static_cast<double>(r) - landmarks[k].y;
      if (std::abs(dy) > 4.0 * s) continue;
      for (std::size_t c = 0; c < frame.width; ++c) {
        const double dx = static_cast<double>(c) - landmarks[k].x;
        if (std::abs(dx) > 4.0 * s) continue;
        double& v = image(0, r, c);
        v = std::max(v, amp * std::exp(-(dx * dx + dy * dy) / denom));
      }
    }
  }
  for (auto& v : px) v += spec.noise * gauss(rng);

  HeatmapStack heatmaps = render_with_boundary(landmarks, spec.schema, frame, spec.kernel, spec.boundary_sigma);
  return {std::move(image), std::move(landmarks), std::move(heatmaps)};
}

/// Samples first_index .. first_index + count - 1 of the stream for `seed`.
inline std::vector<SyntheticSample> generate_dataset(std::uint64_t seed, std::size_t count, const SyntheticSpec& spec = {},
                                                     std::uint64_t first_index = 0) {
  std::vector<SyntheticSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_sample(seed, first_index + i, spec));
  return out;
}

}  // namespace awing::trainer
