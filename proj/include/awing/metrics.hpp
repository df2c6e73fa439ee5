#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "awing/types.hpp"

namespace awing {

/// Normalization distance d for NME and PCK, computed on the ground truth.
struct InterOcular {
  std::size_t left;
  std::size_t right;
};
/// Distance between the centroids of two eye contours.
struct InterPupil {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};
struct Torso {
  std::size_t a;
  std::size_t b;
};
struct ConstantNorm {
  double d;
};

using NormalizationRule = std::variant<InterOcular, InterPupil, Torso, ConstantNorm>;

namespace detail {

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline void check_index(std::size_t i, const LandmarkSet& gt) {
  if (i >= gt.size()) {
    throw DomainError("normalization references landmark " + std::to_string(i) + " of " + std::to_string(gt.size()));
  }
}

inline Point centroid(const std::vector<std::size_t>& idx, const LandmarkSet& gt) {
  if (idx.empty()) throw DomainError("inter-pupil normalization needs non-empty eye index sets");
  Point c{0.0, 0.0};
  for (std::size_t i : idx) {
    check_index(i, gt);
    c.x += gt[i].x;
    c.y += gt[i].y;
  }
  const auto n = static_cast<double>(idx.size());
  return {c.x / n, c.y / n};
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace detail

inline double normalization_distance(const LandmarkSet& gt, const NormalizationRule& rule) {
  const double d = std::visit(
      detail::overloaded{
          [&](const InterOcular& r) {
            detail::check_index(r.left, gt);
            detail::check_index(r.right, gt);
            return detail::distance(gt[r.left], gt[r.right]);
          },
          [&](const InterPupil& r) { return detail::distance(detail::centroid(r.left, gt), detail::centroid(r.right, gt)); },
          [&](const Torso& r) {
            detail::check_index(r.a, gt);
            detail::check_index(r.b, gt);
            return detail::distance(gt[r.a], gt[r.b]);
          },
          [](const ConstantNorm& r) { return r.d; }},
      rule);
  if (!(d > 0.0)) throw DegenerateNormalizationError("normalization distance is " + std::to_string(d));
  return d;
}

/// Parses interocular:i,j | interpupil:i,j,..;k,l,.. | torso:i,j | const:d.
inline NormalizationRule parse_normalization(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("normalization must look like kind:args, got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  auto parse_indices = [&](std::string_view s) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t end = std::min(s.find(',', start), s.size());
      const std::string_view tok = s.substr(start, end - start);
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
        throw ParseError("bad landmark index '" + std::string(tok) + "' in normalization");
      }
      out.push_back(v);
      start = end + 1;
    }
    return out;
  };
  auto pair = [&](std::string_view s) {
    auto idx = parse_indices(s);
    if (idx.size() != 2) throw ParseError("normalization '" + std::string(kind) + "' needs exactly two indices");
    return idx;
  };
  if (kind == "interocular") {
    auto p = pair(args);
    return InterOcular{p[0], p[1]};
  }
  if (kind == "torso") {
    auto p = pair(args);
    return Torso{p[0], p[1]};
  }
  if (kind == "interpupil") {
    const auto semi = args.find(';');
    if (semi == std::string_view::npos) throw ParseError("interpupil needs two index sets separated by ';'");
    return InterPupil{parse_indices(args.substr(0, semi)), parse_indices(args.substr(semi + 1))};
  }
  if (kind == "const") {
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(args.data(), args.data() + args.size(), d);
    if (ec != std::errc{} || ptr != args.data() + args.size()) throw ParseError("bad constant normalization '" + std::string(args) + "'");
    return ConstantNorm{d};
  }
  throw ParseError("unknown normalization kind '" + std::string(kind) + "'");
}

namespace detail {

inline void require_matching(const LandmarkSet& gt, const LandmarkSet& pred) {
  if (gt.size() != pred.size()) {
    throw ShapeError("ground truth has " + std::to_string(gt.size()) + " landmarks, prediction has " +
                     std::to_string(pred.size()));
  }
}

}  // namespace detail

/// Mean Euclidean landmark error divided by the normalization distance.
/// Landmarks unlabeled in the ground truth are excluded.
inline double nme(const LandmarkSet& gt, const LandmarkSet& pred, const NormalizationRule& norm) {
  detail::require_matching(gt, pred);
  const double d = normalization_distance(gt, norm);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.is_labeled(i)) continue;
    sum += detail::distance(gt[i], pred[i]);
    ++n;
  }
  if (n == 0) throw UndefinedMetricError("no labeled landmarks for NME");
  return sum / static_cast<double>(n) / d;
}

/// Fraction of images whose NME is strictly above the threshold.
inline double failure_rate(std::span<const double> nmes, double threshold) {
  if (nmes.empty()) throw UndefinedMetricError("failure rate of an empty list");
  if (!(threshold > 0.0)) throw DomainError("failure threshold must be positive");
  const auto failed = std::count_if(nmes.begin(), nmes.end(), [&](double v) { return v > threshold; });
  return static_cast<double>(failed) / static_cast<double>(nmes.size());
}

struct CedPoint {
  double nme;
  double fraction;  ///< share of images with NME <= nme
};

struct CedAuc {
  std::vector<CedPoint> curve;
  double auc = 0.0;
};

inline constexpr std::size_t kDefaultCedIntervals = 1000;

/// Empirical CDF of NME on a uniform grid over [0, threshold] and its
/// trapezoidal area divided by the threshold (1 for perfect predictions).
inline CedAuc ced_auc(std::span<const double> nmes, double threshold, std::size_t intervals = kDefaultCedIntervals) {
  if (nmes.empty()) throw UndefinedMetricError("CED of an empty list");
  if (!(threshold > 0.0)) throw DomainError("AUC threshold must be positive");
  if (intervals < 1) throw DomainError("CED needs at least one interval");
  std::vector<double> sorted(nmes.begin(), nmes.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  CedAuc out;
  out.curve.reserve(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double t = threshold * static_cast<double>(i) / static_cast<double>(intervals);
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    out.curve.push_back({t, static_cast<double>(below) / n});
  }
  double area = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) area += 0.5 * (out.curve[i].fraction + out.curve[i + 1].fraction);
  out.auc = area / static_cast<double>(intervals);
  return out;
}

/// Fraction of landmarks within fraction·d of the ground truth (inclusive).
inline double pck(const LandmarkSet& gt, const LandmarkSet& pred, const NormalizationRule& norm, double fraction) {
  detail::require_matching(gt, pred);
  if (!(fraction > 0.0)) throw DomainError("PCK fraction must be positive");
  const double limit = fraction * normalization_distance(gt, norm);
  std::size_t hit = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt.is_labeled(i)) continue;
    ++n;
    if (detail::distance(gt[i], pred[i]) <= limit) ++hit;
  }
  if (n == 0) throw UndefinedMetricError("no labeled landmarks for PCK");
  return static_cast<double>(hit) / static_cast<double>(n);
}

struct MetricsReport {
  std::vector<double> per_image_nme;
  double mean_nme = 0.0;
  double fr_threshold = 0.1;
  double fr = 0.0;
  double auc_threshold = 0.1;
  double auc = 0.0;
  std::vector<CedPoint> ced;
  std::optional<double> pck_fraction;
  std::optional<double> pck;  ///< mean per-image PCK
};

struct EvaluationOptions {
  NormalizationRule norm = ConstantNorm{1.0};
  double fr_threshold = 0.1;
  double auc_threshold = 0.1;
  std::optional<double> pck_fraction;
  std::size_t ced_intervals = kDefaultCedIntervals;
};

inline MetricsReport evaluate(std::span<const LandmarkSet> gt, std::span<const LandmarkSet> pred,
                              const EvaluationOptions& opt) {
  if (gt.size() != pred.size()) {
    throw ShapeError("ground truth has " + std::to_string(gt.size()) + " images, prediction has " +
                     std::to_string(pred.size()));
  }
  MetricsReport r;
  r.fr_threshold = opt.fr_threshold;
  r.auc_threshold = opt.auc_threshold;
  r.per_image_nme.reserve(gt.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    r.per_image_nme.push_back(nme(gt[i], pred[i], opt.norm));
    sum += r.per_image_nme.back();
  }
  r.fr = failure_rate(r.per_image_nme, opt.fr_threshold);
  auto c = ced_auc(r.per_image_nme, opt.auc_threshold, opt.ced_intervals);
  r.auc = c.auc;
  r.ced = std::move(c.curve);
  r.mean_nme = sum / static_cast<double>(gt.size());
  if (opt.pck_fraction) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gt.size(); ++i) acc += pck(gt[i], pred[i], opt.norm, *opt.pck_fraction);
    r.pck_fraction = opt.pck_fraction;
    r.pck = acc / static_cast<double>(gt.size());
  }
  return r;
}

}  // namespace awing
