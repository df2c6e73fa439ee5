#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "awing/types.hpp"

namespace awing {

enum class LossKind { MSE, L1, Wing, AWing };

inline std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::MSE: return "mse";
    case LossKind::L1: return "l1";
    case LossKind::Wing: return "wing";
    case LossKind::AWing: return "awing";
  }
  return "?";
}

inline std::optional<LossKind> parse_loss_kind(std::string_view s) {
  if (s == "mse") return LossKind::MSE;
  if (s == "l1") return LossKind::L1;
  if (s == "wing") return LossKind::Wing;
  if (s == "awing" || s == "aw") return LossKind::AWing;
  return std::nullopt;
}

/// Hyperparameters shared by every loss evaluation. Defaults are the
/// settings reported as most effective for 64×64 face heatmaps.
struct LossParams {
  double omega = 14.0;
  double epsilon = 1.0;
  double theta = 0.5;
  double alpha = 2.1;
  LossKind kind = LossKind::AWing;

  void validate() const {
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must lie in (0, 1]");
    // alpha - y > 1 for every y in [0, 1] keeps the gradient continuous at zero error.
    if (!(alpha > 2.0)) throw DomainError("alpha must exceed 2");
  }
};

/// Loss value and its derivative with respect to the prediction.
struct LossSurface {
  double value = 0.0;
  double gradient = 0.0;
};

namespace detail {

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

struct AWingBranchConstants {
  double a;
  double c;
};

/// A and C make the linear branch meet the nonlinear one in value and slope at |Δ| = θ.
inline AWingBranchConstants awing_constants(double y, const LossParams& p) {
  const double power = p.alpha - y;
  const double ratio = p.theta / p.epsilon;
  const double ratio_pow = std::pow(ratio, power);
  const double a = p.omega * (1.0 / (1.0 + ratio_pow)) * power * std::pow(ratio, power - 1.0) * (1.0 / p.epsilon);
  const double c = p.theta * a - p.omega * std::log1p(ratio_pow);
  return {a, c};
}

inline double awing_nonlinear_value(double y, double abs_delta, const LossParams& p) {
  return p.omega * std::log1p(std::pow(abs_delta / p.epsilon, p.alpha - y));
}

/// d/d|Δ| of the nonlinear branch.
inline double awing_nonlinear_slope(double y, double abs_delta, const LossParams& p) {
  if (abs_delta == 0.0) return 0.0;
  const double power = p.alpha - y;
  const double u = abs_delta / p.epsilon;
  return p.omega * power * std::pow(u, power - 1.0) / (p.epsilon * (1.0 + std::pow(u, power)));
}

inline double awing_linear_value(double y, double abs_delta, const LossParams& p) {
  const auto k = awing_constants(y, p);
  return k.a * abs_delta - k.c;
}

inline double wing_nonlinear_value(double abs_delta, const LossParams& p) {
  return p.omega * std::log1p(abs_delta / p.epsilon);
}

inline double wing_linear_value(double abs_delta, const LossParams& p) {
  const double c = p.omega - p.omega * std::log1p(p.omega / p.epsilon);
  return abs_delta - c;
}

}  // namespace detail

inline LossSurface mse_loss(double y, double yhat) {
  const double d = yhat - y;
  return {d * d, 2.0 * d};
}

/// Gradient at zero error is 0.
inline LossSurface l1_loss(double y, double yhat) {
  const double d = yhat - y;
  return {std::abs(d), detail::sign_of(d)};
}

/// Gradient at zero error is 0.
inline LossSurface wing_loss(double y, double yhat, const LossParams& p) {
  const double d = yhat - y;
  const double ad = std::abs(d);
  if (ad < p.omega) {
    return {detail::wing_nonlinear_value(ad, p), detail::sign_of(d) * p.omega / (p.epsilon + ad)};
  }
  return {detail::wing_linear_value(ad, p), detail::sign_of(d)};
}

/// Adaptive Wing: the exponent α − y bends the loss toward MSE on
/// background (y → 0) and toward Wing on the landmark peak (y → 1).
/// The nonlinear branch is taken for |Δ| < θ, the linear one otherwise.
inline LossSurface awing_loss(double y, double yhat, const LossParams& p) {
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("adaptive wing target must lie in [0, 1], got " + std::to_string(y));
  const double d = yhat - y;
  const double ad = std::abs(d);
  if (ad < p.theta) {
    if (ad == 0.0) return {0.0, 0.0};
    const double power = p.alpha - y;
    const double u = ad / p.epsilon;
    const double t = std::pow(u, power - 1.0);
    const double tu = t * u;
    return {p.omega * std::log1p(tu), detail::sign_of(d) * p.omega * power * t / (p.epsilon * (1.0 + tu))};
  }
  const auto k = detail::awing_constants(y, p);
  return {k.a * ad - k.c, detail::sign_of(d) * k.a};
}

inline LossSurface evaluate_loss(double y, double yhat, const LossParams& p) {
  switch (p.kind) {
    case LossKind::MSE: return mse_loss(y, yhat);
    case LossKind::L1: return l1_loss(y, yhat);
    case LossKind::Wing: return wing_loss(y, yhat, p);
    case LossKind::AWing: return awing_loss(y, yhat, p);
  }
  throw DomainError("unknown loss kind");
}

/// |∂Loss/∂ŷ| at error = y − ŷ.
inline double influence(double error, double y, const LossParams& p) {
  return std::abs(evaluate_loss(y, y - error, p).gradient);
}

struct LossGrid {
  HeatmapStack values;
  HeatmapStack gradients;  ///< ∂(per-pixel loss)/∂ŷ, not divided by the pixel count
  double mean = 0.0;
};

/// Elementwise loss over two stacks of equal shape and the mean over all elements.
inline LossGrid batch_loss(const HeatmapStack& gt, const HeatmapStack& pred, const LossParams& params) {
  require_same_shape(gt, pred, "batch_loss");
  params.validate();
  LossGrid out{HeatmapStack(gt.channels(), gt.frame(), gt.has_boundary_channel()),
               HeatmapStack(gt.channels(), gt.frame(), gt.has_boundary_channel()), 0.0};
  auto y = gt.values();
  auto yhat = pred.values();
  auto v = out.values.values();
  auto g = out.gradients.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const LossSurface s = evaluate_loss(y[i], yhat[i], params);
    v[i] = s.value;
    g[i] = s.gradient;
    sum += s.value;
  }
  out.mean = y.empty() ? 0.0 : sum / static_cast<double>(y.size());
  return out;
}

}  // namespace awing
