#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "awing/heatmap_codec.hpp"
#include "awing/loss_map.hpp"
#include "awing/losses.hpp"

using namespace awing;

namespace {

HeatmapStack random_stack(std::mt19937_64& rng, std::size_t c, Frame f, double sparsity = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HeatmapStack s(c, f);
  for (auto& v : s.values()) v = u(rng) < sparsity ? 0.0 : u(rng);
  return s;
}

double brute_max3(const HeatmapStack& s, std::size_t c, long r, long x) {
  double m = -1.0;
  for (long rr = r - 1; rr <= r + 1; ++rr)
    for (long xx = x - 1; xx <= x + 1; ++xx)
      if (rr >= 0 && xx >= 0 && rr < static_cast<long>(s.height()) && xx < static_cast<long>(s.width()))
        m = std::max(m, s(c, static_cast<std::size_t>(rr), static_cast<std::size_t>(xx)));
  return m;
}

}  // namespace

TEST(Dilate, ZerosStayZero) {
  const HeatmapStack z(2, {5, 6});
  EXPECT_EQ(gray_dilate_3x3(z), z);
}

TEST(Dilate, SinglePixelBecomesBlock) {
  HeatmapStack s(1, {7, 7});
  s(0, 3, 3) = 1.0;
  const HeatmapStack d = gray_dilate_3x3(s);
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 7; ++c) {
      const bool in = r >= 2 && r <= 4 && c >= 2 && c <= 4;
      EXPECT_EQ(d(0, r, c), in ? 1.0 : 0.0);
    }
}

TEST(Dilate, CornerWindowIsClipped) {
  HeatmapStack s(1, {4, 4});
  s(0, 1, 1) = 0.5;
  s(0, 2, 2) = 0.9;
  const HeatmapStack d = gray_dilate_3x3(s);
  EXPECT_EQ(d(0, 0, 0), 0.5);
  EXPECT_EQ(d(0, 3, 3), 0.9);
  EXPECT_EQ(d(0, 0, 3), 0.0);
}

TEST(Dilate, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const HeatmapStack s = random_stack(rng, 3, {9, 11}, 0.5);
    const HeatmapStack d = gray_dilate_3x3(s);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t r = 0; r < 9; ++r)
        for (std::size_t x = 0; x < 11; ++x) EXPECT_EQ(d(c, r, x), brute_max3(s, c, static_cast<long>(r), static_cast<long>(x)));
  }
  const HeatmapStack g = render_heatmap(LandmarkSet({64, 64}, {{30, 30}}), {64, 64});
  const HeatmapStack d = gray_dilate_3x3(g);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t x = 0; x < 64; ++x) EXPECT_EQ(d(0, r, x), brute_max3(g, 0, static_cast<long>(r), static_cast<long>(x)));
}

TEST(Mask, AllZeroGroundTruth) {
  const WeightMask m = build_mask(HeatmapStack(2, {8, 8}), 10.0);
  EXPECT_EQ(m.support(), 0u);
  EXPECT_EQ(m.size(), 128u);
}

TEST(Mask, SingleGaussianSupport) {
  const HeatmapStack g = render_heatmap(LandmarkSet({64, 64}, {{30, 30}}), {64, 64});
  const WeightMask m = build_mask(g);
  // Pixels at squared distance <= 2 reach 0.2 (exp(-1) = 0.37, exp(-2) = 0.14),
  // a 3×3 block; its 3×3 dilation is 5×5.
  std::size_t above = 0;
  for (double v : g.values()) above += v >= 0.2;
  EXPECT_EQ(above, 9u);
  EXPECT_EQ(m.support(), 25u);
  for (std::size_t r = 0; r < 64; ++r)
    for (std::size_t c = 0; c < 64; ++c) {
      const bool hot = g(0, r, c) >= 0.2;
      const bool near_hot = brute_max3(g, 0, static_cast<long>(r), static_cast<long>(c)) >= 0.2;
      if (hot) {
        EXPECT_TRUE(m.at(0, r, c));
      }
      EXPECT_EQ(m.at(0, r, c), near_hot);
    }
  EXPECT_GT(m.support(), above);
}

TEST(Mask, ContainsTheGaussianPeakNeighborhood) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 63.0);
  for (int i = 0; i < 50; ++i) {
    const HeatmapStack g = render_heatmap(LandmarkSet({64, 64}, {{u(rng), u(rng)}}), {64, 64});
    const WeightMask m = build_mask(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.values()[k] >= 0.2) {
        EXPECT_TRUE(m[k]);
      }
    }
  }
}

TEST(Mask, RebuildFromMaskIsSuperset) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const HeatmapStack g = random_stack(rng, 2, {8, 8}, 0.8);
    const WeightMask m = build_mask(g);
    const WeightMask again = build_mask(m.as_stack());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) {
        EXPECT_TRUE(again[i]);
      }
    }
  }
}

TEST(Mask, RejectsNonPositiveWeight) {
  EXPECT_THROW(build_mask(HeatmapStack(1, {2, 2}), 0.0), DomainError);
  EXPECT_THROW(baseline_weight_map(HeatmapStack(1, {2, 2}), -1.0), DomainError);
}

TEST(WeightedLoss, ZeroMaskIsIdentity) {
  std::mt19937_64 rng(2);
  const HeatmapStack loss = random_stack(rng, 2, {4, 5});
  const auto out = apply_weighted_loss(loss, build_mask(HeatmapStack(2, {4, 5})));
  EXPECT_EQ(out.values, loss);
}

TEST(WeightedLoss, FullMaskScalesByWeightPlusOne) {
  std::mt19937_64 rng(2);
  const HeatmapStack loss = random_stack(rng, 2, {4, 5});
  HeatmapStack ones(2, {4, 5});
  for (auto& v : ones.values()) v = 1.0;
  const auto out = apply_weighted_loss(loss, build_mask(ones, 10.0));
  for (std::size_t i = 0; i < loss.size(); ++i) EXPECT_DOUBLE_EQ(out.values.values()[i], 11.0 * loss.values()[i]);
}

TEST(WeightedLoss, LinearInTheLoss) {
  std::mt19937_64 rng(8);
  const HeatmapStack gt = random_stack(rng, 3, {8, 8}, 0.7);
  const HeatmapStack a = random_stack(rng, 3, {8, 8});
  const HeatmapStack b = random_stack(rng, 3, {8, 8});
  HeatmapStack mix(3, {8, 8});
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values()[i] = 2.0 * a.values()[i] + 0.5 * b.values()[i];
  const WeightMask m = build_mask(gt);
  const double lhs = apply_weighted_loss(mix, m).mean;
  const double rhs = 2.0 * apply_weighted_loss(a, m).mean + 0.5 * apply_weighted_loss(b, m).mean;
  EXPECT_NEAR(lhs, rhs, 1e-12);
}

TEST(WeightedLoss, ShapeMismatch) {
  EXPECT_THROW(apply_weighted_loss(HeatmapStack(1, {4, 4}), build_mask(HeatmapStack(2, {4, 4}))), ShapeError);
  EXPECT_THROW(apply_weight_map(HeatmapStack(1, {4, 4}), HeatmapStack(1, {4, 5})), ShapeError);
}

TEST(WeightedLoss, PipelineMatchesSinglePassOracle) {
  std::mt19937_64 rng(12);
  const LossParams p;
  for (int t = 0; t < 200; ++t) {
    const HeatmapStack gt = random_stack(rng, 3, {8, 8}, 0.6);
    const HeatmapStack pred = random_stack(rng, 3, {8, 8});
    const auto got = apply_weighted_loss(batch_loss(gt, pred, p).values, build_mask(gt, 10.0, 0.2)).mean;
    double sum = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
      for (long r = 0; r < 8; ++r)
        for (long x = 0; x < 8; ++x) {
          const double m = brute_max3(gt, c, r, x) >= 0.2 ? 1.0 : 0.0;
          const double y = gt(c, static_cast<std::size_t>(r), static_cast<std::size_t>(x));
          const double yh = pred(c, static_cast<std::size_t>(r), static_cast<std::size_t>(x));
          sum += awing_loss(y, yh, p).value * (10.0 * m + 1.0);
        }
    EXPECT_NEAR(got, sum / 192.0, 1e-12);
  }
}

TEST(BaselineMap, Multipliers) {
  HeatmapStack g(1, {1, 3});
  g.values()[0] = 0.0;
  g.values()[1] = 1.0;
  g.values()[2] = 0.25;
  const HeatmapStack m = baseline_weight_map(g, 10.0);
  EXPECT_EQ(m.values()[0], 1.0);
  EXPECT_EQ(m.values()[1], 11.0);
  EXPECT_EQ(m.values()[2], 3.5);
}

TEST(BaselineMap, RandomMatchesElementwise) {
  std::mt19937_64 rng(6);
  const HeatmapStack g = random_stack(rng, 2, {5, 5});
  const HeatmapStack loss = random_stack(rng, 2, {5, 5});
  const auto out = apply_weight_map(loss, baseline_weight_map(g, 4.0));
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double expect = loss.values()[i] * (g.values()[i] * 4.0 + 1.0);
    EXPECT_DOUBLE_EQ(out.values.values()[i], expect);
    sum += expect;
  }
  EXPECT_NEAR(out.mean, sum / 50.0, 1e-12);
}

TEST(MaskMultiplier, StackAgreesWithMask) {
  std::mt19937_64 rng(3);
  const HeatmapStack g = random_stack(rng, 1, {6, 6}, 0.7);
  const WeightMask m = build_mask(g, 5.0);
  const HeatmapStack s = m.multiplier_stack();
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_EQ(s.values()[i], m[i] ? 6.0 : 1.0);
}
