#include <gtest/gtest.h>

#include "oracles.hpp"
#include "topomatch/error.hpp"
#include "topomatch/metrics.hpp"
#include "topomatch/synth.hpp"

namespace topomatch {
namespace {

BinaryMask random_mask(int w, int h, double density, SplitMix64& rng) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w * h));
  for (auto& b : bits) b = rng.uniform() < density ? 1 : 0;
  return BinaryMask(w, h, std::move(bits));
}

BinaryMask squares(int w, int h, const std::vector<std::pair<int, int>>& corners, int side) {
  BinaryMask m(w, h);
  for (const auto& [r, c] : corners) {
    for (int dr = 0; dr < side; ++dr) {
      for (int dc = 0; dc < side; ++dc) m.set(r + dr, c + dc, true);
    }
  }
  return m;
}

TEST(BettiNumber, Examples) {
  EXPECT_EQ(betti_number(BinaryMask(5, 5)), 0u);
  EXPECT_EQ(betti_number(squares(8, 8, {{0, 0}, {5, 5}}, 2)), 2u);
  // Diagonal touch: one component in 8-connectivity, two in 4.
  const auto touching = squares(4, 4, {{0, 0}, {2, 2}}, 2);
  EXPECT_EQ(betti_number(touching, Connectivity::Eight), 1u);
  EXPECT_EQ(betti_number(touching, Connectivity::Four), 2u);
}

TEST(BettiNumber, MatchesTwoPassLabeling) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 3 + static_cast<int>(rng.below(25)), h = 3 + static_cast<int>(rng.below(25));
    const auto m = random_mask(w, h, rng.uniform(0.2, 0.7), rng);
    for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
      EXPECT_EQ(betti_number(m, conn), oracle::two_pass_components(m, conn));
    }
  }
}

TEST(BettiNumber, RotationAndTransposeInvariant) {
  SplitMix64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_mask(13, 7, 0.45, rng);
    for (auto conn : {Connectivity::Four, Connectivity::Eight}) {
      const auto b = betti_number(m, conn);
      EXPECT_EQ(betti_number(m.transposed(), conn), b);
      EXPECT_EQ(betti_number(m.rotated90(), conn), b);
      EXPECT_EQ(betti_number(m.rotated90().rotated90(), conn), b);
    }
  }
}

TEST(BettiError, IdenticalIsZero) {
  SplitMix64 rng(10);
  const auto m = random_mask(20, 20, 0.5, rng);
  EXPECT_EQ(betti_error(m.to_field(), m, 8), 0.0);
  EXPECT_EQ(betti_error(m.to_field(), m, 7, 3), 0.0);
}

TEST(BettiError, TwoBlobsAgainstOne) {
  const auto gt = squares(10, 10, {{1, 1}}, 4);
  const auto pred = squares(10, 10, {{1, 1}, {6, 6}}, 3).to_field();
  EXPECT_EQ(betti_error(pred, gt, 10), 1.0);
}

TEST(BettiError, MeanOverWindows) {
  // Left window: 2 vs 1. Right window: 4 vs 1.
  const auto gt = squares(8, 4, {{0, 0}, {0, 4}}, 1);
  const auto pred = squares(8, 4, {{0, 0}, {2, 2}, {0, 4}, {0, 6}, {2, 4}, {2, 6}}, 1);
  EXPECT_EQ(betti_error(pred.to_field(), gt, 4), 2.0);
}

TEST(BettiError, PartialWindowsIncluded) {
  // 5 wide with window 4: windows start at 0 and 4; the second is one column wide.
  const auto gt = BinaryMask(5, 4);
  const auto pred = squares(5, 4, {{0, 4}}, 1);
  EXPECT_EQ(betti_error(pred.to_field(), gt, 4), 0.5);
}

TEST(BettiError, ThresholdIsStrict) {
  const auto gt = BinaryMask(2, 2);
  const auto pred = ScalarField::constant(2, 2, 0.5);
  EXPECT_EQ(betti_error(pred, gt, 2), 0.0);
  EXPECT_EQ(betti_error(pred, gt, 2, 0, 0.4), 1.0);
}

TEST(BettiError, Errors) {
  const auto gt = BinaryMask(8, 6);
  EXPECT_THROW(betti_error(ScalarField::constant(8, 6, 0.0), gt, 7), InputError);
  EXPECT_THROW(betti_error(ScalarField::constant(8, 6, 0.0), gt), InputError);
  EXPECT_THROW(betti_error(ScalarField::constant(6, 8, 0.0), gt, 2), InputError);
  EXPECT_THROW(betti_error(ScalarField::constant(8, 6, 0.0), gt, 0), InputError);
}

TEST(MatchedFeatureError, Examples) {
  const auto gt = squares(20, 20, {{2, 2}, {12, 12}}, 4);
  EXPECT_EQ(matched_feature_error(gt.to_field(), gt), 0u);
  const auto extra = squares(20, 20, {{2, 2}, {12, 12}, {2, 14}}, 4);
  EXPECT_EQ(matched_feature_error(extra.to_field(), gt), 1u);
  const auto missing = squares(20, 20, {{2, 2}}, 4);
  EXPECT_EQ(matched_feature_error(missing.to_field(), gt), 1u);
}

TEST(MatchedFeatureError, EmptyMasks) {
  const BinaryMask empty(6, 6);
  EXPECT_EQ(matched_feature_error(empty.to_field(), empty), 0u);
  const auto one = squares(6, 6, {{1, 1}}, 2);
  EXPECT_EQ(matched_feature_error(empty.to_field(), one), 1u);
  EXPECT_EQ(matched_feature_error(one.to_field(), empty), 1u);
}

TEST(MatchedFeatureError, SymmetricForMasks) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_mask(16, 16, 0.3, rng);
    const auto b = random_mask(16, 16, 0.3, rng);
    EXPECT_EQ(matched_feature_error(a.to_field(), b), matched_feature_error(b.to_field(), a));
  }
}

TEST(EvaluateMetrics, Report) {
  const auto gt = squares(10, 10, {{1, 1}}, 4);
  const auto pred = squares(10, 10, {{1, 1}, {6, 6}}, 3).to_field();
  const auto r = evaluate_metrics(pred, gt, 10, 0, 0.5);
  EXPECT_EQ(r.betti_error, 1.0);
  EXPECT_EQ(r.matched_feature_error, 1u);
  EXPECT_EQ(r.window, 10);
  EXPECT_EQ(r.stride, 10);
}

}  // namespace
}  // namespace topomatch
