#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support/oracles.hpp"
#include "tlc/errors.hpp"
#include "tlc/fusion.hpp"
#include "tlc/integral.hpp"

namespace tlc {
namespace {

using testing::max_abs_diff;

std::vector<std::size_t> rows_of(const TilePlan& plan) {
  std::vector<std::size_t> r;
  for (const auto& p : plan.placements) r.push_back(p.row);
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

TEST(PlanTilesTest, SingleTile) {
  const TilePlan plan = plan_tiles(4, 4, 4, 4, 4, 4);
  ASSERT_EQ(plan.placements.size(), 1u);
  EXPECT_EQ(plan.placements[0], (TilePlacement{0, 0}));
}

TEST(PlanTilesTest, StrideOneCoverageCounts) {
  const TilePlan plan = plan_tiles(1, 4, 1, 3, 1, 1);
  std::vector<std::size_t> cols;
  for (const auto& p : plan.placements) cols.push_back(p.col);
  EXPECT_EQ(cols, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(plan.coverage(), (std::vector<std::uint32_t>{1, 2, 2, 1}));
}

TEST(PlanTilesTest, StrideTwoLastPlacementReachesEdge) {
  const TilePlan plan = plan_tiles(5, 5, 3, 3, 2, 2);
  EXPECT_EQ(rows_of(plan), (std::vector<std::size_t>{0, 2}));
  const auto cov = plan.coverage();
  for (std::size_t j = 0; j < 5; ++j) EXPECT_GE(cov[4 * 5 + j], 1u);
}

TEST(PlanTilesTest, ClampedFinalPlacement) {
  // 10 rows, k=4, s=3: 0, 3, 6 then clamped 6 already ends at 10.
  EXPECT_EQ(rows_of(plan_tiles(10, 1, 4, 1, 3, 1)), (std::vector<std::size_t>{0, 3, 6}));
  // 11 rows: 0, 3, 6 end at 10 < 11, so a clamped placement at 7 is added.
  EXPECT_EQ(rows_of(plan_tiles(11, 1, 4, 1, 3, 1)), (std::vector<std::size_t>{0, 3, 6, 7}));
}

TEST(PlanTilesTest, InvariantsOnRandomPlans) {
  Rng rng(100);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng.below(40), w = 1 + rng.below(40);
    const TilePlan plan =
        plan_tiles(h, w, 1 + rng.below(45), 1 + rng.below(45), 1 + rng.below(45), 1 + rng.below(45));
    ASSERT_LE(plan.s_h, plan.k_h);
    ASSERT_LE(plan.s_w, plan.k_w);
    ASSERT_TRUE(std::is_sorted(plan.placements.begin(), plan.placements.end(),
                               [](const TilePlacement& a, const TilePlacement& b) {
                                 return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                               }));
    ASSERT_EQ(std::adjacent_find(plan.placements.begin(), plan.placements.end()),
              plan.placements.end());
    const auto cov = plan.coverage();
    ASSERT_TRUE(std::all_of(cov.begin(), cov.end(), [](std::uint32_t c) { return c >= 1; }));
    const std::uint64_t total = std::accumulate(cov.begin(), cov.end(), std::uint64_t{0});
    ASSERT_EQ(total, plan.placements.size() * plan.k_h * plan.k_w);
  }
}

TEST(PlanTilesTest, DefaultStrideIsHalfWindow) {
  const TilePlan plan = plan_tiles_default_stride(64, 48, 16, 10);
  EXPECT_EQ(plan.s_h, 8u);
  EXPECT_EQ(plan.s_w, 5u);
  EXPECT_EQ(plan_tiles_default_stride(3, 3, 1, 1).s_h, 1u);
}

TEST(ApplyAndFuseTest, IdentityReturnsInput) {
  Rng rng(1);
  const FeatureMap x = testing::random_map(rng, 3, 17, 23);
  const TilePlan plan = plan_tiles(17, 23, 6, 5, 2, 3);
  const FeatureMap out = apply_and_fuse(x, plan, [](const FeatureMap& w) { return w; });
  EXPECT_LE(max_abs_diff(out, x), 1e-12);
}

TEST(ApplyAndFuseTest, AddConstantShiftsEverything) {
  Rng rng(2);
  const FeatureMap x = testing::random_map(rng, 2, 9, 9);
  const FeatureMap out = apply_and_fuse(x, plan_tiles(9, 9, 4, 4, 3, 1), [](const FeatureMap& w) {
    FeatureMap r = w;
    for (double& v : r.values()) v += 0.5;
    return r;
  });
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(out.values()[k], x.values()[k] + 0.5, 1e-12);
}

TEST(ApplyAndFuseTest, MeanBroadcastOnRampGivesBlockMeans) {
  std::vector<double> ramp(16);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const FeatureMap x(1, 4, 4, ramp);
  const FeatureMap out = apply_and_fuse(x, plan_tiles(4, 4, 2, 2, 2, 2), mean_broadcast);
  const FeatureMap expected(1, 4, 4, {2.5, 2.5, 4.5, 4.5,    //
                                      2.5, 2.5, 4.5, 4.5,    //
                                      10.5, 10.5, 12.5, 12.5,  //
                                      10.5, 10.5, 12.5, 12.5});
  EXPECT_EQ(out, expected);
}

TEST(ApplyAndFuseTest, LinearOpCommutesWithScaling) {
  Rng rng(3);
  const FeatureMap x = testing::random_map(rng, 2, 12, 12);
  const TilePlan plan = plan_tiles(12, 12, 5, 5, 2, 2);
  FeatureMap scaled = x;
  for (double& v : scaled.values()) v *= 3.0;
  const FeatureMap a = apply_and_fuse(scaled, plan, mean_broadcast);
  FeatureMap b = apply_and_fuse(x, plan, mean_broadcast);
  for (double& v : b.values()) v *= 3.0;
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(ApplyAndFuseTest, OrderIndependent) {
  Rng rng(4);
  const FeatureMap x = testing::random_map(rng, 3, 20, 20);
  const TilePlan plan = plan_tiles(20, 20, 7, 7, 3, 3);
  const WindowTransform op = [](const FeatureMap& w) {
    return transposed_attention(w, AttnParams{2.0});
  };
  const FeatureMap reference = apply_and_fuse(x, plan, op);
  std::vector<std::size_t> order(plan.placements.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 5; ++trial) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    EXPECT_LE(max_abs_diff(apply_and_fuse(x, plan, op, order), reference), 1e-12);
  }
}

TEST(ApplyAndFuseTest, ShapeChangingOpIsRejected) {
  const FeatureMap x(1, 4, 4);
  try {
    apply_and_fuse(x, plan_tiles(4, 4, 2, 2, 2, 2),
                   [](const FeatureMap& w) { return w.crop(0, 0, 1, 1); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOpShapeViolation);
  }
  EXPECT_THROW(apply_and_fuse(x, plan_tiles(5, 4, 2, 2, 2, 2), mean_broadcast), Error);
}

TEST(TransposedAttentionTest, SingleChannelIsIdentity) {
  Rng rng(5);
  const FeatureMap w = testing::random_map(rng, 1, 3, 4);
  EXPECT_EQ(transposed_attention(w, AttnParams{0.7}), w);
}

TEST(TransposedAttentionTest, IdenticalChannelsStayPut) {
  Rng rng(6);
  const FeatureMap one = testing::random_map(rng, 1, 4, 4);
  std::vector<double> v(one.values().begin(), one.values().end());
  v.insert(v.end(), one.values().begin(), one.values().end());
  const FeatureMap w(2, 4, 4, v);
  for (double t : {0.1, 1.0, 10.0}) {
    EXPECT_LT(max_abs_diff(transposed_attention(w, AttnParams{t}), w), 1e-12);
  }
}

TEST(TransposedAttentionTest, MatchesHandWrittenSoftmax) {
  Rng rng(7);
  const FeatureMap w = testing::random_map(rng, 2, 2, 2);
  // q = k = L2-normalized channels; logits = cos similarities (temperature 1).
  double n0 = 0, n1 = 0, d = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    n0 += w.channel(0)[i] * w.channel(0)[i];
    n1 += w.channel(1)[i] * w.channel(1)[i];
    d += w.channel(0)[i] * w.channel(1)[i];
  }
  const double cos01 = d / std::sqrt(n0 * n1);
  // Row 0: logits (1, cos01); row 1: (cos01, 1).
  const double a00 = std::exp(1.0) / (std::exp(1.0) + std::exp(cos01));
  const double a01 = 1.0 - a00;
  const double a10 = std::exp(cos01) / (std::exp(cos01) + std::exp(1.0));
  const double a11 = 1.0 - a10;
  const FeatureMap out = transposed_attention(w, AttnParams{1.0});
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(out.channel(0)[i], a00 * w.channel(0)[i] + a01 * w.channel(1)[i], 1e-9);
    EXPECT_NEAR(out.channel(1)[i], a10 * w.channel(0)[i] + a11 * w.channel(1)[i], 1e-9);
  }
}

TEST(TransposedAttentionTest, RowsAreStochasticAndZeroChannelIsTolerated) {
  Rng rng(8);
  FeatureMap w = testing::random_map(rng, 5, 3, 3);
  for (double& v : w.channel(2)) v = 0.0;
  const auto attn = attention_matrix(w, AttnParams{3.0});
  for (std::size_t a = 0; a < 5; ++a) {
    double row = 0;
    for (std::size_t b = 0; b < 5; ++b) {
      EXPECT_GT(attn[a * 5 + b], 0.0);
      row += attn[a * 5 + b];
    }
    EXPECT_NEAR(row, 1.0, 1e-9);
  }
  const FeatureMap out = transposed_attention(w, AttnParams{3.0});
  for (double v : out.values()) EXPECT_TRUE(std::isfinite(v));
}

TEST(TransposedAttentionTest, FullMapTileEqualsGlobalOp) {
  Rng rng(9);
  const FeatureMap x = testing::random_map(rng, 3, 8, 6);
  const auto op = [](const FeatureMap& w) { return transposed_attention(w, AttnParams{1.5}); };
  EXPECT_LT(max_abs_diff(apply_and_fuse(x, plan_tiles_default_stride(8, 6, 20, 20), op), op(x)),
            1e-12);
}

TEST(PatchInferenceTest, IdentityAndNoOverlapReduction) {
  Rng rng(10);
  const FeatureMap x = testing::random_map(rng, 2, 8, 8);
  const TilePlan plan = plan_tiles(8, 8, 4, 4, 4, 4);
  EXPECT_EQ(patch_inference_baseline(x, plan, [](const FeatureMap& w) { return w; }), x);
  const FeatureMap blocks = patch_inference_baseline(x, plan, mean_broadcast);
  for (const auto& p : plan.placements) {
    const FeatureMap expected = mean_broadcast(x.crop(p.row, p.col, 4, 4));
    EXPECT_EQ(blocks.crop(p.row, p.col, 4, 4), expected);
  }
}

TEST(PatchInferenceTest, GlobalMeanPatchesLeaveSeamThatLocalMeanDoesNot) {
  // Left half 0, right half 1; tiles of half the image width do not overlap.
  const std::size_t h = 16, w = 16;
  FeatureMap x(1, h, w);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = w / 2; j < w; ++j) x(0, i, j) = 1.0;
  // 6-wide tiles at columns 0, 6 and (clamped) 10, so the step at column 8
  // falls inside the middle tile.
  const TilePlan plan = plan_tiles(h, w, h, 6, h, 6);
  const FeatureMap patched = patch_inference_baseline(x, plan, mean_broadcast);
  const double patched_seam = seam_metric(patched, plan);
  EXPECT_GT(patched_seam, 0.0);

  const Plane tlc = local_aggregate(x.view(0), Pointwise::kIdentity, WindowSpec{h, 6});
  const FeatureMap tlc_map(1, h, w, {tlc.values().begin(), tlc.values().end()});
  EXPECT_LT(seam_metric(tlc_map, plan), patched_seam);
  // The local-mean response changes by at most 1/6 per column; the patched
  // output jumps by 2/3 at the first tile edge.
  double tlc_jump = 0.0, patched_jump = 0.0;
  for (std::size_t j = 1; j < w; ++j) {
    tlc_jump = std::max(tlc_jump, std::abs(tlc_map(0, 0, j) - tlc_map(0, 0, j - 1)));
    patched_jump = std::max(patched_jump, std::abs(patched(0, 0, j) - patched(0, 0, j - 1)));
  }
  EXPECT_LE(tlc_jump, 1.0 / 6.0 + 1e-12);
  EXPECT_NEAR(patched_jump, 2.0 / 3.0, 1e-12);
}

TEST(SeamMetricTest, RampConstantAndBlocks) {
  FeatureMap ramp(2, 20, 20);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j) ramp(c, i, j) = 0.3 * i - 0.7 * j + c;
  const TilePlan plan = plan_tiles(20, 20, 6, 6, 4, 4);
  EXPECT_LT(std::abs(seam_metric(ramp, plan)), 1e-9);
  EXPECT_EQ(seam_metric(FeatureMap(1, 20, 20, std::vector<double>(400, 2.0)), plan), 0.0);

  const TilePlan blocks_plan = plan_tiles(20, 20, 5, 5, 5, 5);
  FeatureMap blocks(1, 20, 20);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) blocks(0, i, j) = static_cast<double>((i / 5) * 4 + j / 5);
  EXPECT_GT(seam_metric(blocks, blocks_plan), 0.0);
}

}  // namespace
}  // namespace tlc
