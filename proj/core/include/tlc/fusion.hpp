#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tlc/feature_map.hpp"

namespace tlc {

struct TilePlacement {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const TilePlacement&, const TilePlacement&) = default;
};

/// Overlapping K_h × K_w windows covering an H × W map. Placements sit at
/// multiples of the stride along each axis, plus a final placement clamped to
/// end at the map edge when the stride grid stops short. Sorted row-major.
struct TilePlan {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t k_h = 0;
  std::size_t k_w = 0;
  std::size_t s_h = 0;
  std::size_t s_w = 0;
  std::vector<TilePlacement> placements;

  /// Number of placements covering each pixel, row-major H × W.
  std::vector<std::uint32_t> coverage() const;
};

/// The window is clamped to the map and the stride to [1, window].
/// Throws InvalidArgument for zero sizes.
TilePlan plan_tiles(std::size_t height, std::size_t width, std::size_t k_h, std::size_t k_w,
                    std::size_t s_h, std::size_t s_w);

/// Half-window stride in each axis (at least 1).
TilePlan plan_tiles_default_stride(std::size_t height, std::size_t width, std::size_t k_h,
                                   std::size_t k_w);

using WindowTransform = std::function<FeatureMap(const FeatureMap&)>;

/// Applies `op` to every C × K_h × K_w window and averages overlapping
/// outputs. Windows are accumulated in `order` (indices into
/// plan.placements; empty means plan order). Throws OpShapeViolation if `op`
/// changes the window shape, ShapeMismatch if the plan does not fit x.
FeatureMap apply_and_fuse(const FeatureMap& x, const TilePlan& plan, const WindowTransform& op,
                          std::span<const std::size_t> order = {});

/// Patch-wise inference: `pipeline` sees each window as a standalone image;
/// outputs are averaged over overlaps.
FeatureMap patch_inference_baseline(const FeatureMap& x, const TilePlan& plan,
                                    const WindowTransform& pipeline);

struct AttnParams {
  double temperature = 1.0;
};

/// Channels-as-tokens attention over one window: with each channel's
/// flattened values as q = k = v (q, k L2-normalized), A = softmax_rows(q kᵀ ·
/// temperature) and the output rows are A v. A zero channel normalizes to the
/// zero vector.
FeatureMap transposed_attention(const FeatureMap& window, const AttnParams& params);

/// The C × C row-stochastic attention matrix used by transposed_attention.
std::vector<double> attention_matrix(const FeatureMap& window, const AttnParams& params);

/// Mean |finite difference| over adjacent pixel pairs that straddle a tile
/// edge minus the same mean over all other pairs, computed per axis and
/// weighted by each axis's straddling-pair count, floored at zero. Zero when
/// the plan has no internal edges.
double seam_metric(const FeatureMap& x, const TilePlan& plan);

/// Broadcasts each channel's mean over the window.
FeatureMap mean_broadcast(const FeatureMap& window);

}  // namespace tlc
