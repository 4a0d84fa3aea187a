#pragma once

#include "tlc/feature_map.hpp"
#include "tlc/integral.hpp"
#include "tlc/window.hpp"

// Direct O(HW·K_h·K_w) window evaluation with the same centering and edge
// replication as the integral path. Used for differential runs and as the
// cost baseline in benchmarks.
namespace tlc::brute_force {

Plane local_aggregate(PlaneView x, Pointwise f, const WindowSpec& window);

/// Two-pass (mean, then squared deviations) windowed variance.
MeanVar local_mean_var(PlaneView x, const WindowSpec& window);

Plane local_max(PlaneView x, const WindowSpec& window);

}  // namespace tlc::brute_force
