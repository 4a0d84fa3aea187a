#include "tlc/macs.hpp"

#include <string>

#include "tlc/analysis.hpp"
#include "tlc/errors.hpp"

namespace tlc {
namespace {

using u64 = std::uint64_t;

struct Extent {
  u64 pixels;    // H * W
  u64 interior;  // windows fully inside the map (1 in Global mode)
  u64 height;
  u64 interior_cols;
};

Extent extent_of(const ModuleShape& s, const Mode& mode) {
  Extent e{static_cast<u64>(s.height) * s.width, 1, s.height, 1};
  if (const auto* local = std::get_if<Local>(&mode)) {
    const WindowGeometry g = WindowGeometry::make(s.height, s.width, local->window);
    e.interior = static_cast<u64>(g.rows) * g.cols;
    e.interior_cols = g.cols;
  }
  return e;
}

// Channel MLP: C*hidden + hidden (ReLU) + hidden*C.
u64 mlp_macs(u64 c, u64 hidden) { return 2 * c * hidden + hidden; }

// Global average: one accumulate per element. Local average: two per
// element to build the table, four per interior window to query it.
u64 average_macs(u64 c, const Extent& e, bool local) {
  return local ? c * (2 * e.pixels + 4 * e.interior) : c * e.pixels;
}

// Global max: one compare per element. Local: prefix and suffix running max
// along rows, one combine per output column, then the same down columns.
u64 max_macs(u64 c, const Extent& e, bool local) {
  if (!local) return c * e.pixels;
  const u64 after_rows = e.height * e.interior_cols;
  return c * (2 * e.pixels + after_rows + 2 * after_rows + e.interior);
}

}  // namespace

std::uint64_t module_macs(ModuleKind kind, const ModuleShape& shape, const Mode& mode) {
  const bool local = std::holds_alternative<Local>(mode);
  const Extent e = extent_of(shape, mode);
  const u64 c = shape.channels;
  const u64 gating = c * e.pixels;

  switch (kind) {
    case ModuleKind::kSE: {
      const u64 hidden = c / shape.se_ratio;
      return average_macs(c, e, local) + e.interior * (mlp_macs(c, hidden) + c) + gating;
    }
    case ModuleKind::kCBAMChannel: {
      const u64 hidden = c / shape.se_ratio;
      return average_macs(c, e, local) + max_macs(c, e, local) +
             e.interior * (2 * mlp_macs(c, hidden) + 2 * c) + gating;
    }
    case ModuleKind::kGEThetaMinus:
      return average_macs(c, e, local) + e.interior * c + gating;
    case ModuleKind::kIN:
    case ModuleKind::kGN: {
      const u64 groups = kind == ModuleKind::kIN ? c : shape.groups;
      // Sum and sum of squares, merged across each group's channels.
      u64 stats = local ? c * 4 * e.pixels + 2 * (c - groups) * e.pixels + groups * 8 * e.interior
                        : c * 2 * e.pixels + groups * 2;
      // Variance and inverse std per statistics cell, then scale and shift.
      stats += groups * e.interior * 4;
      return stats + 3 * c * e.pixels;
    }
  }
  return 0;
}

std::uint64_t host_macs(const HostModel& host, std::size_t height, std::size_t width) {
  auto conv = [](u64 k, u64 cin, u64 cout, u64 h, u64 w) { return k * k * cin * cout * h * w; };
  u64 total = conv(3, host.image_channels, host.base_width, height, width) +
              conv(3, host.base_width, host.image_channels, height, width);
  for (std::size_t l = 0; l < host.levels; ++l) {
    const u64 c = static_cast<u64>(host.base_width) << l;
    const u64 h = height >> l;
    const u64 w = width >> l;
    const u64 convs_per_stage = (l + 1 == host.levels) ? 2 : 4;  // bottleneck has no decoder twin
    total += convs_per_stage * conv(3, c, c, h, w);
    if (l + 1 < host.levels) total += 2 * conv(2, c, 2 * c, h / 2, w / 2);
  }
  return total;
}

OverheadReport host_overhead(ModuleKind kind, const HostModel& host, std::size_t height,
                             std::size_t width, const WindowSpec& window, std::size_t se_ratio,
                             std::size_t groups_per_stage) {
  LayerGraph graph;
  for (std::size_t l = 0; l < host.levels; ++l) {
    graph.layers.push_back({"encoder" + std::to_string(l), 1.0 / static_cast<double>(1u << l), true});
  }
  const auto windows = calibrate_windows(graph, window.k_h, window.k_w);

  OverheadReport report;
  report.host_macs = host_macs(host, height, width);
  report.global_total = report.host_macs;
  report.local_total = report.host_macs;
  for (std::size_t l = 0; l < host.levels; ++l) {
    ModuleShape shape;
    shape.channels = host.base_width << l;
    shape.height = height >> l;
    shape.width = width >> l;
    shape.se_ratio = se_ratio;
    shape.groups = groups_per_stage;
    if (shape.height == 0 || shape.width == 0) {
      throw Error(ErrorCode::kDegenerateScale, "input too small for host depth");
    }
    const WindowSpec stage{windows[l].k_h, windows[l].k_w};
    report.stage_windows.push_back(stage);
    report.global_total += module_macs(kind, shape, Global{});
    report.local_total += module_macs(kind, shape, Local{stage});
  }
  return report;
}

}  // namespace tlc
