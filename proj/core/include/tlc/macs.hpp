#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tlc/modules.hpp"

namespace tlc {

// Operation counts for the convertible modules.
//
// Convention: every scalar arithmetic operation in the data path (multiply,
// add, subtract, compare, divide, nonlinearity) counts as one MAC, and a
// multiply feeding an accumulation counts once. This over-counts the cheap
// aggregation steps relative to the usual convolution-only accounting, so
// overhead percentages are upper bounds. Counts follow what the
// implementation executes: in Local mode the channel MLP runs once per
// interior window, not once per pixel, since replicated pixels share gates.

struct ModuleShape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t se_ratio = 16;  // SE / CBAM only
  std::size_t groups = 1;     // norm only
};

std::uint64_t module_macs(ModuleKind kind, const ModuleShape& shape, const Mode& mode);

/// Reference host network for relative overheads: a UNet with `levels`
/// stages of width base_width * 2^l at resolution H/2^l × W/2^l. Each
/// encoder and decoder stage holds two 3×3 convolutions; stages are joined
/// by 2×2 stride-2 down/up convolutions; a 3×3 intro and outro map to and
/// from `image_channels`. The module under study follows every encoder stage.
struct HostModel {
  std::size_t image_channels = 3;
  std::size_t base_width = 32;
  std::size_t levels = 4;
};

std::uint64_t host_macs(const HostModel& host, std::size_t height, std::size_t width);

struct OverheadReport {
  std::uint64_t host_macs = 0;
  std::uint64_t global_total = 0;  // host + modules in Global mode
  std::uint64_t local_total = 0;   // host + modules in Local mode
  std::vector<WindowSpec> stage_windows;

  double overhead_fraction() const {
    return static_cast<double>(local_total - global_total) / static_cast<double>(global_total);
  }
};

/// Inserts the module after every encoder stage of `host` at an H×W input.
/// Stage windows come from calibrate_windows with `window` as the
/// calibration image size and stage scales 1/2^l.
OverheadReport host_overhead(ModuleKind kind, const HostModel& host, std::size_t height,
                             std::size_t width, const WindowSpec& window,
                             std::size_t se_ratio = 16, std::size_t groups_per_stage = 1);

}  // namespace tlc
