#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "tlc/feature_map.hpp"
#include "tlc/window.hpp"

namespace tlc {

enum class NoiseLayout { kTwoRegion, kUniform, kZero };
NoiseLayout parse_noise_layout(std::string_view name);
std::string_view to_string(NoiseLayout layout);

struct DemoConfig {
  std::size_t height = 256;
  std::size_t width = 256;
  WindowSpec window{32, 32};
  std::uint64_t seed = 42;
  NoiseLayout layout = NoiseLayout::kTwoRegion;
  double sigma_left = 0.05;   // also the uniform level
  double sigma_right = 0.5;
  std::size_t support = 5;    // pixel support of the shrinkage statistics
};

/// Piecewise-smooth test signal in [0, 1].
Plane demo_signal(std::size_t height, std::size_t width);

/// Wiener-style shrinkage of the average of two exposures.
///
/// With avg = (a + b) / 2 and diff = (a - b) / 2, diff is pure noise with
/// the same variance as the noise left in avg. Over a `support` window,
/// (m, v) = local mean/variance of avg; the noise power n is the variance of
/// diff, taken over the whole map (`noise_window` empty) or over a TLC window.
/// Then s2 = max(v - n, 0), g = s2 / (s2 + n) (1 when both vanish) and the
/// result is m + g (avg - m).
Plane wiener_restore(PlaneView exposure_a, PlaneView exposure_b, std::size_t support,
                     const WindowSpec* noise_window);

struct DemoResult {
  Plane clean;
  Plane exposure_a;
  Plane exposure_b;
  Plane restored_global;
  Plane restored_local;
  double psnr_global = 0.0;
  double psnr_local = 0.0;
};

/// Generates the signal and two noisy exposures (rounded to float32 so the
/// written tensors reproduce the run), restores with global and local noise
/// statistics, and scores both against the clean signal at peak 1.
DemoResult run_demo(const DemoConfig& config);

}  // namespace tlc
