#include "tlc/demo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tlc/errors.hpp"
#include "tlc/integral.hpp"
#include "tlc/metrics.hpp"
#include "tlc/random.hpp"

namespace tlc {

NoiseLayout parse_noise_layout(std::string_view name) {
  for (NoiseLayout layout : {NoiseLayout::kTwoRegion, NoiseLayout::kUniform, NoiseLayout::kZero}) {
    if (name == to_string(layout)) return layout;
  }
  throw Error(ErrorCode::kUsage, "unknown noise layout '" + std::string(name) + "'");
}

std::string_view to_string(NoiseLayout layout) {
  switch (layout) {
    case NoiseLayout::kTwoRegion: return "two-region";
    case NoiseLayout::kUniform: return "uniform";
    case NoiseLayout::kZero: return "zero";
  }
  return "unknown";
}

Plane demo_signal(std::size_t height, std::size_t width) {
  constexpr double kTau = 2.0 * std::numbers::pi;
  Plane s(height, width);
  for (std::size_t i = 0; i < height; ++i) {
    const double v = static_cast<double>(i) / static_cast<double>(height);
    for (std::size_t j = 0; j < width; ++j) {
      const double u = static_cast<double>(j) / static_cast<double>(width);
      double value = (u + 0.3 * v < 0.55) ? 0.3 + 0.2 * std::sin(kTau * 1.5 * v) + 0.1 * u
                                          : 0.7 - 0.2 * std::cos(kTau * (u + v));
      if ((u - 0.7) * (u - 0.7) + (v - 0.3) * (v - 0.3) < 0.02) value = 0.9 - 0.3 * v;
      s(i, j) = value;
    }
  }
  return s;
}

Plane wiener_restore(PlaneView exposure_a, PlaneView exposure_b, std::size_t support,
                     const WindowSpec* noise_window) {
  if (exposure_a.height != exposure_b.height || exposure_a.width != exposure_b.width) {
    throw Error(ErrorCode::kShapeMismatch, "exposures differ in size");
  }
  const std::size_t h = exposure_a.height;
  const std::size_t w = exposure_a.width;
  Plane avg(h, w);
  Plane diff(h, w);
  for (std::size_t k = 0; k < avg.size(); ++k) {
    avg.values()[k] = 0.5 * (exposure_a.data[k] + exposure_b.data[k]);
    diff.values()[k] = 0.5 * (exposure_a.data[k] - exposure_b.data[k]);
  }

  const MeanVar stats = local_mean_var(avg, WindowSpec::square(support));
  Plane noise(h, w);
  if (noise_window) {
    noise = local_mean_var(diff, *noise_window).var;
  } else {
    const double m = global_aggregate(diff, Pointwise::kIdentity);
    const double var = std::max(global_aggregate(diff, Pointwise::kSquare) - m * m, 0.0);
    noise = Plane(h, w, var);
  }

  Plane out(h, w);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double m = stats.mean.values()[k];
    const double n = noise.values()[k];
    const double signal = std::max(stats.var.values()[k] - n, 0.0);
    const double denom = signal + n;
    const double gain = denom > 0.0 ? signal / denom : 1.0;
    out.values()[k] = m + gain * (avg.values()[k] - m);
  }
  return out;
}

DemoResult run_demo(const DemoConfig& config) {
  if (config.height == 0 || config.width == 0 || config.support == 0) {
    throw Error(ErrorCode::kInvalidArgument, "demo sizes must be >= 1");
  }
  auto to_storage = [](double v) { return static_cast<double>(static_cast<float>(v)); };

  DemoResult r;
  r.clean = demo_signal(config.height, config.width);
  for (double& v : r.clean.values()) v = to_storage(v);

  Rng rng(config.seed);
  r.exposure_a = Plane(config.height, config.width);
  r.exposure_b = Plane(config.height, config.width);
  for (Plane* exposure : {&r.exposure_a, &r.exposure_b}) {
    for (std::size_t i = 0; i < config.height; ++i) {
      for (std::size_t j = 0; j < config.width; ++j) {
        double sigma = 0.0;
        switch (config.layout) {
          case NoiseLayout::kTwoRegion:
            sigma = j < config.width / 2 ? config.sigma_left : config.sigma_right;
            break;
          case NoiseLayout::kUniform:
            sigma = config.sigma_left;
            break;
          case NoiseLayout::kZero:
            break;
        }
        const double n = rng.normal();
        (*exposure)(i, j) = to_storage(r.clean(i, j) + sigma * n);
      }
    }
  }

  r.restored_global = wiener_restore(r.exposure_a, r.exposure_b, config.support, nullptr);
  r.restored_local = wiener_restore(r.exposure_a, r.exposure_b, config.support, &config.window);

  auto as_map = [](const Plane& p) { return FeatureMap(1, p.height(), p.width(), {p.values().begin(), p.values().end()}); };
  const FeatureMap clean = as_map(r.clean);
  r.psnr_global = psnr(clean, as_map(r.restored_global), 1.0).psnr_db;
  r.psnr_local = psnr(clean, as_map(r.restored_local), 1.0).psnr_db;
  return r;
}

}  // namespace tlc
