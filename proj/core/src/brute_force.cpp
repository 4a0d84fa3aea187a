#include "tlc/brute_force.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace tlc::brute_force {
namespace {

template <typename WindowFn>
Plane evaluate(PlaneView x, const WindowSpec& window, WindowFn&& fn) {
  const WindowGeometry g = WindowGeometry::make(x.height, x.width, window);
  Plane interior(g.rows, g.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) interior(r, c) = fn(r, c, g);
  }
  return replicate_pad(std::move(interior), g);
}

double window_mean(PlaneView x, Pointwise f, std::size_t r, std::size_t c,
                   const WindowGeometry& g) {
  double sum = 0.0;
  for (std::size_t i = r; i < r + g.k_h; ++i) {
    const double* row = &x.data[i * x.width + c];
    for (std::size_t j = 0; j < g.k_w; ++j) sum += apply(f, row[j]);
  }
  return sum / static_cast<double>(g.k_h * g.k_w);
}

}  // namespace

Plane local_aggregate(PlaneView x, Pointwise f, const WindowSpec& window) {
  return evaluate(x, window, [&](std::size_t r, std::size_t c, const WindowGeometry& g) {
    return window_mean(x, f, r, c, g);
  });
}

MeanVar local_mean_var(PlaneView x, const WindowSpec& window) {
  Plane mean = brute_force::local_aggregate(x, Pointwise::kIdentity, window);
  Plane var = evaluate(x, window, [&](std::size_t r, std::size_t c, const WindowGeometry& g) {
    const double m = window_mean(x, Pointwise::kIdentity, r, c, g);
    double sum = 0.0;
    for (std::size_t i = r; i < r + g.k_h; ++i) {
      const double* row = &x.data[i * x.width + c];
      for (std::size_t j = 0; j < g.k_w; ++j) sum += (row[j] - m) * (row[j] - m);
    }
    return sum / static_cast<double>(g.k_h * g.k_w);
  });
  return {std::move(mean), std::move(var)};
}

Plane local_max(PlaneView x, const WindowSpec& window) {
  return evaluate(x, window, [&](std::size_t r, std::size_t c, const WindowGeometry& g) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = r; i < r + g.k_h; ++i) {
      const double* row = &x.data[i * x.width + c];
      for (std::size_t j = 0; j < g.k_w; ++j) best = std::max(best, row[j]);
    }
    return best;
  });
}

}  // namespace tlc::brute_force
