#pragma once

// Test-only reference computations. They share no code with the library's
// window machinery: every window is re-derived from its pixel and summed
// directly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "tlc/feature_map.hpp"
#include "tlc/random.hpp"

namespace tlc::testing {

/// Top-left of the window whose value pixel `i` carries on an axis of length
/// n with effective window k: centered at floor((k-1)/2), clamped to the map.
inline std::size_t window_start(std::size_t i, std::size_t n, std::size_t k) {
  const std::size_t kk = std::min(k, n);
  const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>((kk - 1) / 2);
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - kk)));
}

enum class WindowStat { kMean, kSquareMean, kVariance, kMax };

inline double window_stat(const std::vector<double>& x, std::size_t h, std::size_t w,
                          std::size_t i, std::size_t j, std::size_t kh, std::size_t kw,
                          WindowStat stat) {
  const std::size_t r0 = window_start(i, h, kh);
  const std::size_t c0 = window_start(j, w, kw);
  const std::size_t ekh = std::min(kh, h);
  const std::size_t ekw = std::min(kw, w);
  double sum = 0.0;
  double sq = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t r = r0; r < r0 + ekh; ++r) {
    for (std::size_t c = c0; c < c0 + ekw; ++c) {
      const double v = x[r * w + c];
      sum += v;
      sq += v * v;
      best = std::max(best, v);
    }
  }
  const double n = static_cast<double>(ekh * ekw);
  switch (stat) {
    case WindowStat::kMean: return sum / n;
    case WindowStat::kSquareMean: return sq / n;
    case WindowStat::kMax: return best;
    case WindowStat::kVariance: {
      const double mean = sum / n;
      double dev = 0.0;
      for (std::size_t r = r0; r < r0 + ekh; ++r) {
        for (std::size_t c = c0; c < c0 + ekw; ++c) dev += (x[r * w + c] - mean) * (x[r * w + c] - mean);
      }
      return dev / n;
    }
  }
  return 0.0;
}

/// Whole-plane oracle for a windowed statistic.
inline std::vector<double> window_stat_map(const std::vector<double>& x, std::size_t h,
                                           std::size_t w, std::size_t kh, std::size_t kw,
                                           WindowStat stat) {
  std::vector<double> out(h * w);
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = window_stat(x, h, w, i, j, kh, kw, stat);
  }
  return out;
}

inline std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& t : v) t = rng.uniform(lo, hi);
  return v;
}

/// Random map with float32-representable values.
inline FeatureMap random_map(Rng& rng, std::size_t c, std::size_t h, std::size_t w,
                             double lo = -1.0, double hi = 1.0) {
  std::vector<double> v = random_values(rng, c * h * w, lo, hi);
  for (double& t : v) t = static_cast<float>(t);
  return FeatureMap(c, h, w, std::move(v));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
  return best;
}

inline double max_abs_diff(const FeatureMap& a, const FeatureMap& b) {
  return max_abs_diff(a.values(), b.values());
}

inline double max_abs_diff(const Plane& a, std::span<const double> b) {
  return max_abs_diff(a.values(), b);
}

inline double max_abs_diff(const Plane& a, const Plane& b) {
  return max_abs_diff(a.values(), b.values());
}

}  // namespace tlc::testing
