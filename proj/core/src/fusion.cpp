#include "tlc/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlc/errors.hpp"

namespace tlc {
namespace {

std::vector<std::size_t> axis_positions(std::size_t n, std::size_t k, std::size_t s) {
  std::vector<std::size_t> out;
  std::size_t p = 0;
  for (; p + k <= n; p += s) out.push_back(p);
  if (out.back() + k < n) out.push_back(n - k);
  return out;
}

// Boundary flags for the edge between index e-1 and e along one axis.
std::vector<bool> tile_edges(std::span<const std::size_t> positions, std::size_t k, std::size_t n) {
  std::vector<bool> edge(n, false);
  for (std::size_t p : positions) {
    if (p > 0) edge[p] = true;
    if (p + k < n) edge[p + k] = true;
  }
  return edge;
}

}  // namespace

TilePlan plan_tiles(std::size_t height, std::size_t width, std::size_t k_h, std::size_t k_w,
                    std::size_t s_h, std::size_t s_w) {
  if (height == 0 || width == 0 || k_h == 0 || k_w == 0 || s_h == 0 || s_w == 0) {
    throw Error(ErrorCode::kInvalidArgument, "tile plan sizes must be >= 1");
  }
  TilePlan plan;
  plan.height = height;
  plan.width = width;
  plan.k_h = std::min(k_h, height);
  plan.k_w = std::min(k_w, width);
  plan.s_h = std::min(s_h, plan.k_h);
  plan.s_w = std::min(s_w, plan.k_w);
  for (std::size_t r : axis_positions(height, plan.k_h, plan.s_h)) {
    for (std::size_t c : axis_positions(width, plan.k_w, plan.s_w)) {
      plan.placements.push_back({r, c});
    }
  }
  return plan;
}

TilePlan plan_tiles_default_stride(std::size_t height, std::size_t width, std::size_t k_h,
                                   std::size_t k_w) {
  const std::size_t kh = std::min(k_h, height);
  const std::size_t kw = std::min(k_w, width);
  return plan_tiles(height, width, kh, kw, std::max<std::size_t>(kh / 2, 1),
                    std::max<std::size_t>(kw / 2, 1));
}

std::vector<std::uint32_t> TilePlan::coverage() const {
  std::vector<std::uint32_t> counts(height * width, 0);
  for (const TilePlacement& p : placements) {
    for (std::size_t i = p.row; i < p.row + k_h; ++i) {
      for (std::size_t j = p.col; j < p.col + k_w; ++j) counts[i * width + j]++;
    }
  }
  return counts;
}

FeatureMap apply_and_fuse(const FeatureMap& x, const TilePlan& plan, const WindowTransform& op,
                          std::span<const std::size_t> order) {
  if (x.height() != plan.height || x.width() != plan.width) {
    throw Error(ErrorCode::kShapeMismatch, "tile plan was made for a different map size");
  }
  std::vector<std::size_t> sequence(order.begin(), order.end());
  if (sequence.empty()) {
    sequence.resize(plan.placements.size());
    for (std::size_t i = 0; i < sequence.size(); ++i) sequence[i] = i;
  }

  std::vector<double> sums(x.size(), 0.0);
  for (std::size_t index : sequence) {
    const TilePlacement& p = plan.placements.at(index);
    const FeatureMap window = x.crop(p.row, p.col, plan.k_h, plan.k_w);
    const FeatureMap result = op(window);
    if (!result.same_shape(window)) {
      throw Error(ErrorCode::kOpShapeViolation,
                  "window transform returned " + std::to_string(result.channels()) + "x" +
                      std::to_string(result.height()) + "x" + std::to_string(result.width()));
    }
    for (std::size_t c = 0; c < x.channels(); ++c) {
      for (std::size_t i = 0; i < plan.k_h; ++i) {
        double* dst = &sums[(c * x.height() + p.row + i) * x.width() + p.col];
        for (std::size_t j = 0; j < plan.k_w; ++j) dst[j] += result(c, i, j);
      }
    }
  }

  const std::vector<std::uint32_t> counts = plan.coverage();
  std::vector<double> fused(x.size());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t k = 0; k < counts.size(); ++k) {
      const std::size_t flat = c * counts.size() + k;
      fused[flat] = sums[flat] / static_cast<double>(counts[k]);
    }
  }
  return FeatureMap(x.channels(), x.height(), x.width(), std::move(fused));
}

FeatureMap patch_inference_baseline(const FeatureMap& x, const TilePlan& plan,
                                    const WindowTransform& pipeline) {
  return apply_and_fuse(x, plan, pipeline);
}

std::vector<double> attention_matrix(const FeatureMap& window, const AttnParams& params) {
  if (!(params.temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "attention temperature must be positive");
  }
  const std::size_t channels = window.channels();
  const std::size_t n = window.plane_size();

  std::vector<double> normalized(channels * n, 0.0);
  for (std::size_t c = 0; c < channels; ++c) {
    const auto v = window.channel(c);
    double norm = 0.0;
    for (double t : v) norm += t * t;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (std::size_t i = 0; i < n; ++i) normalized[c * n + i] = v[i] / norm;
    }
  }

  std::vector<double> attn(channels * channels);
  for (std::size_t a = 0; a < channels; ++a) {
    double row_max = -INFINITY;
    for (std::size_t b = 0; b < channels; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += normalized[a * n + i] * normalized[b * n + i];
      attn[a * channels + b] = dot * params.temperature;
      row_max = std::max(row_max, attn[a * channels + b]);
    }
    double total = 0.0;
    for (std::size_t b = 0; b < channels; ++b) {
      double& e = attn[a * channels + b];
      e = std::exp(e - row_max);
      total += e;
    }
    for (std::size_t b = 0; b < channels; ++b) attn[a * channels + b] /= total;
  }
  return attn;
}

FeatureMap transposed_attention(const FeatureMap& window, const AttnParams& params) {
  const std::vector<double> attn = attention_matrix(window, params);
  const std::size_t channels = window.channels();
  FeatureMap out(channels, window.height(), window.width());
  for (std::size_t a = 0; a < channels; ++a) {
    auto dst = out.channel(a);
    for (std::size_t b = 0; b < channels; ++b) {
      const double w = attn[a * channels + b];
      const auto src = window.channel(b);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

FeatureMap mean_broadcast(const FeatureMap& window) {
  FeatureMap out = window;
  for (std::size_t c = 0; c < window.channels(); ++c) {
    auto values = out.channel(c);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    std::fill(values.begin(), values.end(), mean);
  }
  return out;
}

double seam_metric(const FeatureMap& x, const TilePlan& plan) {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (const TilePlacement& p : plan.placements) {
    rows.push_back(p.row);
    cols.push_back(p.col);
  }
  const std::vector<bool> row_edge = tile_edges(rows, plan.k_h, x.height());
  const std::vector<bool> col_edge = tile_edges(cols, plan.k_w, x.width());

  struct Tally {
    double seam_sum = 0.0;
    double other_sum = 0.0;
    std::size_t seam_count = 0;
    std::size_t other_count = 0;
    void add(bool seam, double d) {
      (seam ? seam_sum : other_sum) += d;
      (seam ? seam_count : other_count)++;
    }
  };
  Tally horizontal;  // pairs (i, j-1)-(i, j)
  Tally vertical;    // pairs (i-1, j)-(i, j)
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t i = 0; i < x.height(); ++i) {
      for (std::size_t j = 0; j < x.width(); ++j) {
        if (j > 0) horizontal.add(col_edge[j], std::abs(x(c, i, j) - x(c, i, j - 1)));
        if (i > 0) vertical.add(row_edge[i], std::abs(x(c, i, j) - x(c, i - 1, j)));
      }
    }
  }

  double weighted = 0.0;
  std::size_t weight = 0;
  for (const Tally& t : {horizontal, vertical}) {
    if (t.seam_count == 0 || t.other_count == 0) continue;
    const double excess = t.seam_sum / static_cast<double>(t.seam_count) -
                          t.other_sum / static_cast<double>(t.other_count);
    weighted += excess * static_cast<double>(t.seam_count);
    weight += t.seam_count;
  }
  if (weight == 0) return 0.0;
  return std::max(weighted / static_cast<double>(weight), 0.0);
}

}  // namespace tlc
