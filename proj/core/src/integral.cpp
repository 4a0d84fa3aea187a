#include "tlc/integral.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "tlc/errors.hpp"

namespace tlc {

WindowGeometry WindowGeometry::make(std::size_t height, std::size_t width,
                                    const WindowSpec& window) {
  if (height == 0 || width == 0) throw Error(ErrorCode::kInvalidArgument, "empty map");
  if (window.k_h == 0 || window.k_w == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window sizes must be >= 1");
  }
  WindowGeometry g;
  g.height = height;
  g.width = width;
  g.k_h = std::min(window.k_h, height);
  g.k_w = std::min(window.k_w, width);
  g.rows = height - g.k_h + 1;
  g.cols = width - g.k_w + 1;
  g.top = (g.k_h - 1) / 2;
  g.left = (g.k_w - 1) / 2;
  return g;
}

IntegralTable::IntegralTable(PlaneView x, Pointwise f, double offset)
    : rows_(x.height + 1), cols_(x.width + 1), offset_(offset), sums_(rows_ * cols_, 0.0) {
  for (std::size_t p = 0; p < x.height; ++p) {
    double row_sum = 0.0;
    const double* above = &sums_[p * cols_];
    double* current = &sums_[(p + 1) * cols_];
    for (std::size_t q = 0; q < x.width; ++q) {
      row_sum += apply(f, x(p, q)) - offset;
      current[q + 1] = above[q + 1] + row_sum;
    }
  }
}

IntegralTable& IntegralTable::operator+=(const IntegralTable& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw Error(ErrorCode::kShapeMismatch, "integral tables differ in size");
  }
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i] += other.sums_[i];
  offset_ += other.offset_;
  return *this;
}

double global_aggregate(PlaneView x, Pointwise f) {
  // Same offset as IntegralTable, so both paths agree exactly on constant data.
  const double offset = apply(f, x.data[0]);
  double sum = 0.0;
  for (double v : x.data) sum += apply(f, v) - offset;
  return offset + sum / static_cast<double>(x.size());
}

Plane interior_window_mean(const IntegralTable& table, const WindowGeometry& g,
                           std::size_t stacked_channels) {
  Plane out(g.rows, g.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    for (std::size_t c = 0; c < g.cols; ++c) {
      out(r, c) = table.rect_mean(r, r + g.k_h, c, c + g.k_w, stacked_channels);
    }
  }
  return out;
}

Plane replicate_pad(Plane interior, const WindowGeometry& g) {
  if (g.rows == g.height && g.cols == g.width) return interior;
  Plane out(g.height, g.width);
  for (std::size_t i = 0; i < g.height; ++i) {
    const double* src = &interior(g.source_row(i), 0);
    double* dst = &out(i, 0);
    for (std::size_t j = 0; j < g.left; ++j) dst[j] = src[0];
    std::copy(src, src + g.cols, dst + g.left);
    for (std::size_t j = g.left + g.cols; j < g.width; ++j) dst[j] = src[g.cols - 1];
  }
  return out;
}

Plane local_aggregate(PlaneView x, Pointwise f, const WindowSpec& window) {
  const WindowGeometry g = WindowGeometry::make(x.height, x.width, window);
  if (g.k_h == 1 && g.k_w == 1) {
    Plane out(x.height, x.width);
    for (std::size_t i = 0; i < x.size(); ++i) out.values()[i] = apply(f, x.data[i]);
    return out;
  }
  return replicate_pad(interior_window_mean(IntegralTable::centered(x, f), g), g);
}

MeanVar local_mean_var(PlaneView x, const WindowSpec& window) {
  Plane mean = local_aggregate(x, Pointwise::kIdentity, window);
  Plane var = local_aggregate(x, Pointwise::kSquare, window);
  for (std::size_t i = 0; i < var.size(); ++i) {
    const double m = mean.values()[i];
    var.values()[i] = std::max(var.values()[i] - m * m, 0.0);
  }
  return {std::move(mean), std::move(var)};
}

namespace {

// Maxima of every length-k run of `in` (stride `in_step`) starting at
// 0..count-1, written to `out` (stride `out_step`). `prefix`/`suffix` are
// scratch buffers of at least `n` elements.
void running_max(const double* in, std::size_t in_step, std::size_t n, std::size_t k,
                 double* out, std::size_t out_step, std::vector<double>& prefix,
                 std::vector<double>& suffix) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = in[i * in_step];
    prefix[i] = (i % k == 0) ? v : std::max(prefix[i - 1], v);
  }
  for (std::size_t i = n; i-- > 0;) {
    const double v = in[i * in_step];
    suffix[i] = (i == n - 1 || (i + 1) % k == 0) ? v : std::max(suffix[i + 1], v);
  }
  const std::size_t count = n - k + 1;
  for (std::size_t t = 0; t < count; ++t) {
    out[t * out_step] = std::max(suffix[t], prefix[t + k - 1]);
  }
}

}  // namespace

Plane interior_window_max(PlaneView x, const WindowGeometry& g) {
  std::vector<double> prefix(std::max(g.height, g.width));
  std::vector<double> suffix(prefix.size());

  // Horizontal pass: H × cols.
  Plane rows_max(g.height, g.cols);
  for (std::size_t i = 0; i < g.height; ++i) {
    running_max(&x.data[i * g.width], 1, g.width, g.k_w, &rows_max(i, 0), 1, prefix, suffix);
  }
  // Vertical pass: rows × cols.
  Plane out(g.rows, g.cols);
  for (std::size_t j = 0; j < g.cols; ++j) {
    running_max(&rows_max(0, j), g.cols, g.height, g.k_h, &out(0, j), g.cols, prefix, suffix);
  }
  return out;
}

Plane local_max(PlaneView x, const WindowSpec& window) {
  const WindowGeometry g = WindowGeometry::make(x.height, x.width, window);
  return replicate_pad(interior_window_max(x, g), g);
}

Plane strided_local_mean(PlaneView x, const WindowSpec& window, std::size_t stride) {
  if (stride == 0) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  const WindowGeometry g = WindowGeometry::make(x.height, x.width, window);
  if (stride == 1) return local_aggregate(x, Pointwise::kIdentity, window);

  const std::size_t sh = (x.height + stride - 1) / stride;
  const std::size_t sw = (x.width + stride - 1) / stride;
  std::vector<double> sampled(sh * sw);
  for (std::size_t i = 0; i < sh; ++i) {
    for (std::size_t j = 0; j < sw; ++j) sampled[i * sw + j] = x(i * stride, j * stride);
  }
  const auto table = IntegralTable::centered(PlaneView{sampled, sh, sw}, Pointwise::kIdentity);

  // Grid rows inside [a, a + k) are ceil(a / r) .. ceil((a + k) / r) - 1.
  auto first_sample = [stride](std::size_t pos) { return (pos + stride - 1) / stride; };

  Plane interior(g.rows, g.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    const std::size_t r0 = first_sample(r);
    const std::size_t r1 = first_sample(r + g.k_h);
    for (std::size_t c = 0; c < g.cols; ++c) {
      const std::size_t c0 = first_sample(c);
      const std::size_t c1 = first_sample(c + g.k_w);
      const std::size_t count = (r1 - r0) * (c1 - c0);
      if (count == 0) {
        throw Error(ErrorCode::kEmptyWindowSample,
                    "window at (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") contains no sample for stride " + std::to_string(stride));
      }
      interior(r, c) = table.rect_mean(r0, r1, c0, c1);
    }
  }
  return replicate_pad(std::move(interior), g);
}

}  // namespace tlc
