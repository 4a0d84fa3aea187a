#pragma once

#include <cstddef>
#include <vector>

#include "tlc/feature_map.hpp"
#include "tlc/window.hpp"

namespace tlc {

enum class Pointwise { kIdentity, kSquare };

inline double apply(Pointwise f, double t) { return f == Pointwise::kSquare ? t * t : t; }

/// Summed-area table over f(x) - offset: sums(p, q) is the sum over rows
/// [0, p) and cols [0, q); row 0 and column 0 are zero. Accumulates in
/// double. centered() picks f at the first pixel as the offset, so a window
/// of identical values sums to exactly zero and its mean comes back exact.
class IntegralTable {
 public:
  IntegralTable() = default;
  IntegralTable(PlaneView x, Pointwise f, double offset = 0.0);

  static IntegralTable centered(PlaneView x, Pointwise f) {
    return IntegralTable(x, f, apply(f, x.data[0]));
  }

  std::size_t rows() const { return rows_; }  // H + 1
  std::size_t cols() const { return cols_; }  // W + 1
  double offset() const { return offset_; }

  double operator()(std::size_t p, std::size_t q) const { return sums_[p * cols_ + q]; }

  /// Sum of f - offset over rows [r0, r1) × cols [c0, c1).
  double rect_sum(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
    return sums_[r1 * cols_ + c1] - sums_[r0 * cols_ + c1] - sums_[r1 * cols_ + c0] +
           sums_[r0 * cols_ + c0];
  }

  /// Mean of f over the rectangle. After `stacked` tables have been added
  /// together, this is the mean over all of their planes.
  double rect_mean(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1,
                   std::size_t stacked = 1) const {
    const double n = static_cast<double>(stacked);
    const double area = static_cast<double>((r1 - r0) * (c1 - c0)) * n;
    return offset_ / n + rect_sum(r0, r1, c0, c1) / area;
  }

  /// Element-wise accumulation of another table of identical size.
  IntegralTable& operator+=(const IntegralTable& other);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double offset_ = 0.0;
  std::vector<double> sums_;
};

inline IntegralTable build_integral(PlaneView x, Pointwise f) { return IntegralTable(x, f); }

/// Mean of f over the whole plane.
double global_aggregate(PlaneView x, Pointwise f);

/// Windowed mean of f. Interior windows are evaluated with four table
/// lookups each and the result is replicate-padded to H×W, so the cost is
/// O(HW) whatever the window size.
Plane local_aggregate(PlaneView x, Pointwise f, const WindowSpec& window);

struct MeanVar {
  Plane mean;
  Plane var;
};

/// var = local E[x^2] - mean^2, clamped at zero.
MeanVar local_mean_var(PlaneView x, const WindowSpec& window);

/// Windowed maximum with the same placement and replication as local_aggregate.
/// Separable van Herk/Gil-Werman running max: about three comparisons per
/// element per axis, independent of the window size.
Plane local_max(PlaneView x, const WindowSpec& window);

/// Approximate local mean from the grid x[::stride, ::stride] anchored at
/// (0, 0). stride == 1 reproduces local_aggregate(x, kIdentity, window)
/// bit for bit. Throws EmptyWindowSample if some window holds no grid point.
Plane strided_local_mean(PlaneView x, const WindowSpec& window, std::size_t stride);

// Building blocks shared with the convertible modules.

/// Mean over every fully-interior window: a geometry.rows × geometry.cols plane.
/// `stacked_channels` is the number of per-channel tables summed into `table`.
Plane interior_window_mean(const IntegralTable& table, const WindowGeometry& geometry,
                           std::size_t stacked_channels = 1);

/// Interior window maxima: geometry.rows × geometry.cols.
Plane interior_window_max(PlaneView x, const WindowGeometry& geometry);

/// Expands an interior result to geometry.height × geometry.width by replication.
Plane replicate_pad(Plane interior, const WindowGeometry& geometry);

}  // namespace tlc
