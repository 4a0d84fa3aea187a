#pragma once

#include <algorithm>
#include <cstddef>

namespace tlc {

enum class WindowAlignment { kCentered };
enum class EdgeMode { kReplicateResult };

/// Local window size (k_h, k_w). On an H×W map the effective window is
/// (min(k_h, H), min(k_w, W)); a window covering the whole map reproduces
/// the global operator.
struct WindowSpec {
  std::size_t k_h = 384;
  std::size_t k_w = 384;
  WindowAlignment alignment = WindowAlignment::kCentered;
  EdgeMode edge_mode = EdgeMode::kReplicateResult;

  static WindowSpec square(std::size_t k) { return {k, k}; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Placement of the valid (non-replicated) region of a windowed result.
///
/// Windows with top-left (r, c) in [0, rows) × [0, cols) are fully inside
/// the map; each one's value lands on pixel (r + top, c + left). Pixels
/// outside that block copy the nearest interior value.
struct WindowGeometry {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t k_h = 0;  // effective, clamped to height
  std::size_t k_w = 0;  // effective, clamped to width
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t top = 0;
  std::size_t left = 0;

  /// Throws InvalidArgument for a zero-sized window or map.
  static WindowGeometry make(std::size_t height, std::size_t width, const WindowSpec& window);

  bool covers_whole_map() const { return rows == 1 && cols == 1 && k_h == height && k_w == width; }

  /// Interior index of the window whose result is replicated onto (row, col).
  std::size_t source_row(std::size_t row) const {
    return std::min(row < top ? 0 : row - top, rows - 1);
  }
  std::size_t source_col(std::size_t col) const {
    return std::min(col < left ? 0 : col - left, cols - 1);
  }
};

}  // namespace tlc
