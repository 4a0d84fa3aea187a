#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tlc {

/// Read-only view of one H×W channel, row-major.
struct PlaneView {
  std::span<const double> data;
  std::size_t height = 0;
  std::size_t width = 0;

  double operator()(std::size_t row, std::size_t col) const { return data[row * width + col]; }
  std::size_t size() const { return height * width; }
};

/// Owning single-channel H×W map.
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t height, std::size_t width, double fill = 0.0);
  Plane(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }

  std::span<const double> values() const& { return values_; }
  std::span<double> values() & { return values_; }
  std::span<const double> values() const&& = delete;  // would dangle

  PlaneView view() const { return {values_, height_, width_}; }
  operator PlaneView() const { return view(); }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

/// C×H×W activations, channels outermost, row-major within a channel.
/// Values are held in double precision; the on-disk format is float32.
class FeatureMap {
 public:
  FeatureMap() = default;
  /// Zero-filled map. Dimensions must be positive.
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width);
  /// Throws ShapeMismatch if values.size() != C·H·W, NonFiniteValue on NaN/Inf.
  FeatureMap(std::size_t channels, std::size_t height, std::size_t width,
             std::vector<double> values);

  static FeatureMap from_planes(std::span<const Plane> planes);

  std::size_t channels() const { return channels_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t plane_size() const { return height_ * width_; }
  std::size_t size() const { return values_.size(); }

  double operator()(std::size_t c, std::size_t row, std::size_t col) const {
    return values_[(c * height_ + row) * width_ + col];
  }
  double& operator()(std::size_t c, std::size_t row, std::size_t col) {
    return values_[(c * height_ + row) * width_ + col];
  }

  std::span<const double> values() const& { return values_; }
  std::span<double> values() & { return values_; }
  std::span<const double> values() const&& = delete;  // would dangle

  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(values_).subspan(c * plane_size(), plane_size());
  }
  std::span<double> channel(std::size_t c) {
    return std::span<double>(values_).subspan(c * plane_size(), plane_size());
  }
  PlaneView view(std::size_t c) const { return {channel(c), height_, width_}; }

  bool same_shape(const FeatureMap& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

  /// Copy of the rows [row, row+h) × cols [col, col+w) of every channel.
  FeatureMap crop(std::size_t row, std::size_t col, std::size_t h, std::size_t w) const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

}  // namespace tlc
