#include "tlc/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlc/errors.hpp"

namespace tlc {
namespace {

void require_positive(std::size_t c, std::size_t h, std::size_t w) {
  if (c == 0 || h == 0 || w == 0) {
    throw Error(ErrorCode::kShapeMismatch, "feature map dimensions must be positive, got " +
                                               std::to_string(c) + "x" + std::to_string(h) + "x" +
                                               std::to_string(w));
  }
}

}  // namespace

Plane::Plane(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), values_(height * width, fill) {}

Plane::Plane(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (values_.size() != height_ * width_) {
    throw Error(ErrorCode::kShapeMismatch, "plane data length does not match H*W");
  }
}

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width)
    : channels_(channels), height_(height), width_(width), values_(channels * height * width) {
  require_positive(channels, height, width);
}

FeatureMap::FeatureMap(std::size_t channels, std::size_t height, std::size_t width,
                       std::vector<double> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  require_positive(channels, height, width);
  if (values_.size() != channels * height * width) {
    throw Error(ErrorCode::kShapeMismatch,
                "data length " + std::to_string(values_.size()) + " != C*H*W = " +
                    std::to_string(channels * height * width));
  }
  auto bad = std::find_if(values_.begin(), values_.end(), [](double v) { return !std::isfinite(v); });
  if (bad != values_.end()) {
    throw Error(ErrorCode::kNonFiniteValue,
                "non-finite value at flat index " + std::to_string(bad - values_.begin()));
  }
}

FeatureMap FeatureMap::from_planes(std::span<const Plane> planes) {
  if (planes.empty()) throw Error(ErrorCode::kShapeMismatch, "no planes given");
  const std::size_t h = planes.front().height();
  const std::size_t w = planes.front().width();
  std::vector<double> values;
  values.reserve(planes.size() * h * w);
  for (const Plane& p : planes) {
    if (p.height() != h || p.width() != w) {
      throw Error(ErrorCode::kShapeMismatch, "planes differ in size");
    }
    values.insert(values.end(), p.values().begin(), p.values().end());
  }
  return FeatureMap(planes.size(), h, w, std::move(values));
}

FeatureMap FeatureMap::crop(std::size_t row, std::size_t col, std::size_t h, std::size_t w) const {
  if (row + h > height_ || col + w > width_ || h == 0 || w == 0) {
    throw Error(ErrorCode::kShapeMismatch, "crop outside map bounds");
  }
  FeatureMap out(channels_, h, w);
  for (std::size_t c = 0; c < channels_; ++c) {
    for (std::size_t i = 0; i < h; ++i) {
      const double* src = &values_[(c * height_ + row + i) * width_ + col];
      std::copy(src, src + w, &out(c, i, 0));
    }
  }
  return out;
}

}  // namespace tlc
