#pragma once

#include "tlc/feature_map.hpp"

namespace tlc {

struct MetricReport {
  double mse = 0.0;
  double psnr_db = 0.0;  // +inf iff mse == 0
};

/// PSNR = 10*log10(peak^2 / mse). Throws ShapeMismatch or InvalidArgument (peak <= 0).
MetricReport psnr(const FeatureMap& reference, const FeatureMap& candidate, double peak);

}  // namespace tlc
