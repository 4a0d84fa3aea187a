#include "tlc/metrics.hpp"

#include <cmath>
#include <limits>

#include "tlc/errors.hpp"

namespace tlc {

MetricReport psnr(const FeatureMap& reference, const FeatureMap& candidate, double peak) {
  if (!reference.same_shape(candidate)) {
    throw Error(ErrorCode::kShapeMismatch, "psnr operands differ in shape");
  }
  if (!(peak > 0.0)) throw Error(ErrorCode::kInvalidArgument, "peak must be positive");

  double sum = 0.0;
  auto a = reference.values();
  auto b = candidate.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  MetricReport report;
  report.mse = sum / static_cast<double>(a.size());
  report.psnr_db = report.mse == 0.0 ? std::numeric_limits<double>::infinity()
                                     : 10.0 * std::log10(peak * peak / report.mse);
  return report;
}

}  // namespace tlc
