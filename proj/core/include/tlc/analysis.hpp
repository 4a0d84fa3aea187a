#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlc/feature_map.hpp"
#include "tlc/random.hpp"
#include "tlc/window.hpp"

namespace tlc {

enum class SampleLabel { kTrainPatch, kTestImage, kTestImageTLC };
std::string_view to_string(SampleLabel label);

/// Pooled statistics drawn from one population.
struct SampleSet {
  SampleLabel label = SampleLabel::kTestImage;
  std::vector<double> values;
};

double sample_mean(std::span<const double> values);
/// Unbiased (n - 1) sample standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> values);

using MapGenerator = std::function<FeatureMap(Rng&)>;

struct PatchSize {
  std::size_t height = 0;
  std::size_t width = 0;
};

/// Draws n pooled means of channel 0, one per generated map:
///   patch given   -> mean of a uniformly placed patch   (TrainPatch)
///   window given  -> local mean at a uniform pixel       (TestImageTLC)
///   neither       -> mean of the whole map               (TestImage)
/// A placement coordinate is drawn with Rng::below only when more than one
/// value is possible. Throws PatchTooLarge, or InvalidArgument if both patch
/// and window are set.
SampleSet sample_pooled_stats(const MapGenerator& source, Rng& rng, std::size_t n,
                              std::optional<PatchSize> patch = std::nullopt,
                              std::optional<WindowSpec> window = std::nullopt);

/// Two-sample Kolmogorov-Smirnov statistic sup |ECDF_a - ECDF_b|.
double ks_distance(std::span<const double> a, std::span<const double> b);
inline double ks_distance(const SampleSet& a, const SampleSet& b) {
  return ks_distance(a.values, b.values);
}

struct HistogramBin {
  double left = 0.0;
  std::size_t count = 0;
};

/// Equal-width bins over [min, max]; the maximum falls in the last bin.
std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins);

// Synthetic sources.
MapGenerator constant_field(std::size_t channels, std::size_t height, std::size_t width,
                            double value);
/// i.i.d. standard normal values.
MapGenerator white_noise(std::size_t channels, std::size_t height, std::size_t width);
/// Per-channel low-frequency plane waves plus white noise, so local means
/// vary across the map while whole-map means concentrate.
MapGenerator varying_field(std::size_t channels, std::size_t height, std::size_t width);

/// Fixed random-weight feature stack: per-channel affine + ReLU, then a
/// positive channel mix to a single output channel.
class FeatureStack {
 public:
  static FeatureStack random(std::size_t channels, Rng& rng);

  FeatureMap apply(const FeatureMap& x) const;
  std::size_t channels() const { return scale_.size(); }

 private:
  std::vector<double> scale_;
  std::vector<double> shift_;
  std::vector<double> mix_;
};

MapGenerator with_stack(MapGenerator source, FeatureStack stack);

enum class SourceKind { kVarying, kWhiteNoise, kConstant };
SourceKind parse_source_kind(std::string_view name);
std::string_view to_string(SourceKind kind);

struct ShiftExperimentConfig {
  SourceKind source = SourceKind::kVarying;
  std::size_t channels = 4;
  std::size_t height = 256;
  std::size_t width = 256;
  std::size_t patch = 64;  // training patch edge; also the TLC window
  std::size_t samples = 500;
  std::uint64_t seed = 42;
};

struct ShiftExperimentResult {
  SampleSet train_patch;
  SampleSet test_image;
  SampleSet test_tlc;
  double ks_train_test = 0.0;
  double ks_train_tlc = 0.0;

  /// KS(TrainPatch, TLC) < KS(TrainPatch, TestImage), or no shift at all.
  bool shift_reduced() const;
};

/// Train-patch vs full-image vs TLC pooled-statistic populations through a
/// fixed random FeatureStack. Deterministic in the seed: the stack and the
/// three populations each use their own Rng::fork stream.
ShiftExperimentResult run_shift_experiment(const ShiftExperimentConfig& config);

struct LayerInfo {
  std::string name;
  double scale = 1.0;
  bool has_global_op = true;
};

struct LayerGraph {
  std::vector<LayerInfo> layers;

  /// Throws InvalidArgument on non-positive scales or when no layer is flagged.
  void validate() const;
};

/// Parses lines of `name scale [flag]`; scale may be a fraction like 1/4,
/// flag is 0/1 (default 1). `#` comments allowed.
LayerGraph parse_layer_graph(const std::string& text);

struct CalibratedWindow {
  std::string layer;
  std::size_t k_h = 0;
  std::size_t k_w = 0;
};

/// Feeds a calib_h × calib_w image through the graph's scale factors and
/// records each flagged layer's spatial size (rounded half up) as its window.
/// Throws DegenerateScale when a scaled size rounds below 1.
std::vector<CalibratedWindow> calibrate_windows(const LayerGraph& graph, std::size_t calib_h,
                                                std::size_t calib_w);

}  // namespace tlc
