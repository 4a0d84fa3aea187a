#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tlc/feature_map.hpp"
#include "tlc/random.hpp"
#include "tlc/window.hpp"

namespace tlc {

enum class ModuleKind { kSE, kIN, kGN, kGEThetaMinus, kCBAMChannel };

std::string_view to_string(ModuleKind kind);
/// Accepts "se", "in", "gn", "ge", "cbam" (case-insensitive).
ModuleKind parse_module_kind(std::string_view name);

/// Training semantics: statistics over the whole spatial extent.
struct Global {};
/// Test-time local conversion: statistics over a window around each pixel.
struct Local {
  WindowSpec window;
};
using Mode = std::variant<Global, Local>;

/// Two-layer channel MLP shared by SE and CBAM: expand · relu(reduce · v).
/// reduce is C × hidden and expand is hidden × C, both row-major.
class SeParams {
 public:
  SeParams(std::size_t channels, std::size_t ratio, std::vector<double> reduce,
           std::vector<double> expand);

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights.
  static SeParams random(std::size_t channels, std::size_t ratio, Rng& rng);

  std::size_t channels() const { return channels_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t ratio() const { return channels_ / hidden_; }
  std::span<const double> reduce() const { return reduce_; }
  std::span<const double> expand() const { return expand_; }

  /// Pre-sigmoid logits for one pooled channel vector. `hidden_scratch`
  /// must hold hidden() values and `out` channels() values.
  void logits(std::span<const double> pooled, std::span<double> hidden_scratch,
              std::span<double> out) const;

 private:
  std::size_t channels_;
  std::size_t hidden_;
  std::vector<double> reduce_;
  std::vector<double> expand_;
};

struct NormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  double eps = 1e-5;
  std::size_t groups = 1;

  /// gamma = 1, beta = 0. groups == channels gives instance norm.
  static NormParams identity(std::size_t channels, std::size_t groups, double eps = 1e-5);

  /// Throws ShapeMismatch or InvalidGroupCount if unusable with `channels`.
  void validate(std::size_t channels) const;
};

/// Squeeze-and-excitation: x * sigmoid(MLP(avg-pooled x)).
FeatureMap se_forward(const FeatureMap& x, const SeParams& params, const Mode& mode);

/// Instance/group normalization with per-channel affine.
FeatureMap norm_forward(const FeatureMap& x, const NormParams& params, const Mode& mode);

/// Parameter-free gather-excite: x * sigmoid(avg-pooled x).
FeatureMap ge_forward(const FeatureMap& x, const Mode& mode);

/// CBAM channel branch: x * sigmoid(MLP(avg-pooled x) + MLP(max-pooled x)).
FeatureMap cbam_channel_forward(const FeatureMap& x, const SeParams& params, const Mode& mode);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace tlc
