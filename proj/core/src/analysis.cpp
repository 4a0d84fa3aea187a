#include "tlc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tlc/errors.hpp"
#include "tlc/integral.hpp"

namespace tlc {

std::string_view to_string(SampleLabel label) {
  switch (label) {
    case SampleLabel::kTrainPatch: return "TrainPatch";
    case SampleLabel::kTestImage: return "TestImage";
    case SampleLabel::kTestImageTLC: return "TestImageTLC";
  }
  return "Unknown";
}

double sample_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  // Offset by the first value so identical samples average exactly.
  double sum = 0.0;
  for (double v : values) sum += v - values[0];
  return values[0] + sum / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = sample_mean(values);
  double sum = 0.0;
  for (double v : values) sum += (v - m) * (v - m);
  return std::sqrt(sum / static_cast<double>(values.size() - 1));
}

SampleSet sample_pooled_stats(const MapGenerator& source, Rng& rng, std::size_t n,
                              std::optional<PatchSize> patch, std::optional<WindowSpec> window) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  if (patch && window) {
    throw Error(ErrorCode::kInvalidArgument, "give either a patch or a window, not both");
  }
  SampleSet out;
  out.label = patch ? SampleLabel::kTrainPatch
                    : (window ? SampleLabel::kTestImageTLC : SampleLabel::kTestImage);
  out.values.reserve(n);

  for (std::size_t s = 0; s < n; ++s) {
    const FeatureMap map = source(rng);
    const PlaneView x = map.view(0);
    if (patch) {
      if (patch->height == 0 || patch->width == 0 || patch->height > x.height ||
          patch->width > x.width) {
        throw Error(ErrorCode::kPatchTooLarge,
                    "patch " + std::to_string(patch->height) + "x" + std::to_string(patch->width) +
                        " does not fit a " + std::to_string(x.height) + "x" +
                        std::to_string(x.width) + " map");
      }
      const std::size_t rows = x.height - patch->height + 1;
      const std::size_t cols = x.width - patch->width + 1;
      const std::size_t top = rows > 1 ? rng.below(rows) : 0;
      const std::size_t left = cols > 1 ? rng.below(cols) : 0;
      const auto table = IntegralTable::centered(x, Pointwise::kIdentity);
      out.values.push_back(table.rect_mean(top, top + patch->height, left, left + patch->width));
    } else if (window) {
      // Only one pixel is kept, so read its window straight from the table.
      const WindowGeometry g = WindowGeometry::make(x.height, x.width, *window);
      const auto table = IntegralTable::centered(x, Pointwise::kIdentity);
      const std::size_t r = g.source_row(rng.below(x.height));
      const std::size_t c = g.source_col(rng.below(x.width));
      out.values.push_back(table.rect_mean(r, r + g.k_h, c, c + g.k_w));
    } else {
      out.values.push_back(global_aggregate(x, Pointwise::kIdentity));
    }
  }
  return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sample set");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());

  // Walk the merged support; evaluate after consuming every copy of a value.
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < sa.size() || j < sb.size()) {
    const double v = (j == sb.size() || (i < sa.size() && sa[i] <= sb[j])) ? sa[i] : sb[j];
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

std::vector<HistogramBin> histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::kInvalidArgument, "bins must be >= 1");
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "empty sample set");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double width = (hi - lo) / static_cast<double>(bins);

  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b].left = lo + width * static_cast<double>(b);
  for (double v : values) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    out[std::min(b, bins - 1)].count++;
  }
  return out;
}

MapGenerator constant_field(std::size_t channels, std::size_t height, std::size_t width,
                            double value) {
  return [=](Rng&) {
    return FeatureMap(channels, height, width, std::vector<double>(channels * height * width, value));
  };
}

MapGenerator white_noise(std::size_t channels, std::size_t height, std::size_t width) {
  return [=](Rng& rng) {
    FeatureMap map(channels, height, width);
    for (double& v : map.values()) v = rng.normal();
    return map;
  };
}

MapGenerator varying_field(std::size_t channels, std::size_t height, std::size_t width) {
  return [=](Rng& rng) {
    FeatureMap map(channels, height, width);
    constexpr int kWaves = 2;
    for (std::size_t c = 0; c < channels; ++c) {
      double amp[kWaves], fy[kWaves], fx[kWaves], phase[kWaves];
      for (int k = 0; k < kWaves; ++k) {
        amp[k] = rng.uniform(0.5, 1.0);
        fy[k] = rng.uniform(-2.0, 2.0);
        fx[k] = rng.uniform(-2.0, 2.0);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      }
      // sin(a + b) = sin a cos b + cos a sin b, with a from the row and b
      // from the column, so each wave costs two multiplies per pixel.
      std::vector<double> row_sin(kWaves * height), row_cos(kWaves * height);
      std::vector<double> col_sin(kWaves * width), col_cos(kWaves * width);
      for (int k = 0; k < kWaves; ++k) {
        for (std::size_t i = 0; i < height; ++i) {
          const double a = 2.0 * std::numbers::pi * fy[k] * static_cast<double>(i) /
                               static_cast<double>(height) + phase[k];
          row_sin[k * height + i] = amp[k] * std::sin(a);
          row_cos[k * height + i] = amp[k] * std::cos(a);
        }
        for (std::size_t j = 0; j < width; ++j) {
          const double b = 2.0 * std::numbers::pi * fx[k] * static_cast<double>(j) /
                           static_cast<double>(width);
          col_sin[k * width + j] = std::sin(b);
          col_cos[k * width + j] = std::cos(b);
        }
      }
      for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
          double v = 0.5 * rng.normal();
          for (int k = 0; k < kWaves; ++k) {
            v += row_sin[k * height + i] * col_cos[k * width + j] +
                 row_cos[k * height + i] * col_sin[k * width + j];
          }
          map(c, i, j) = v;
        }
      }
    }
    return map;
  };
}

FeatureStack FeatureStack::random(std::size_t channels, Rng& rng) {
  FeatureStack stack;
  for (std::size_t c = 0; c < channels; ++c) {
    stack.scale_.push_back(rng.uniform(0.5, 1.5));
    stack.shift_.push_back(rng.uniform(-0.5, 0.5));
    stack.mix_.push_back(rng.uniform(0.5, 1.5));
  }
  return stack;
}

FeatureMap FeatureStack::apply(const FeatureMap& x) const {
  if (x.channels() != channels()) {
    throw Error(ErrorCode::kShapeMismatch, "stack expects " + std::to_string(channels()) +
                                               " channels");
  }
  FeatureMap out(1, x.height(), x.width());
  auto dst = out.channel(0);
  for (std::size_t c = 0; c < channels(); ++c) {
    const auto src = x.channel(c);
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] += mix_[c] * std::max(scale_[c] * src[i] + shift_[c], 0.0);
    }
  }
  for (double& v : dst) v /= static_cast<double>(channels());
  return out;
}

MapGenerator with_stack(MapGenerator source, FeatureStack stack) {
  return [source = std::move(source), stack = std::move(stack)](Rng& rng) {
    return stack.apply(source(rng));
  };
}

SourceKind parse_source_kind(std::string_view name) {
  for (SourceKind kind : {SourceKind::kVarying, SourceKind::kWhiteNoise, SourceKind::kConstant}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::kUsage, "unknown source '" + std::string(name) + "'");
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kVarying: return "varying";
    case SourceKind::kWhiteNoise: return "white";
    case SourceKind::kConstant: return "constant";
  }
  return "unknown";
}

bool ShiftExperimentResult::shift_reduced() const {
  return ks_train_tlc < ks_train_test || (ks_train_test == 0.0 && ks_train_tlc == 0.0);
}

ShiftExperimentResult run_shift_experiment(const ShiftExperimentConfig& config) {
  MapGenerator source;
  switch (config.source) {
    case SourceKind::kVarying:
      source = varying_field(config.channels, config.height, config.width);
      break;
    case SourceKind::kWhiteNoise:
      source = white_noise(config.channels, config.height, config.width);
      break;
    case SourceKind::kConstant:
      source = constant_field(config.channels, config.height, config.width, 0.5);
      break;
  }
  const Rng root(config.seed);
  Rng stack_rng = root.fork(0);
  const MapGenerator model = with_stack(source, FeatureStack::random(config.channels, stack_rng));

  ShiftExperimentResult result;
  Rng train_rng = root.fork(1);
  Rng test_rng = root.fork(2);
  Rng tlc_rng = root.fork(3);
  result.train_patch = sample_pooled_stats(model, train_rng, config.samples,
                                           PatchSize{config.patch, config.patch});
  result.test_image = sample_pooled_stats(model, test_rng, config.samples);
  result.test_tlc = sample_pooled_stats(model, tlc_rng, config.samples, std::nullopt,
                                        WindowSpec::square(config.patch));
  result.ks_train_test = ks_distance(result.train_patch, result.test_image);
  result.ks_train_tlc = ks_distance(result.train_patch, result.test_tlc);
  return result;
}

void LayerGraph::validate() const {
  bool any_flagged = false;
  for (const LayerInfo& layer : layers) {
    if (!(layer.scale > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "layer " + layer.name + " has non-positive scale");
    }
    any_flagged = any_flagged || layer.has_global_op;
  }
  if (!any_flagged) throw Error(ErrorCode::kInvalidArgument, "no layer has a global operator");
}

LayerGraph parse_layer_graph(const std::string& text) {
  LayerGraph graph;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    LayerInfo layer;
    std::string scale;
    if (!(fields >> layer.name)) continue;
    if (!(fields >> scale)) {
      throw Error(ErrorCode::kInvalidArgument, "layer " + layer.name + " is missing a scale");
    }
    try {
      if (const auto slash = scale.find('/'); slash != std::string::npos) {
        layer.scale = std::stod(scale.substr(0, slash)) / std::stod(scale.substr(slash + 1));
      } else {
        layer.scale = std::stod(scale);
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad scale '" + scale + "'");
    }
    int flag = 1;
    if (fields >> flag) layer.has_global_op = flag != 0;
    graph.layers.push_back(std::move(layer));
  }
  graph.validate();
  return graph;
}

std::vector<CalibratedWindow> calibrate_windows(const LayerGraph& graph, std::size_t calib_h,
                                                std::size_t calib_w) {
  graph.validate();
  if (calib_h == 0 || calib_w == 0) {
    throw Error(ErrorCode::kDegenerateScale, "calibration image must be at least 1x1");
  }
  auto scaled = [](std::size_t dim, double scale, const std::string& name) {
    const double rounded = std::floor(static_cast<double>(dim) * scale + 0.5);
    if (rounded < 1.0) {
      throw Error(ErrorCode::kDegenerateScale,
                  "layer " + name + " scales " + std::to_string(dim) + " below one pixel");
    }
    return static_cast<std::size_t>(rounded);
  };
  std::vector<CalibratedWindow> out;
  for (const LayerInfo& layer : graph.layers) {
    if (!layer.has_global_op) continue;
    out.push_back({layer.name, scaled(calib_h, layer.scale, layer.name),
                   scaled(calib_w, layer.scale, layer.name)});
  }
  return out;
}

}  // namespace tlc
