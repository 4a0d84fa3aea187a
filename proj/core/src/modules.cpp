#include "tlc/modules.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <cmath>
#include <string>

#include "tlc/errors.hpp"
#include "tlc/integral.hpp"

namespace tlc {

std::string_view to_string(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::kSE: return "se";
    case ModuleKind::kIN: return "in";
    case ModuleKind::kGN: return "gn";
    case ModuleKind::kGEThetaMinus: return "ge";
    case ModuleKind::kCBAMChannel: return "cbam";
  }
  return "unknown";
}

ModuleKind parse_module_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (ModuleKind kind : {ModuleKind::kSE, ModuleKind::kIN, ModuleKind::kGN,
                          ModuleKind::kGEThetaMinus, ModuleKind::kCBAMChannel}) {
    if (lower == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::kUsage, "unknown module kind '" + std::string(name) + "'");
}

SeParams::SeParams(std::size_t channels, std::size_t ratio, std::vector<double> reduce,
                   std::vector<double> expand)
    : channels_(channels), hidden_(0), reduce_(std::move(reduce)), expand_(std::move(expand)) {
  if (channels == 0 || ratio == 0 || channels % ratio != 0) {
    throw Error(ErrorCode::kShapeMismatch, "SE ratio " + std::to_string(ratio) +
                                               " must divide channel count " +
                                               std::to_string(channels));
  }
  hidden_ = channels / ratio;
  if (reduce_.size() != channels_ * hidden_ || expand_.size() != hidden_ * channels_) {
    throw Error(ErrorCode::kShapeMismatch, "SE weight matrices do not match C and ratio");
  }
}

SeParams SeParams::random(std::size_t channels, std::size_t ratio, Rng& rng) {
  if (ratio == 0 || channels % ratio != 0) {
    throw Error(ErrorCode::kShapeMismatch, "SE ratio must divide channel count");
  }
  const std::size_t hidden = channels / ratio;
  std::vector<double> reduce(channels * hidden);
  std::vector<double> expand(hidden * channels);
  const double reduce_bound = 1.0 / std::sqrt(static_cast<double>(channels));
  const double expand_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : reduce) w = rng.uniform(-reduce_bound, reduce_bound);
  for (double& w : expand) w = rng.uniform(-expand_bound, expand_bound);
  return SeParams(channels, ratio, std::move(reduce), std::move(expand));
}

void SeParams::logits(std::span<const double> pooled, std::span<double> hidden_scratch,
                      std::span<double> out) const {
  std::fill(hidden_scratch.begin(), hidden_scratch.end(), 0.0);
  for (std::size_t c = 0; c < channels_; ++c) {
    const double v = pooled[c];
    const double* row = &reduce_[c * hidden_];
    for (std::size_t h = 0; h < hidden_; ++h) hidden_scratch[h] += v * row[h];
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t h = 0; h < hidden_; ++h) {
    const double a = std::max(hidden_scratch[h], 0.0);
    const double* row = &expand_[h * channels_];
    for (std::size_t c = 0; c < channels_; ++c) out[c] += a * row[c];
  }
}

NormParams NormParams::identity(std::size_t channels, std::size_t groups, double eps) {
  NormParams p;
  p.gamma.assign(channels, 1.0);
  p.beta.assign(channels, 0.0);
  p.eps = eps;
  p.groups = groups;
  return p;
}

void NormParams::validate(std::size_t channels) const {
  if (gamma.size() != channels || beta.size() != channels) {
    throw Error(ErrorCode::kShapeMismatch, "gamma/beta length must equal channel count " +
                                               std::to_string(channels));
  }
  if (groups == 0 || channels % groups != 0) {
    throw Error(ErrorCode::kInvalidGroupCount, std::to_string(groups) +
                                                   " groups do not divide " +
                                                   std::to_string(channels) + " channels");
  }
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
}

namespace {

void require_channels(const FeatureMap& x, std::size_t expected) {
  if (x.channels() != expected) {
    throw Error(ErrorCode::kShapeMismatch, "input has " + std::to_string(x.channels()) +
                                               " channels, parameters expect " +
                                               std::to_string(expected));
  }
}

// Per-channel gates on a rows × cols grid; gate(c, r, k) at flat index
// (c * rows + r) * cols + k. Global mode uses a 1 × 1 grid.
struct GateGrid {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::vector<double> values;
};

FeatureMap apply_gates(const FeatureMap& x, const GateGrid& gates, const WindowGeometry* geometry) {
  FeatureMap out = x;
  const std::size_t plane = gates.rows * gates.cols;
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const double* gate = &gates.values[c * plane];
    for (std::size_t i = 0; i < x.height(); ++i) {
      const std::size_t gr = geometry ? geometry->source_row(i) : 0;
      for (std::size_t j = 0; j < x.width(); ++j) {
        const std::size_t gc = geometry ? geometry->source_col(j) : 0;
        out(c, i, j) *= gate[gr * gates.cols + gc];
      }
    }
  }
  return out;
}

// Evaluates `gate_fn(descriptors..., out)` for every grid position, where
// each descriptor is a per-channel statistic plane of size rows × cols.
template <typename GateFn>
GateGrid gates_from_descriptors(std::span<const std::vector<Plane>> descriptors,
                                std::size_t channels, std::size_t rows, std::size_t cols,
                                GateFn&& gate_fn) {
  GateGrid grid{rows, cols, std::vector<double>(channels * rows * cols)};
  std::vector<std::vector<double>> vectors(descriptors.size(), std::vector<double>(channels));
  std::vector<double> gate(channels);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      for (std::size_t d = 0; d < descriptors.size(); ++d) {
        for (std::size_t c = 0; c < channels; ++c) vectors[d][c] = descriptors[d][c](r, k);
      }
      gate_fn(vectors, gate);
      for (std::size_t c = 0; c < channels; ++c) grid.values[(c * rows + r) * cols + k] = gate[c];
    }
  }
  return grid;
}

std::vector<Plane> pooled_means(const FeatureMap& x, const WindowGeometry* geometry) {
  std::vector<Plane> pooled;
  pooled.reserve(x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    if (geometry) {
      pooled.push_back(
          interior_window_mean(IntegralTable::centered(x.view(c), Pointwise::kIdentity), *geometry));
    } else {
      pooled.emplace_back(1, 1, global_aggregate(x.view(c), Pointwise::kIdentity));
    }
  }
  return pooled;
}

std::vector<Plane> pooled_maxima(const FeatureMap& x, const WindowGeometry* geometry) {
  std::vector<Plane> pooled;
  pooled.reserve(x.channels());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    if (geometry) {
      pooled.push_back(interior_window_max(x.view(c), *geometry));
    } else {
      const auto values = x.channel(c);
      pooled.emplace_back(1, 1, *std::max_element(values.begin(), values.end()));
    }
  }
  return pooled;
}

std::optional<WindowGeometry> geometry_for(const FeatureMap& x, const Mode& mode) {
  if (const auto* local = std::get_if<Local>(&mode)) {
    return WindowGeometry::make(x.height(), x.width(), local->window);
  }
  return std::nullopt;
}

}  // namespace

FeatureMap se_forward(const FeatureMap& x, const SeParams& params, const Mode& mode) {
  require_channels(x, params.channels());
  const auto geometry = geometry_for(x, mode);
  const WindowGeometry* g = geometry ? &*geometry : nullptr;

  const std::vector<std::vector<Plane>> descriptors{pooled_means(x, g)};
  std::vector<double> hidden(params.hidden());
  const GateGrid gates = gates_from_descriptors(
      descriptors, x.channels(), g ? g->rows : 1, g ? g->cols : 1,
      [&](const std::vector<std::vector<double>>& v, std::vector<double>& gate) {
        params.logits(v[0], hidden, gate);
        for (double& z : gate) z = sigmoid(z);
      });
  return apply_gates(x, gates, g);
}

FeatureMap ge_forward(const FeatureMap& x, const Mode& mode) {
  const auto geometry = geometry_for(x, mode);
  const WindowGeometry* g = geometry ? &*geometry : nullptr;

  const std::vector<std::vector<Plane>> descriptors{pooled_means(x, g)};
  const GateGrid gates = gates_from_descriptors(
      descriptors, x.channels(), g ? g->rows : 1, g ? g->cols : 1,
      [](const std::vector<std::vector<double>>& v, std::vector<double>& gate) {
        for (std::size_t c = 0; c < gate.size(); ++c) gate[c] = sigmoid(v[0][c]);
      });
  return apply_gates(x, gates, g);
}

FeatureMap cbam_channel_forward(const FeatureMap& x, const SeParams& params, const Mode& mode) {
  require_channels(x, params.channels());
  const auto geometry = geometry_for(x, mode);
  const WindowGeometry* g = geometry ? &*geometry : nullptr;

  const std::vector<std::vector<Plane>> descriptors{pooled_means(x, g), pooled_maxima(x, g)};
  std::vector<double> hidden(params.hidden());
  std::vector<double> from_max(params.channels());
  const GateGrid gates = gates_from_descriptors(
      descriptors, x.channels(), g ? g->rows : 1, g ? g->cols : 1,
      [&](const std::vector<std::vector<double>>& v, std::vector<double>& gate) {
        params.logits(v[0], hidden, gate);
        params.logits(v[1], hidden, from_max);
        for (std::size_t c = 0; c < gate.size(); ++c) gate[c] = sigmoid(gate[c] + from_max[c]);
      });
  return apply_gates(x, gates, g);
}

FeatureMap norm_forward(const FeatureMap& x, const NormParams& params, const Mode& mode) {
  params.validate(x.channels());
  const auto geometry = geometry_for(x, mode);
  const std::size_t per_group = x.channels() / params.groups;
  FeatureMap out(x.channels(), x.height(), x.width());

  for (std::size_t group = 0; group < params.groups; ++group) {
    const std::size_t first = group * per_group;

    // Statistics grid: 1×1 for Global, rows×cols for Local.
    Plane mean;
    Plane inv_std;
    if (geometry) {
      auto sums = IntegralTable::centered(x.view(first), Pointwise::kIdentity);
      auto squares = IntegralTable::centered(x.view(first), Pointwise::kSquare);
      for (std::size_t c = first + 1; c < first + per_group; ++c) {
        sums += IntegralTable::centered(x.view(c), Pointwise::kIdentity);
        squares += IntegralTable::centered(x.view(c), Pointwise::kSquare);
      }
      mean = interior_window_mean(sums, *geometry, per_group);
      inv_std = interior_window_mean(squares, *geometry, per_group);
    } else {
      double m = 0.0;
      double sq = 0.0;
      for (std::size_t c = first; c < first + per_group; ++c) {
        m += global_aggregate(x.view(c), Pointwise::kIdentity);
        sq += global_aggregate(x.view(c), Pointwise::kSquare);
      }
      mean = Plane(1, 1, m / static_cast<double>(per_group));
      inv_std = Plane(1, 1, sq / static_cast<double>(per_group));
    }
    for (std::size_t i = 0; i < inv_std.size(); ++i) {
      const double m = mean.values()[i];
      const double var = std::max(inv_std.values()[i] - m * m, 0.0);
      inv_std.values()[i] = 1.0 / std::sqrt(var + params.eps);
    }

    for (std::size_t c = first; c < first + per_group; ++c) {
      const double gamma = params.gamma[c];
      const double beta = params.beta[c];
      for (std::size_t i = 0; i < x.height(); ++i) {
        const std::size_t sr = geometry ? geometry->source_row(i) : 0;
        for (std::size_t j = 0; j < x.width(); ++j) {
          const std::size_t sc = geometry ? geometry->source_col(j) : 0;
          out(c, i, j) = gamma * (x(c, i, j) - mean(sr, sc)) * inv_std(sr, sc) + beta;
        }
      }
    }
  }
  return out;
}

}  // namespace tlc
