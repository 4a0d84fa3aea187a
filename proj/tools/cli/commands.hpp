#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "tlc/analysis.hpp"
#include "tlc/demo.hpp"
#include "tlc/modules.hpp"
#include "tlc/window.hpp"

namespace tlc::cli {

namespace fs = std::filesystem;

enum class Stat { kMean, kSquareMean, kVariance, kMax };
Stat parse_stat(const std::string& name);

struct AggregateOptions {
  fs::path input;
  fs::path output;
  std::optional<fs::path> summary;  // default: <output>.summary.csv
  Stat stat = Stat::kMean;
  WindowSpec window;
  std::size_t stride = 1;
  bool brute_force = false;
};

struct ConvertOptions {
  fs::path input;
  fs::path output;  // prefix
  ModuleKind module = ModuleKind::kSE;
  std::optional<fs::path> params;
  WindowSpec window;
  std::uint64_t seed = 0;
  std::size_t se_ratio = 16;  // largest divisor of C not above this
  std::size_t groups = 0;     // 0: C for IN, 1 for GN
  std::size_t checks = 16;
};

struct StatsOptions {
  fs::path output;  // prefix
  ShiftExperimentConfig experiment;
  std::size_t bins = 20;
};

struct CalibrateOptions {
  fs::path graph;
  std::optional<fs::path> output;  // stdout when absent
  std::size_t calib_h = 384;
  std::size_t calib_w = 384;
};

struct BenchOptions {
  fs::path output;  // prefix
  std::size_t size = 512;
  std::size_t reps = 5;
  std::uint64_t seed = 0;
};

struct DemoOptions {
  fs::path output;  // prefix
  DemoConfig demo;
};

enum class FuseTransform { kIdentity, kAttention, kMean };
FuseTransform parse_fuse_transform(const std::string& name);

struct FuseOptions {
  fs::path input;
  fs::path output;  // prefix
  FuseTransform transform = FuseTransform::kIdentity;
  WindowSpec window;
  std::optional<std::size_t> s_h;  // default: half window
  std::optional<std::size_t> s_w;
  std::optional<fs::path> params;
  std::optional<double> temperature;
};

// Each command returns its process exit status; errors propagate as tlc::Error.
int cmd_aggregate(const AggregateOptions& opt, std::ostream& log);
int cmd_convert(const ConvertOptions& opt, std::ostream& log);
int cmd_stats(const StatsOptions& opt, std::ostream& log);
int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out);
int cmd_bench(const BenchOptions& opt, std::ostream& log);
int cmd_demo(const DemoOptions& opt, std::ostream& log);
int cmd_fuse(const FuseOptions& opt, std::ostream& log);

/// `<prefix>.<suffix>`, e.g. with_suffix("out/run", "report.csv").
fs::path with_suffix(const fs::path& prefix, const std::string& suffix);

}  // namespace tlc::cli
