#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "csv.hpp"
#include "tlc/brute_force.hpp"
#include "tlc/errors.hpp"
#include "tlc/fusion.hpp"
#include "tlc/integral.hpp"
#include "tlc/macs.hpp"
#include "tlc/params_io.hpp"
#include "tlc/random.hpp"
#include "tlc/tensor_io.hpp"

namespace tlc::cli {

namespace {

void require_input(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIoFailure, "input " + path.string() + " does not exist");
  }
}

// The output's directory must exist and the output must not be an input.
void require_output(const fs::path& path, std::initializer_list<fs::path> inputs = {}) {
  const fs::path dir = path.parent_path();
  std::error_code ec;
  if (!dir.empty() && !fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIoFailure, "output directory " + dir.string() + " does not exist");
  }
  for (const fs::path& in : inputs) {
    if (fs::exists(path, ec) && fs::equivalent(path, in, ec)) {
      throw Error(ErrorCode::kUsage, "refusing to overwrite input " + in.string());
    }
  }
}

FeatureMap to_map(const Plane& p) { return FeatureMap::from_planes(std::span<const Plane>(&p, 1)); }

std::size_t largest_divisor_up_to(std::size_t n, std::size_t cap) {
  for (std::size_t d = std::min(n, cap); d > 1; --d) {
    if (n % d == 0) return d;
  }
  return 1;
}

struct Extent {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

Extent extent(std::span<const double> v) {
  Extent e{v[0], v[0], 0.0};
  double sum = 0.0;
  for (double t : v) {
    e.min = std::min(e.min, t);
    e.max = std::max(e.max, t);
    sum += t;
  }
  e.mean = sum / static_cast<double>(v.size());
  return e;
}

}  // namespace

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  fs::path out = prefix;
  out += "." + suffix;
  return out;
}

Stat parse_stat(const std::string& name) {
  if (name == "mean") return Stat::kMean;
  if (name == "sqmean") return Stat::kSquareMean;
  if (name == "var") return Stat::kVariance;
  if (name == "max") return Stat::kMax;
  throw Error(ErrorCode::kUsage, "unknown stat '" + name + "' (mean, sqmean, var, max)");
}

FuseTransform parse_fuse_transform(const std::string& name) {
  if (name == "identity") return FuseTransform::kIdentity;
  if (name == "attention") return FuseTransform::kAttention;
  if (name == "mean") return FuseTransform::kMean;
  throw Error(ErrorCode::kUsage, "unknown transform '" + name + "' (identity, attention, mean)");
}

// ---------------------------------------------------------------- aggregate

int cmd_aggregate(const AggregateOptions& opt, std::ostream& log) {
  require_input(opt.input);
  const fs::path summary = opt.summary.value_or(with_suffix(opt.output, "summary.csv"));
  require_output(opt.output, {opt.input});
  require_output(summary, {opt.input});
  if (opt.stride == 0) throw Error(ErrorCode::kUsage, "stride must be >= 1");
  if (opt.stride > 1 && (opt.stat != Stat::kMean || opt.brute_force)) {
    throw Error(ErrorCode::kUsage, "--stride applies to the integral mean only");
  }

  const FeatureMap x = read_tensor(opt.input);
  FeatureMap y(x.channels(), x.height(), x.width());
  for (std::size_t c = 0; c < x.channels(); ++c) {
    const PlaneView v = x.view(c);
    Plane r;
    switch (opt.stat) {
      case Stat::kMean:
        r = opt.brute_force ? brute_force::local_aggregate(v, Pointwise::kIdentity, opt.window)
            : opt.stride > 1 ? strided_local_mean(v, opt.window, opt.stride)
                             : local_aggregate(v, Pointwise::kIdentity, opt.window);
        break;
      case Stat::kSquareMean:
        r = opt.brute_force ? brute_force::local_aggregate(v, Pointwise::kSquare, opt.window)
                            : local_aggregate(v, Pointwise::kSquare, opt.window);
        break;
      case Stat::kVariance:
        r = opt.brute_force ? brute_force::local_mean_var(v, opt.window).var
                            : local_mean_var(v, opt.window).var;
        break;
      case Stat::kMax:
        r = opt.brute_force ? brute_force::local_max(v, opt.window) : local_max(v, opt.window);
        break;
    }
    std::copy(r.values().begin(), r.values().end(), y.channel(c).begin());
  }
  y = quantize_to_storage(std::move(y));
  write_tensor(y, opt.output);

  const Extent e = extent(y.values());
  CsvWriter csv(summary, "metric,value");
  csv.row("channels", x.channels());
  csv.row("height", x.height());
  csv.row("width", x.width());
  csv.row("k_h", opt.window.k_h);
  csv.row("k_w", opt.window.k_w);
  csv.row("stride", opt.stride);
  csv.row("min", e.min);
  csv.row("max", e.max);
  csv.row("mean", e.mean);
  csv.close();
  log << "wrote " << opt.output.string() << " and " << summary.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- convert

namespace {

struct ModuleRunner {
  ModuleKind kind;
  std::optional<SeParams> se;
  std::optional<NormParams> norm;

  FeatureMap operator()(const FeatureMap& x, const Mode& mode) const {
    switch (kind) {
      case ModuleKind::kSE: return se_forward(x, *se, mode);
      case ModuleKind::kCBAMChannel: return cbam_channel_forward(x, *se, mode);
      case ModuleKind::kIN:
      case ModuleKind::kGN: return norm_forward(x, *norm, mode);
      case ModuleKind::kGEThetaMinus: return ge_forward(x, mode);
    }
    throw Error(ErrorCode::kUsage, "unknown module");
  }
};

ModuleRunner make_runner(const ConvertOptions& opt, std::size_t channels) {
  ModuleRunner runner{opt.module, std::nullopt, std::nullopt};
  std::optional<ParamsManifest> manifest;
  if (opt.params) {
    require_input(*opt.params);
    manifest = load_manifest(*opt.params);
  }
  Rng rng(opt.seed);

  if (opt.module == ModuleKind::kSE || opt.module == ModuleKind::kCBAMChannel) {
    if (manifest) {
      if (!manifest->se) throw Error(ErrorCode::kShapeMismatch, "manifest has no se.* weights");
      runner.se = manifest->se;
    } else {
      runner.se = SeParams::random(channels, largest_divisor_up_to(channels, opt.se_ratio), rng);
    }
    if (runner.se->channels() != channels) {
      throw Error(ErrorCode::kShapeMismatch,
                  "SE weights expect " + std::to_string(runner.se->channels()) +
                      " channels, input has " + std::to_string(channels));
    }
  } else if (opt.module == ModuleKind::kIN || opt.module == ModuleKind::kGN) {
    if (manifest) {
      if (!manifest->norm) throw Error(ErrorCode::kShapeMismatch, "manifest has no norm.* values");
      runner.norm = manifest->norm;
    } else {
      const std::size_t groups =
          opt.module == ModuleKind::kIN ? channels : std::max<std::size_t>(opt.groups, 1);
      runner.norm = NormParams::identity(channels, groups);
      for (double& g : runner.norm->gamma) g = rng.uniform(0.5, 1.5);
      for (double& b : runner.norm->beta) b = rng.uniform(-0.5, 0.5);
    }
    if (opt.module == ModuleKind::kIN && runner.norm->groups != channels) {
      throw Error(ErrorCode::kInvalidGroupCount, "instance norm needs norm.groups == channels");
    }
    runner.norm->validate(channels);
  }
  return runner;
}

}  // namespace

int cmd_convert(const ConvertOptions& opt, std::ostream& log) {
  require_input(opt.input);
  const fs::path out_global = with_suffix(opt.output, "global.tlct");
  const fs::path out_local = with_suffix(opt.output, "local.tlct");
  const fs::path out_diff = with_suffix(opt.output, "absdiff.tlct");
  const fs::path report = with_suffix(opt.output, "report.csv");
  for (const fs::path& p : {out_global, out_local, out_diff, report}) require_output(p, {opt.input});

  const FeatureMap x = read_tensor(opt.input);
  const ModuleRunner run = make_runner(opt, x.channels());

  const FeatureMap global = run(x, Global{});
  const FeatureMap local = run(x, Local{opt.window});
  FeatureMap diff(x.channels(), x.height(), x.width());
  double max_diff = 0.0;
  double sum_diff = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const double d = std::abs(global.values()[i] - local.values()[i]);
    diff.values()[i] = d;
    max_diff = std::max(max_diff, d);
    sum_diff += d;
  }

  // Interior-crop law: Local at a pixel with a full window equals Global on
  // the window's crop.
  const WindowGeometry g = WindowGeometry::make(x.height(), x.width(), opt.window);
  Rng check_rng = Rng(opt.seed).fork(7);
  double crop_err = 0.0;
  for (std::size_t t = 0; t < opt.checks; ++t) {
    const std::size_t r = check_rng.below(g.rows);
    const std::size_t c = check_rng.below(g.cols);
    const FeatureMap crop_out = run(x.crop(r, c, g.k_h, g.k_w), Global{});
    for (std::size_t ch = 0; ch < x.channels(); ++ch) {
      crop_err = std::max(crop_err, std::abs(local(ch, r + g.top, c + g.left) -
                                             crop_out(ch, g.top, g.left)));
    }
  }

  write_tensor(global, out_global);
  write_tensor(local, out_local);
  write_tensor(diff, out_diff);

  ModuleShape shape{x.channels(), x.height(), x.width()};
  if (run.se) shape.se_ratio = run.se->ratio();
  if (run.norm) shape.groups = run.norm->groups;
  const std::uint64_t macs_global = module_macs(opt.module, shape, Global{});
  const std::uint64_t macs_local = module_macs(opt.module, shape, Local{opt.window});
  const OverheadReport host =
      host_overhead(opt.module, HostModel{}, x.height(), x.width(), opt.window);

  CsvWriter csv(report, "metric,value");
  csv.row("module", to_string(opt.module));
  csv.row("channels", x.channels());
  csv.row("height", x.height());
  csv.row("width", x.width());
  csv.row("k_h", opt.window.k_h);
  csv.row("k_w", opt.window.k_w);
  csv.row("max_abs_diff", max_diff);
  csv.row("mean_abs_diff", sum_diff / static_cast<double>(diff.size()));
  csv.row("crop_checks", opt.checks);
  csv.row("crop_max_abs_err", crop_err);
  csv.row("module_macs_global", macs_global);
  csv.row("module_macs_local", macs_local);
  csv.row("host_macs", host.host_macs);
  csv.row("host_total_macs_global", host.global_total);
  csv.row("host_total_macs_local", host.local_total);
  csv.row("host_overhead_fraction", host.overhead_fraction());
  csv.close();
  log << to_string(opt.module) << ": max |global - local| = " << format_number(max_diff)
      << ", crop-law error = " << format_number(crop_err)
      << ", host overhead = " << format_number(100.0 * host.overhead_fraction()) << "%\n";
  return 0;
}

// ---------------------------------------------------------------- stats

int cmd_stats(const StatsOptions& opt, std::ostream& log) {
  const fs::path samples = with_suffix(opt.output, "samples.csv");
  const fs::path ks = with_suffix(opt.output, "ks.csv");
  require_output(samples);
  if (opt.bins == 0) throw Error(ErrorCode::kUsage, "bins must be >= 1");

  const ShiftExperimentResult r = run_shift_experiment(opt.experiment);
  const SampleSet* sets[] = {&r.train_patch, &r.test_image, &r.test_tlc};

  CsvWriter raw(samples, "label,value");
  for (const SampleSet* s : sets) {
    for (double v : s->values) raw.row(to_string(s->label), v);
  }
  raw.close();
  for (const SampleSet* s : sets) {
    CsvWriter hist(with_suffix(opt.output, "hist." + std::string(to_string(s->label)) + ".csv"),
                   "bin_left,count");
    for (const HistogramBin& b : histogram(s->values, opt.bins)) hist.row(b.left, b.count);
    hist.close();
  }

  const bool holds = r.shift_reduced();
  CsvWriter report(ks, "metric,value");
  report.row("ks_train_test", r.ks_train_test);
  report.row("ks_train_tlc", r.ks_train_tlc);
  report.row("std_train_patch", sample_std(r.train_patch.values));
  report.row("std_test_image", sample_std(r.test_image.values));
  report.row("std_test_tlc", sample_std(r.test_tlc.values));
  report.row("shift_reduced", holds ? 1 : 0);
  report.close();

  log << "KS(TrainPatch, TestImage) = " << format_number(r.ks_train_test)
      << ", KS(TrainPatch, TestImageTLC) = " << format_number(r.ks_train_tlc) << '\n';
  if (!holds) {
    log << "shift-reduction property does not hold\n";
    return exit_code(ErrorCode::kPropertyFailure);
  }
  return 0;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out) {
  require_input(opt.graph);
  if (opt.output) require_output(*opt.output, {opt.graph});
  std::ifstream in(opt.graph);
  std::stringstream text;
  text << in.rdbuf();
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot read " + opt.graph.string());
  const std::vector<CalibratedWindow> windows =
      calibrate_windows(parse_layer_graph(text.str()), opt.calib_h, opt.calib_w);

  if (opt.output) {
    CsvWriter csv(*opt.output, "layer,k_h,k_w");
    for (const auto& w : windows) csv.row(w.layer, w.k_h, w.k_w);
    csv.close();
  } else {
    out << "layer,k_h,k_w\n";
    for (const auto& w : windows) out << w.layer << ',' << w.k_h << ',' << w.k_w << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- bench

namespace {

template <typename Fn>
double median_seconds(std::size_t reps, Fn&& fn) {
  std::vector<double> t(reps);
  for (double& s : t) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::sort(t.begin(), t.end());
  return reps % 2 ? t[reps / 2] : 0.5 * (t[reps / 2 - 1] + t[reps / 2]);
}

}  // namespace

int cmd_bench(const BenchOptions& opt, std::ostream& log) {
  const fs::path timing = with_suffix(opt.output, "timing.csv");
  const fs::path ratios = with_suffix(opt.output, "ratios.csv");
  require_output(timing);
  if (opt.reps < 5) throw Error(ErrorCode::kUsage, "bench needs at least 5 repetitions");
  if (opt.size < 128) throw Error(ErrorCode::kUsage, "bench size must be at least 128");

  Rng rng(opt.seed);
  std::vector<double> values(opt.size * opt.size);
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  const PlaneView x{values, opt.size, opt.size};

  volatile double sink = 0.0;
  sink = local_aggregate(x, Pointwise::kIdentity, WindowSpec::square(8))(0, 0);  // warm-up

  const std::size_t ks[] = {1, 8, 32, 128};
  double fast[4];
  double slow[4];
  for (std::size_t i = 0; i < 4; ++i) {
    const WindowSpec w = WindowSpec::square(ks[i]);
    fast[i] = median_seconds(opt.reps, [&] {
      sink = sink + local_aggregate(x, Pointwise::kIdentity, w)(0, 0);
    });
    slow[i] = median_seconds(opt.reps, [&] {
      sink = sink + brute_force::local_aggregate(x, Pointwise::kIdentity, w)(0, 0);
    });
  }

  CsvWriter t(timing, "path,k,median_seconds,reps");
  for (std::size_t i = 0; i < 4; ++i) t.row("integral", ks[i], fast[i], opt.reps);
  for (std::size_t i = 0; i < 4; ++i) t.row("brute_force", ks[i], slow[i], opt.reps);
  t.close();

  // Ratios over k in {8, 32, 128}; k = 1 is a sanity check only.
  const double fast_spread = *std::max_element(fast + 1, fast + 4) / *std::min_element(fast + 1, fast + 4);
  const double slow_growth = slow[3] / slow[1];
  const double unit_gap = std::max(slow[0] / fast[0], fast[0] / slow[0]);
  const bool ok_fast = fast_spread < 1.5;
  const bool ok_slow = slow_growth > 10.0;
  const bool ok_unit = unit_gap < 10.0;

  CsvWriter r(ratios, "quantity,value,threshold,holds");
  r.row("integral_max_over_min", fast_spread, "<1.5", ok_fast ? 1 : 0);
  r.row("brute_force_k128_over_k8", slow_growth, ">10", ok_slow ? 1 : 0);
  r.row("k1_path_gap", unit_gap, "<10", ok_unit ? 1 : 0);
  r.close();

  log << "integral spread " << format_number(fast_spread) << ", brute-force growth "
      << format_number(slow_growth) << ", k=1 gap " << format_number(unit_gap) << '\n';
  return ok_fast && ok_slow && ok_unit ? 0 : exit_code(ErrorCode::kPropertyFailure);
}

// ---------------------------------------------------------------- demo

int cmd_demo(const DemoOptions& opt, std::ostream& log) {
  const fs::path report = with_suffix(opt.output, "report.csv");
  require_output(report);

  const DemoResult r = run_demo(opt.demo);
  write_tensor(to_map(r.clean), with_suffix(opt.output, "clean.tlct"));
  write_tensor(to_map(r.exposure_a), with_suffix(opt.output, "exposure_a.tlct"));
  write_tensor(to_map(r.exposure_b), with_suffix(opt.output, "exposure_b.tlct"));
  write_tensor(to_map(r.restored_global), with_suffix(opt.output, "restored_global.tlct"));
  write_tensor(to_map(r.restored_local), with_suffix(opt.output, "restored_local.tlct"));

  // Both infinite (no noise) counts as no difference.
  const double delta =
      r.psnr_local == r.psnr_global ? 0.0 : r.psnr_local - r.psnr_global;
  CsvWriter csv(report, "metric,value");
  csv.row("layout", to_string(opt.demo.layout));
  csv.row("seed", opt.demo.seed);
  csv.row("k_h", opt.demo.window.k_h);
  csv.row("k_w", opt.demo.window.k_w);
  csv.row("support", opt.demo.support);
  csv.row("sigma_left", opt.demo.sigma_left);
  csv.row("sigma_right", opt.demo.sigma_right);
  csv.row("psnr_global", r.psnr_global);
  csv.row("psnr_local", r.psnr_local);
  csv.row("delta_db", delta);
  csv.close();
  log << "PSNR global " << format_number(r.psnr_global) << " dB, local "
      << format_number(r.psnr_local) << " dB\n";
  return 0;
}

// ---------------------------------------------------------------- fuse

int cmd_fuse(const FuseOptions& opt, std::ostream& log) {
  require_input(opt.input);
  const fs::path fused_path = with_suffix(opt.output, "fused.tlct");
  const fs::path report = with_suffix(opt.output, "seam.csv");
  require_output(fused_path, {opt.input});

  double temperature = 1.0;
  if (opt.params) {
    require_input(*opt.params);
    const ParamsManifest m = load_manifest(*opt.params);
    if (m.temperature) temperature = *m.temperature;
  }
  if (opt.temperature) temperature = *opt.temperature;

  const FeatureMap x = read_tensor(opt.input);
  const TilePlan plan =
      opt.s_h ? plan_tiles(x.height(), x.width(), opt.window.k_h, opt.window.k_w, *opt.s_h,
                           opt.s_w.value_or(*opt.s_h))
              : plan_tiles_default_stride(x.height(), x.width(), opt.window.k_h, opt.window.k_w);

  WindowTransform op;
  switch (opt.transform) {
    case FuseTransform::kIdentity: op = [](const FeatureMap& w) { return w; }; break;
    case FuseTransform::kAttention:
      op = [temperature](const FeatureMap& w) {
        return transposed_attention(w, AttnParams{temperature});
      };
      break;
    case FuseTransform::kMean: op = mean_broadcast; break;
  }
  const FeatureMap fused = quantize_to_storage(apply_and_fuse(x, plan, op));
  write_tensor(fused, fused_path);

  double change = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    change = std::max(change, std::abs(fused.values()[i] - x.values()[i]));
  }
  const double seam_in = seam_metric(x, plan);
  const double seam_out = seam_metric(fused, plan);
  CsvWriter csv(report, "metric,value");
  csv.row("placements", plan.placements.size());
  csv.row("k_h", plan.k_h);
  csv.row("k_w", plan.k_w);
  csv.row("s_h", plan.s_h);
  csv.row("s_w", plan.s_w);
  csv.row("seam_input", seam_in);
  csv.row("seam_fused", seam_out);
  csv.row("max_abs_change", change);
  csv.close();
  log << plan.placements.size() << " windows, seam metric " << format_number(seam_out) << '\n';
  return 0;
}

}  // namespace tlc::cli
