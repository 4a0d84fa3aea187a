#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "commands.hpp"
#include "tlc/errors.hpp"
#include "tlc/params_io.hpp"

namespace tlc::cli {

namespace {

using Pair = std::vector<std::size_t>;

CLI::Option* add_pair(CLI::App* sub, const std::string& name, Pair& value,
                      const std::string& help) {
  return sub->add_option(name, value, help)
      ->expected(1, 2)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

WindowSpec to_window(const Pair& p) { return {p.at(0), p.size() > 1 ? p[1] : p[0]}; }

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends `--key value...` for every config-file entry whose flag is not on
// the command line, so command-line flags always win.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  const auto name = std::find_if(args.begin(), args.end(),
                                 [](const std::string& a) { return !a.starts_with("-"); });
  if (name == args.end()) return args;
  CLI::App* sub = app.get_subcommand_no_throw(*name);
  if (sub == nullptr) return args;

  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (!path) return args;

  const std::vector<std::string> original = args;
  for (const auto& [key, value] : read_key_value_file(*path)) {
    const std::string flag = "--" + key;
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw(flag);
    if (opt == nullptr) {
      throw Error(ErrorCode::kUsage, "config key '" + key + "' is not an option of " + *name);
    }
    if (given_on_command_line(original, flag)) continue;
    if (opt->get_type_size_max() == 0) {
      if (value == "true" || value == "1") {
        args.push_back(flag);
      } else if (value != "false" && value != "0") {
        throw Error(ErrorCode::kUsage, "config key '" + key + "' takes true or false");
      }
      continue;
    }
    args.push_back(flag);
    std::istringstream tokens(value);
    for (std::string t; tokens >> t;) args.push_back(t);
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Test-time local converter: windowed statistics and experiments", "tlc"};
  app.require_subcommand(1);

  std::string config_note = "flat key=value file; command-line flags win";
  std::string config_path;

  // aggregate
  AggregateOptions agg;
  std::string agg_stat = "mean";
  std::string agg_summary;
  Pair agg_k{384, 384};
  Pair agg_stride{1};
  CLI::App* aggregate = app.add_subcommand("aggregate", "Windowed mean, square mean, variance or max");
  aggregate->add_option("--input", agg.input, "Input TLCT tensor")->required();
  aggregate->add_option("--output", agg.output, "Output TLCT tensor")->required();
  aggregate->add_option("--summary", agg_summary, "Summary CSV (default <output>.summary.csv)");
  aggregate->add_option("--stat", agg_stat, "mean | sqmean | var | max")->capture_default_str();
  add_pair(aggregate, "--k", agg_k, "Window H W");
  add_pair(aggregate, "--stride", agg_stride, "Sampling stride for the approximate mean");
  aggregate->add_flag("--brute-force", agg.brute_force, "Use the O(K^2) reference path");
  aggregate->add_option("--config", config_path, config_note);

  // convert
  ConvertOptions conv;
  std::string conv_module;
  std::string conv_params;
  Pair conv_k{384, 384};
  CLI::App* convert = app.add_subcommand("convert", "Run a module in Global and Local mode");
  convert->add_option("--input", conv.input, "Input TLCT tensor")->required();
  convert->add_option("--output", conv.output, "Output prefix")->required();
  convert->add_option("--module", conv_module, "se | in | gn | ge | cbam")->required();
  convert->add_option("--params", conv_params, "Params manifest (default: seeded random)");
  add_pair(convert, "--k", conv_k, "Window H W");
  convert->add_option("--seed", conv.seed, "Seed for random params and spot checks")
      ->capture_default_str();
  convert->add_option("--se-ratio", conv.se_ratio, "SE/CBAM reduction ratio cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  convert->add_option("--groups", conv.groups, "GN group count for random params");
  convert->add_option("--checks", conv.checks, "Interior-crop spot checks")->capture_default_str();
  convert->add_option("--config", config_path, config_note);

  // stats
  StatsOptions st;
  std::string st_source = "varying";
  Pair st_map{st.experiment.height, st.experiment.width};
  CLI::App* stats = app.add_subcommand("stats", "Pooled-statistic distribution shift experiment");
  stats->add_option("--output", st.output, "Output prefix")->required();
  stats->add_option("--source", st_source, "varying | white | constant")->capture_default_str();
  stats->add_option("--channels", st.experiment.channels, "Source channels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_pair(stats, "--map", st_map, "Generated map H W");
  stats->add_option("--patch", st.experiment.patch, "Training patch edge and TLC window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  stats->add_option("--samples", st.experiment.samples, "Samples per population")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  stats->add_option("--seed", st.experiment.seed, "Seed")->capture_default_str();
  stats->add_option("--bins", st.bins, "Histogram bins")->capture_default_str();
  stats->add_option("--config", config_path, config_note);

  // calibrate
  CalibrateOptions cal;
  std::string cal_output;
  Pair cal_size{cal.calib_h, cal.calib_w};
  CLI::App* calibrate = app.add_subcommand("calibrate", "Per-layer windows from a calibration size");
  calibrate->add_option("--input", cal.graph, "Layer graph: lines of `name scale [flag]`")
      ->required();
  calibrate->add_option("--output", cal_output, "Output CSV (default stdout)");
  add_pair(calibrate, "--calib", cal_size, "Calibration image H W");
  calibrate->add_option("--config", config_path, config_note);

  // bench
  BenchOptions bn;
  CLI::App* bench = app.add_subcommand("bench", "Integral vs brute-force timing ratios");
  bench->add_option("--output", bn.output, "Output prefix")->required();
  bench->add_option("--size", bn.size, "Map edge")->capture_default_str();
  bench->add_option("--reps", bn.reps, "Repetitions per timing (>= 5)")->capture_default_str();
  bench->add_option("--seed", bn.seed, "Seed")->capture_default_str();
  bench->add_option("--config", config_path, config_note);

  // demo
  DemoOptions dm;
  std::string dm_layout = "two-region";
  Pair dm_k{dm.demo.window.k_h, dm.demo.window.k_w};
  Pair dm_size{dm.demo.height, dm.demo.width};
  CLI::App* demo = app.add_subcommand("demo", "Global vs local Wiener shrinkage");
  demo->add_option("--output", dm.output, "Output prefix")->required();
  demo->add_option("--layout", dm_layout, "two-region | uniform | zero")->capture_default_str();
  add_pair(demo, "--k", dm_k, "Noise-statistics window H W");
  add_pair(demo, "--size", dm_size, "Signal H W");
  demo->add_option("--seed", dm.demo.seed, "Seed")->capture_default_str();
  demo->add_option("--sigma-left", dm.demo.sigma_left, "Noise std, left half (uniform level)")
      ->capture_default_str();
  demo->add_option("--sigma-right", dm.demo.sigma_right, "Noise std, right half")
      ->capture_default_str();
  demo->add_option("--support", dm.demo.support, "Shrinkage statistics support")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  demo->add_option("--config", config_path, config_note);

  // fuse
  FuseOptions fu;
  std::string fu_transform = "identity";
  std::string fu_params;
  Pair fu_k{384, 384};
  Pair fu_stride;
  double fu_temperature = 0.0;
  CLI::App* fuse = app.add_subcommand("fuse", "Overlapping-window transform with averaging");
  fuse->add_option("--input", fu.input, "Input TLCT tensor")->required();
  fuse->add_option("--output", fu.output, "Output prefix")->required();
  fuse->add_option("--transform", fu_transform, "identity | attention | mean")
      ->capture_default_str();
  add_pair(fuse, "--k", fu_k, "Window H W");
  add_pair(fuse, "--stride", fu_stride, "Stride H W (default half window)");
  fuse->add_option("--params", fu_params, "Params manifest (attn.temperature)");
  CLI::Option* temp_opt = fuse->add_option("--temperature", fu_temperature, "Attention temperature");
  fuse->add_option("--config", config_path, config_note);

  try {
    std::vector<std::string> args = expand_config(app, raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*aggregate) {
      agg.stat = parse_stat(agg_stat);
      agg.window = to_window(agg_k);
      if (agg_stride.size() == 2 && agg_stride[0] != agg_stride[1]) {
        throw Error(ErrorCode::kUsage, "aggregate samples with one stride for both axes");
      }
      agg.stride = agg_stride[0];
      if (!agg_summary.empty()) agg.summary = agg_summary;
      return cmd_aggregate(agg, err);
    }
    if (*convert) {
      conv.module = parse_module_kind(conv_module);
      conv.window = to_window(conv_k);
      if (!conv_params.empty()) conv.params = conv_params;
      return cmd_convert(conv, err);
    }
    if (*stats) {
      st.experiment.source = parse_source_kind(st_source);
      st.experiment.height = to_window(st_map).k_h;
      st.experiment.width = to_window(st_map).k_w;
      return cmd_stats(st, err);
    }
    if (*calibrate) {
      cal.calib_h = to_window(cal_size).k_h;
      cal.calib_w = to_window(cal_size).k_w;
      if (!cal_output.empty()) cal.output = cal_output;
      return cmd_calibrate(cal, out);
    }
    if (*bench) return cmd_bench(bn, err);
    if (*demo) {
      dm.demo.layout = parse_noise_layout(dm_layout);
      dm.demo.window = to_window(dm_k);
      dm.demo.height = to_window(dm_size).k_h;
      dm.demo.width = to_window(dm_size).k_w;
      return cmd_demo(dm, err);
    }
    if (*fuse) {
      fu.transform = parse_fuse_transform(fu_transform);
      fu.window = to_window(fu_k);
      if (!fu_stride.empty()) {
        fu.s_h = to_window(fu_stride).k_h;
        fu.s_w = to_window(fu_stride).k_w;
      }
      if (!fu_params.empty()) fu.params = fu_params;
      if (temp_opt->count() > 0) fu.temperature = fu_temperature;
      return cmd_fuse(fu, err);
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << "tlc: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "tlc: " << e.what() << '\n';
    return exit_code(ErrorCode::kIoFailure);
  } catch (const std::exception& e) {
    err << "tlc: " << e.what() << '\n';
    return exit_code(ErrorCode::kInvalidArgument);
  }
}

}  // namespace tlc::cli
