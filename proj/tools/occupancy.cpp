// occupancy: command-line front end for the counting pipeline.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "occupancy/commands.hpp"
#include "occupancy/error.hpp"

namespace fs = std::filesystem;
using namespace occupancy;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitErrorRate = 3;

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

fs::path default_oracle_path() {
  std::error_code ec;
  const fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return self.parent_path() / "occupancy-oracle-detector";
  return "occupancy-oracle-detector";
}

SceneConfig require_config(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::invalid_config, "this subcommand needs --config");
  return load_scene_config(path);
}

int check_errors(const RunStats& stats, double max_rate, const char* what) {
  if (stats.error_rate() > max_rate) {
    std::fprintf(stderr, "%s: %zu of %zu frames failed (rate %.3f > %.3f)\n", what, stats.errors,
                 stats.frames, stats.error_rate(), max_rate);
    return kExitErrorRate;
  }
  return kExitOk;
}

ScalePlan::Mode parse_mode(const std::string& s) {
  if (s == "linear") return ScalePlan::Mode::linear;
  if (s == "interlaced") return ScalePlan::Mode::interlaced;
  throw Error(ErrorCode::invalid_config, "unknown reconstruction mode \"" + s + "\"");
}

FilterOrder parse_order(const std::string& s) {
  if (s == "threshold-first") return FilterOrder::threshold_first;
  if (s == "filter-first") return FilterOrder::filter_first;
  throw Error(ErrorCode::invalid_config, "unknown filter order \"" + s + "\"");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving room occupancy from an omnidirectional ceiling camera"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  bool privacy = false;
  double max_error_rate = 0.05;
  app.add_option("--config", config_path, "Scene config (JSON)");
  app.add_option("--seed", seed, "Seed for synthetic content");
  app.add_flag("--privacy", privacy, "Never emit box coordinates");
  app.add_option("--max-error-rate", max_error_rate,
                 "Exit with status 3 when more frames than this fraction fail")
      ->check(CLI::Range(0.0, 1.0));

  // unwarp
  auto* unwarp = app.add_subcommand("unwarp", "Write the rectified fragments of every frame");
  std::string uw_dataset, uw_out, uw_provider;
  unwarp->add_option("--dataset", uw_dataset, "Dataset directory or manifest")->required();
  unwarp->add_option("--out", uw_out, "Output directory")->required();
  unwarp->add_option("--provider", uw_provider, "Provider whose unwarp settings to use");

  // annotate
  auto* annotate = app.add_subcommand("annotate", "Harvest, fuse and filter detections into an annotation file");
  std::string an_dataset, an_out, an_gt, an_match = "point", an_order;
  bool an_prune = false;
  annotate->add_option("--dataset", an_dataset, "Dataset directory or manifest")->required();
  annotate->add_option("--out", an_out, "Annotation JSONL to write")->required();
  annotate->add_option("--ground-truth", an_gt, "Ground truth for F1 threshold selection");
  annotate->add_option("--match", an_match, "Matching for threshold selection")
      ->check(CLI::IsMember({"point", "iou"}));
  annotate->add_option("--filter-order", an_order, "threshold-first or filter-first")
      ->check(CLI::IsMember({"threshold-first", "filter-first"}));
  annotate->add_flag("--prune", an_prune, "Drop boxes below the selected threshold");

  // degrade (interlace is the same flow)
  auto* degrade_cmd = app.add_subcommand("degrade", "Downscale frames and reconstruct them at detector resolution");
  degrade_cmd->alias("interlace");
  std::string dg_dataset, dg_out, dg_mode = "interlaced", dg_kernel = "k2";
  std::optional<std::size_t> dg_plan;
  int dg_net = 160, dg_scale = 32, dg_t = 0;
  degrade_cmd->add_option("--dataset", dg_dataset, "Dataset directory or manifest")->required();
  degrade_cmd->add_option("--out", dg_out, "Output directory")->required();
  degrade_cmd->add_option("--plan", dg_plan, "Index into the config's scale_plans");
  degrade_cmd->add_option("--net-res", dg_net, "Reconstruction side");
  degrade_cmd->add_option("--scale-res", dg_scale, "Privacy downscale side");
  degrade_cmd->add_option("--mode", dg_mode, "linear or interlaced")
      ->check(CLI::IsMember({"linear", "interlaced"}));
  degrade_cmd->add_option("--kernel", dg_kernel, "Interlacing kernel name");
  degrade_cmd->add_option("--t", dg_t, "Kernel time delta (0 = kernel default)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  std::string ev_pred, ev_gt, ev_out, ev_mode = "point";
  EvaluateOptions ev_opts;
  evaluate->add_option("--pred", ev_pred, "Predicted annotations")->required();
  evaluate->add_option("--gt", ev_gt, "Ground-truth annotations")->required();
  evaluate->add_option("--out", ev_out, "Directory for pr_curve.csv, counts.csv, summary.json");
  evaluate->add_option("--mode", ev_mode, "point or iou")->check(CLI::IsMember({"point", "iou"}));
  evaluate->add_option("--iou-min", ev_opts.iou_min, "IoU needed for a match in iou mode");
  evaluate->add_option("--nms", ev_opts.nms_threshold, "NMS threshold for counting");
  evaluate->add_flag("--include-dropped", ev_opts.include_dropped,
                     "Also score frames the count filter rejected");

  // count
  auto* count = app.add_subcommand("count", "Stream per-frame occupancy counts as JSON lines");
  std::string ct_source, ct_out;
  CountOptions ct_opts;
  count->add_option("--source", ct_source, "Dataset, or directory to watch with --watch")->required();
  count->add_option("--out", ct_out, "Write records here instead of stdout");
  count->add_option("--threshold", ct_opts.threshold, "Score threshold (default from config)");
  count->add_flag("--watch", ct_opts.watch, "Poll the directory for new frames");
  count->add_option("--idle-timeout", ct_opts.idle_timeout_seconds,
                    "Stop watching after this many idle seconds");

  // bench
  auto* bench = app.add_subcommand("bench", "Report kernel throughput");
  std::string bn_dataset, bn_out;
  BenchOptions bn_opts;
  bench->add_option("--dataset", bn_dataset, "Dataset whose first frame to time");
  bench->add_option("--out", bn_out, "Write the JSON report here instead of stdout");
  bench->add_option("--repetitions", bn_opts.repetitions, "Timing repetitions")->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic scene with ground truth");
  std::string sy_out, sy_movement = "moderate", sy_oracle;
  std::size_t sy_frames = 100;
  SyntheticScene scene;
  synth->add_option("--out", sy_out, "Output directory")->required();
  synth->add_option("--frames", sy_frames, "Number of frames");
  synth->add_option("--persons", scene.persons, "Number of people");
  synth->add_option("--movement", sy_movement, "limited, moderate or high")
      ->check(CLI::IsMember({"limited", "moderate", "high"}));
  synth->add_option("--noise", scene.noise, "Noise amplitude in grey levels");
  synth->add_option("--size", scene.image_size, "Frame side in pixels");
  synth->add_option("--oracle", sy_oracle, "Provider command written into scene.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*unwarp) {
      const auto cfg = require_config(config_path);
      return check_errors(run_unwarp(cfg, load_dataset(uw_dataset), uw_out, uw_provider),
                          max_error_rate, "unwarp");
    }
    if (*annotate) {
      const auto cfg = require_config(config_path);
      AnnotateOptions opts;
      if (!an_gt.empty()) opts.ground_truth = an_gt;
      opts.point_mode = an_match == "point";
      opts.prune = an_prune;
      if (!an_order.empty()) opts.order = parse_order(an_order);
      const auto result = run_annotate(cfg, load_dataset(an_dataset), an_out, opts);
      std::fprintf(stderr, "annotate: %zu frames, %zu accepted, threshold %.6g\n",
                   result.stats.frames, result.accepted, result.threshold);
      return check_errors(result.stats, max_error_rate, "annotate");
    }
    if (*degrade_cmd) {
      const auto cfg = require_config(config_path);
      ScalePlan plan;
      if (dg_plan) {
        if (*dg_plan >= cfg.scale_plans.size()) {
          throw Error(ErrorCode::invalid_config, "--plan index out of range");
        }
        plan = cfg.scale_plans[*dg_plan];
      } else {
        plan.net_res = dg_net;
        plan.scale_res = dg_scale;
        plan.mode = parse_mode(dg_mode);
        if (plan.mode == ScalePlan::Mode::interlaced) {
          plan.kernel = find_kernel(cfg.kernels, dg_kernel);
          if (dg_t > 0) plan.kernel = plan.kernel.with_t(dg_t);
        }
      }
      return check_errors(run_degrade(cfg, load_dataset(dg_dataset), plan, dg_out),
                          max_error_rate, "degrade");
    }
    if (*evaluate) {
      ev_opts.mode = ev_mode == "point" ? EvalMode::point : EvalMode::iou;
      const auto s = run_evaluate(ev_pred, ev_gt, ev_out, ev_opts);
      std::cout << s.to_json(ev_opts.mode).dump(2) << '\n';
      return kExitOk;
    }
    if (*count) {
      const auto cfg = require_config(config_path);
      ct_opts.privacy = privacy;
      RunStats stats;
      if (ct_out.empty()) {
        stats = run_count(cfg, ct_source, std::cout, ct_opts);
      } else {
        std::ofstream out(ct_out, std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_error, "cannot write " + ct_out);
        stats = run_count(cfg, ct_source, out, ct_opts);
      }
      return check_errors(stats, max_error_rate, "count");
    }
    if (*bench) {
      std::optional<SceneConfig> cfg;
      std::optional<DatasetManifest> ds;
      if (!config_path.empty()) cfg = load_scene_config(config_path);
      if (!bn_dataset.empty()) ds = load_dataset(bn_dataset);
      const auto report = run_bench(cfg ? &*cfg : nullptr, ds ? &*ds : nullptr, bn_opts);
      if (bn_out.empty()) {
        std::cout << report.dump(2) << '\n';
      } else {
        std::ofstream(bn_out, std::ios::trunc) << report.dump(2) << '\n';
      }
      return kExitOk;
    }
    if (*synth) {
      scene.movement = movement_from_string(sy_movement);
      scene.seed = seed;
      const std::string oracle =
          sy_oracle.empty() ? shell_quote(default_oracle_path().string()) : sy_oracle;
      run_synth(scene, sy_frames, sy_out, oracle);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "occupancy: %s\n", e.what());
    switch (e.code()) {
      case ErrorCode::invalid_config:
      case ErrorCode::schema_version_mismatch:
      case ErrorCode::invalid_resolution:
        return kExitConfig;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "occupancy: %s\n", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
