#include "occupancy/commands.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "occupancy/bounded_queue.hpp"
#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"
#include "occupancy/kernels.hpp"
#include "occupancy/temporal.hpp"

namespace occupancy {
namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string frame_name(const char* prefix, std::int64_t frame, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%06lld%s", prefix, static_cast<long long>(frame), ext);
  return buf;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Image to_rgb(const Image& src) {
  if (src.channels() == 3) return src;
  Image out(src.width(), src.height(), 3);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const std::uint8_t v = src.at(x, y);
      out.at(x, y, 0) = out.at(x, y, 1) = out.at(x, y, 2) = v;
    }
  }
  return out;
}

/// Camera model of the square crop after scaling it to `side` pixels.
OmniCameraModel reconstructed_camera(const OmniCameraModel& cam, int side) {
  const SquareCrop crop = omni_square_crop(cam);
  const double s = static_cast<double>(side) / crop.side;
  OmniCameraModel out;
  out.image_width = side;
  out.image_height = side;
  out.center_x = (cam.center_x - crop.x0 + 0.5) * s - 0.5;
  out.center_y = (cam.center_y - crop.y0 + 0.5) * s - 0.5;
  out.radius_outer = std::min(cam.radius_outer * s, side / 2.0 + 1.0);
  out.radius_inner = cam.radius_inner * s;
  return out;
}

std::vector<DetectionBox> normalized_detections(const std::vector<DetectionBox>& pixel_boxes,
                                                const OmniCameraModel& cam, std::int64_t frame) {
  std::vector<DetectionBox> out;
  for (const auto& b : pixel_boxes) {
    out.push_back(to_detection(normalize_box(b, cam.image_width, cam.image_height), frame));
  }
  return out;
}

std::vector<DetectionBox> record_detections(const FrameAnnotation& r) {
  std::vector<DetectionBox> out;
  for (const auto& b : r.boxes) out.push_back(to_detection(b, r.frame_index));
  return out;
}

MatchResult match_frame(const std::vector<DetectionBox>& dets, const FrameAnnotation& gt,
                        bool point_mode, double iou_min) {
  if (point_mode) {
    if (!gt.points) {
      throw Error(ErrorCode::invalid_config,
                  "ground truth frame " + std::to_string(gt.frame_index) +
                      " has no head points; use --mode iou or convert the boxes to head points");
    }
    return match_points(dets, *gt.points, gt.frame_index);
  }
  return match_iou(dets, record_detections(gt), iou_min, gt.frame_index);
}

std::size_t truth_count(const FrameAnnotation& gt, bool point_mode) {
  return point_mode && gt.points ? gt.points->size() : gt.boxes.size();
}

struct FrameItem {
  std::int64_t index = 0;
  double timestamp = 0.0;
  std::optional<Image> image;
  std::string error;
};

}  // namespace

ProviderFactory subprocess_factory() {
  return [](const ProviderSpec& spec) -> std::unique_ptr<DetectionProvider> {
    static std::atomic<unsigned> counter{0};
    const fs::path scratch = fs::temp_directory_path() /
                             ("occupancy-" + std::to_string(::getpid()) + "-" +
                              std::to_string(counter++));
    return std::make_unique<SubprocessProvider>(
        spec.name, spec.command,
        std::chrono::milliseconds(static_cast<long long>(spec.timeout_seconds * 1000.0)), scratch);
  };
}

FrameDetector::FrameDetector(const SceneConfig& config, const OmniCameraModel& camera,
                             const ProviderFactory& factory, const std::string& map_tag)
    : camera_(camera), nms_threshold_(config.nms_threshold), pose_rule_(config.pose_rule) {
  if (config.providers.empty()) throw Error(ErrorCode::invalid_config, "config lists no providers");
  const ProviderFactory make = factory ? factory : subprocess_factory();
  for (const ProviderSpec& spec : config.providers) {
    Lane lane;
    lane.spec = spec;
    lane.maps = maps_for(camera, spec.unwarp, config.map_cache, map_tag + "_" + spec.name);
    for (int w = 0; w < spec.workers; ++w) lane.workers.push_back(make(spec));
    lanes_.push_back(std::move(lane));
  }
}

std::vector<DetectionBox> FrameDetector::detect(const Image& frame) {
  std::vector<std::vector<FragmentDetections>> results;
  results.reserve(lanes_.size());
  for (Lane& lane : lanes_) {
    results.push_back(harvest_fragments(frame, lane.spec.kind, lane.maps, lane.workers));
  }
  std::vector<ProviderHarvest> harvests;
  for (std::size_t i = 0; i < lanes_.size(); ++i) harvests.push_back({results[i], lanes_[i].maps});
  return fuse_to_omni(harvests, nms_threshold_, pose_rule_);
}

// ---------------------------------------------------------------------------

RunStats run_unwarp(const SceneConfig& config, const DatasetManifest& dataset,
                    const fs::path& out_dir, const std::string& provider_name) {
  const ProviderSpec& spec = config.provider(provider_name);
  const auto maps = maps_for(config.camera, spec.unwarp, config.map_cache, "maps_" + spec.name);
  fs::create_directories(out_dir);
  RunStats stats;
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    const Image frame = load_frame(dataset, i, config.fps);
    for (const FragmentMap& m : maps) {
      const std::string name = "fragment_" + std::to_string(i) + "_" +
                               std::to_string(m.fragment_index()) + ".ppm";
      write_pnm(to_rgb(unwarp_frame(frame, m)), out_dir / name);
    }
    ++stats.frames;
  }
  return stats;
}

// ---------------------------------------------------------------------------

AnnotateResult run_annotate(const SceneConfig& config, const DatasetManifest& dataset,
                            const fs::path& out, const AnnotateOptions& opts) {
  AnnotateResult result;
  const FilterOrder order = opts.order.value_or(config.filter_order);

  struct Fused {
    std::int64_t index;
    double timestamp;
    std::vector<DetectionBox> boxes;  // pixel omni coordinates
    std::string error;
  };
  std::vector<Fused> fused;

  if (!dataset.frames.empty()) {
    FrameDetector detector(config, config.camera, opts.factory);
    BoundedQueue<FrameItem> queue(opts.queue_depth);
    std::jthread ingest([&] {
      for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
        FrameItem item;
        item.index = static_cast<std::int64_t>(i);
        item.timestamp = static_cast<double>(i) / config.fps;
        try {
          item.image = load_frame(dataset, i, config.fps);
        } catch (const Error& e) {
          item.error = e.what();
        }
        if (!queue.push(std::move(item))) return;
      }
      queue.close();
    });
    while (auto item = queue.pop()) {
      Fused f{item->index, item->timestamp, {}, item->error};
      if (f.error.empty()) {
        try {
          f.boxes = detector.detect(*item->image);
        } catch (const Error& e) {
          f.error = e.what();
        }
      }
      if (!f.error.empty()) {
        std::fprintf(stderr, "annotate: frame %lld skipped: %s\n",
                     static_cast<long long>(f.index), f.error.c_str());
        ++result.stats.errors;
      }
      ++result.stats.frames;
      fused.push_back(std::move(f));
    }
  }

  // Ground truth for F1 threshold selection.
  std::map<std::int64_t, FrameAnnotation> gt;
  if (opts.ground_truth) {
    for (auto& r : read_annotations(*opts.ground_truth)) gt.emplace(r.frame_index, std::move(r));
  }

  auto select_threshold = [&](const std::vector<char>& eligible) {
    if (!opts.ground_truth) return config.score_threshold;
    std::vector<MatchSample> samples;
    std::size_t total_gt = 0;
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (!eligible[i]) continue;
      auto it = gt.find(fused[i].index);
      if (it == gt.end()) continue;
      const auto dets = normalized_detections(fused[i].boxes, config.camera, fused[i].index);
      MatchResult m = match_frame(dets, it->second, opts.point_mode, 0.4);
      total_gt += m.true_positives() + m.false_negatives;
      samples.insert(samples.end(), m.samples.begin(), m.samples.end());
    }
    if (samples.empty()) return config.score_threshold;
    return select_threshold_f1(samples, total_gt).threshold;
  };

  auto count_at = [](const Fused& f, double threshold) {
    return static_cast<std::size_t>(std::count_if(
        f.boxes.begin(), f.boxes.end(), [&](const DetectionBox& b) { return b.score >= threshold; }));
  };

  std::vector<char> usable(fused.size());
  for (std::size_t i = 0; i < fused.size(); ++i) usable[i] = fused[i].error.empty();

  std::vector<char> accepted(fused.size(), 0);
  CountFilter filter(config.filter_window, config.filter_tolerance);
  if (order == FilterOrder::threshold_first) {
    result.threshold = select_threshold(usable);
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (usable[i]) {
        accepted[i] = filter.offer(count_at(fused[i], result.threshold)) ==
                      CountFilter::Decision::accept;
      }
    }
  } else {
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (usable[i]) accepted[i] = filter.offer(fused[i].boxes.size()) == CountFilter::Decision::accept;
    }
    result.threshold = select_threshold(accepted);
  }

  for (std::size_t i = 0; i < fused.size(); ++i) {
    FrameAnnotation r;
    r.frame_index = fused[i].index;
    r.timestamp = fused[i].timestamp;
    r.accepted = accepted[i] != 0;
    r.error = fused[i].error;
    for (const auto& b : fused[i].boxes) {
      if (opts.prune && b.score < result.threshold) continue;
      r.boxes.push_back(normalize_box(b, config.camera.image_width, config.camera.image_height));
    }
    result.accepted += r.accepted ? 1 : 0;
    result.records.push_back(std::move(r));
  }
  write_annotations(result.records, out);
  return result;
}

// ---------------------------------------------------------------------------

RunStats run_degrade(const SceneConfig& config, const DatasetManifest& dataset,
                     const ScalePlan& plan, const fs::path& out_dir) {
  plan.validate();
  fs::create_directories(out_dir);
  FrameRing ring(plan.history_needed(), config.fps);
  RunStats stats;
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    ++stats.frames;
    try {
      ring.push(degrade(load_frame(dataset, i, config.fps), config.camera, plan.scale_res));
      if (ring.size() < plan.history_needed()) continue;
      const Image recon = apply_scale_plan(ring, plan);
      write_pnm(recon, out_dir / frame_name("recon_", recon.frame_index, ".pgm"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_config) throw;
      std::fprintf(stderr, "degrade: frame %zu skipped: %s\n", i, e.what());
      ++stats.errors;
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------

ordered_json EvaluationSummary::to_json(EvalMode mode) const {
  ordered_json j;
  j["mode"] = mode == EvalMode::point ? "point" : "iou";
  j["frames"] = frames;
  j["detections"] = detections;
  j["ground_truths"] = ground_truths;
  j["average_precision"] = average_precision;
  j["best_threshold"] = best.threshold;
  j["f1"] = best.f1;
  j["precision"] = best.precision;
  j["recall"] = best.recall;
  j["count_exact_match_rate"] = counts.exact_match_rate;
  j["count_mae"] = counts.mean_absolute_error;
  j["count_max_error"] = counts.max_error;
  return j;
}

EvaluationSummary run_evaluate(const fs::path& predictions, const fs::path& ground_truth,
                               const fs::path& out_dir, const EvaluateOptions& opts) {
  const bool point_mode = opts.mode == EvalMode::point;
  std::map<std::int64_t, FrameAnnotation> preds;
  for (auto& r : read_annotations(predictions)) preds.emplace(r.frame_index, std::move(r));
  const auto gts = read_annotations(ground_truth);
  if (point_mode) {
    for (const auto& g : gts) {
      if (!g.points) {
        throw Error(ErrorCode::invalid_config,
                    "ground truth has boxes but no head points; use --mode iou or convert "
                    "the boxes to head points first");
      }
    }
  }

  EvaluationSummary s;
  std::vector<MatchSample> samples;
  std::size_t fn = 0;
  std::vector<CountInput> count_inputs;
  for (const FrameAnnotation& g : gts) {
    std::vector<DetectionBox> dets;
    if (auto it = preds.find(g.frame_index); it != preds.end()) {
      if ((!it->second.accepted || it->second.skipped()) && !opts.include_dropped) continue;
      dets = record_detections(it->second);
    }
    MatchResult m = match_frame(dets, g, point_mode, opts.iou_min);
    fn += m.false_negatives;
    samples.insert(samples.end(), m.samples.begin(), m.samples.end());
    s.detections += dets.size();
    s.ground_truths += truth_count(g, point_mode);
    count_inputs.push_back({g.frame_index, std::move(dets), truth_count(g, point_mode)});
    ++s.frames;
  }

  s.curve = pr_curve(samples, fn);
  s.average_precision = average_precision(s.curve);
  if (!samples.empty()) {
    s.best = select_threshold_f1(samples, s.curve.total_ground_truth);
  } else {
    s.best.threshold = 1.0;
  }
  s.counts = count_report(count_inputs, s.best.threshold, opts.nms_threshold);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream pr(out_dir / "pr_curve.csv", std::ios::trunc);
    pr << "threshold,precision,recall,f1,tp,fp\n";
    for (const auto& row : s.curve.rows) {
      pr << fmt_num(row.threshold) << ',' << fmt_num(row.precision) << ',' << fmt_num(row.recall)
         << ',' << fmt_num(row.f1) << ',' << row.tp << ',' << row.fp << '\n';
    }
    std::ofstream counts(out_dir / "counts.csv", std::ios::trunc);
    counts << "frame,predicted,truth\n";
    for (const auto& f : s.counts.frames) {
      counts << f.frame_index << ',' << f.predicted << ',' << f.truth << '\n';
    }
    std::ofstream summary(out_dir / "summary.json", std::ios::trunc);
    summary << s.to_json(opts.mode).dump(2) << '\n';
    if (!pr || !counts || !summary) throw Error(ErrorCode::io_error, "failed writing into " + out_dir.string());
  }
  return s;
}

// ---------------------------------------------------------------------------

std::string CountRecord::to_json_line(bool privacy) const {
  ordered_json j;
  j["ts"] = timestamp;
  j["frame"] = frame_index;
  if (!error.empty()) {
    j["error"] = error;
    return j.dump();
  }
  j["count"] = count;
  if (!privacy) {
    j["boxes"] = ordered_json::array();
    for (const auto& b : boxes) j["boxes"].push_back({b.cx, b.cy, b.w, b.h, b.score});
  }
  return j.dump();
}

RunStats run_count(const SceneConfig& config, const fs::path& source, std::ostream& out,
                   const CountOptions& opts) {
  const double threshold = opts.threshold.value_or(config.score_threshold);
  std::optional<ScalePlan> plan;
  if (config.count_plan) plan = config.scale_plans.at(*config.count_plan);
  const OmniCameraModel camera =
      plan ? reconstructed_camera(config.camera, plan->net_res) : config.camera;

  std::optional<DatasetManifest> dataset;
  if (!opts.watch) dataset = load_dataset(source);

  FrameDetector detector(config, camera, opts.factory, plan ? "count_maps" : "maps");
  BoundedQueue<FrameItem> frames(opts.queue_depth);
  BoundedQueue<CountRecord> records(opts.queue_depth);
  RunStats stats;

  // ingest -> degrade/reconstruct
  std::jthread ingest([&] {
    std::optional<FrameRing> ring;
    if (plan) ring.emplace(plan->history_needed(), config.fps);
    std::int64_t next = 0;
    auto feed = [&](const fs::path& file) {
      FrameItem item;
      item.index = next++;
      item.timestamp = static_cast<double>(item.index) / config.fps;
      try {
        Image img = read_image(file);
        img.frame_index = item.index;
        img.timestamp = item.timestamp;
        if (plan) {
          ring->push(degrade(img, config.camera, plan->scale_res));
          if (ring->size() < plan->history_needed()) return true;  // still priming
          img = apply_scale_plan(*ring, *plan);
        }
        if (item.index % config.count_cadence != 0) return true;
        item.image = std::move(img);
      } catch (const Error& e) {
        item.error = e.what();
      }
      return frames.push(std::move(item));
    };

    if (dataset) {
      for (const auto& f : dataset->frames) {
        if (!feed(f)) return;
      }
    } else {
      std::set<fs::path> seen;
      auto idle_since = std::chrono::steady_clock::now();
      for (;;) {
        std::vector<fs::path> fresh;
        std::error_code ec;
        for (const auto& e : fs::directory_iterator(source, ec)) {
          if (e.is_regular_file() && is_frame_file(e.path()) && !seen.count(e.path())) {
            fresh.push_back(e.path());
          }
        }
        std::sort(fresh.begin(), fresh.end());
        for (const auto& f : fresh) {
          seen.insert(f);
          if (!feed(f)) return;
        }
        if (!fresh.empty()) idle_since = std::chrono::steady_clock::now();
        if (std::chrono::duration<double>(std::chrono::steady_clock::now() - idle_since).count() >
            opts.idle_timeout_seconds) {
          break;
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(opts.poll_interval_seconds));
      }
    }
    frames.close();
  });

  // emit
  std::jthread emit([&] {
    while (auto r = records.pop()) out << r->to_json_line(opts.privacy) << '\n' << std::flush;
  });

  // detect -> fuse -> count
  while (auto item = frames.pop()) {
    CountRecord rec;
    rec.frame_index = item->index;
    rec.timestamp = item->timestamp;
    rec.error = item->error;
    if (rec.error.empty()) {
      try {
        for (const auto& b : detector.detect(*item->image)) {
          if (b.score < threshold) continue;
          ++rec.count;
          rec.boxes.push_back(normalize_box(b, camera.image_width, camera.image_height));
        }
      } catch (const Error& e) {
        rec.error = e.what();
      }
    }
    ++stats.frames;
    if (!rec.error.empty()) ++stats.errors;
    records.push(std::move(rec));
  }
  records.close();
  return stats;
}

// ---------------------------------------------------------------------------

namespace {

template <typename F>
double median_ms(int reps, F&& fn) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

}  // namespace

ordered_json run_bench(const SceneConfig* config, const DatasetManifest* dataset,
                       const BenchOptions& opts) {
  const int reps = std::max(1, opts.repetitions);
  ordered_json report;
  report["schema"] = 1;

  // Fixed-size unwarp gate: one frame into k fragments with prebuilt maps.
  SyntheticScene scene;
  scene.image_size = opts.frame_size;
  const SyntheticRenderer renderer(scene);
  const Image frame = renderer.render(0).image;
  UnwarpConfig cfg;
  cfg.k = opts.k;
  cfg.fragment_width = opts.fragment_size;
  cfg.fragment_height = opts.fragment_size;
  const auto maps = build_fragment_maps(renderer.camera(), cfg);
  auto unwarp_with = [&](auto remap) {
    return median_ms(reps, [&] {
      for (const auto& m : maps) {
        volatile auto sink = remap(frame, m.forward_lut(), m.width(), m.height()).pixels()[0];
        (void)sink;
      }
    });
  };
  report["unwarp"] = {{"frame", {opts.frame_size, opts.frame_size}},
                      {"fragments", {opts.fragment_size, opts.fragment_size}},
                      {"k", opts.k},
                      {"ms_per_frame_serial", unwarp_with(kernels::serial::remap_bilinear)},
                      {"ms_per_frame_parallel", unwarp_with(kernels::omp::remap_bilinear)}};

  // Interlace at the privacy resolution.
  FrameRing ring(4, scene.fps);
  for (int i = 0; i < 4; ++i) {
    Image low = downscale(renderer.render(i).image, opts.interlace_scale);
    ring.push(std::move(low));
  }
  const InterlacingKernel k2 = find_kernel(default_kernels(), "k2");
  kernels::InterlaceSources src{&ring.at_age(0), &ring.at_age(1), &ring.at_age(2), &ring.at_age(3)};
  constexpr int kBatch = 2000;
  auto interlace_fps = [&](auto fn) {
    const double ms = median_ms(reps, [&] {
      for (int i = 0; i < kBatch; ++i) {
        volatile auto sink = fn(src).pixels()[0];
        (void)sink;
      }
    });
    return ms > 0.0 ? kBatch / (ms / 1000.0) : 0.0;
  };
  report["interlace"] = {{"scale_res", opts.interlace_scale},
                         {"kernel", k2.name},
                         {"frames_per_second_serial", interlace_fps(kernels::serial::interlace_2x)},
                         {"frames_per_second_parallel", interlace_fps(kernels::omp::interlace_2x)}};

  report["downscale"] = {
      {"from", opts.frame_size},
      {"to", opts.interlace_scale},
      {"ms_per_frame_serial", median_ms(reps, [&] {
         kernels::serial::area_resize(frame, opts.interlace_scale, opts.interlace_scale);
       })},
      {"ms_per_frame_parallel", median_ms(reps, [&] {
         kernels::omp::area_resize(frame, opts.interlace_scale, opts.interlace_scale);
       })}};

  // Per-scene numbers when a config is supplied.
  report["scale_plans"] = ordered_json::array();
  report["scene_unwarp"] = ordered_json::array();
  if (config) {
    Image scene_frame = dataset && !dataset->frames.empty()
                            ? load_frame(*dataset, 0, config->fps)
                            : SyntheticRenderer([&] {
                                SyntheticScene s;
                                s.image_size = config->camera.image_width;
                                return s;
                              }())
                                  .render(0)
                                  .image;
    for (const auto& p : config->providers) {
      const auto pm = build_fragment_maps(config->camera, p.unwarp);
      const double ms = median_ms(reps, [&] {
        for (const auto& m : pm) unwarp_frame(scene_frame, m);
      });
      report["scene_unwarp"].push_back({{"provider", p.name}, {"k", p.unwarp.k}, {"ms_per_frame", ms}});
    }
    for (const auto& plan : config->scale_plans) {
      FrameRing pr(plan.history_needed(), config->fps);
      Image low = degrade(scene_frame, config->camera, plan.scale_res);
      for (std::size_t i = 0; i < plan.history_needed(); ++i) {
        low.frame_index = static_cast<std::int64_t>(i);
        pr.push(low);
      }
      const double degrade_ms =
          median_ms(reps, [&] { degrade(scene_frame, config->camera, plan.scale_res); });
      const double recon_ms = median_ms(reps, [&] { apply_scale_plan(pr, plan); });
      report["scale_plans"].push_back(
          {{"net_res", plan.net_res},
           {"scale_res", plan.scale_res},
           {"mode", plan.mode == ScalePlan::Mode::linear ? "linear" : "interlaced"},
           {"kernel", plan.mode == ScalePlan::Mode::linear ? "" : plan.kernel.name},
           {"t", plan.mode == ScalePlan::Mode::linear ? 0 : plan.kernel.t},
           {"degrade_ms_per_frame", degrade_ms},
           {"reconstruct_ms_per_frame", recon_ms}});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

void run_synth(const SyntheticScene& scene, std::size_t frames, const fs::path& out_dir,
               const std::string& oracle_command) {
  const SyntheticRenderer renderer(scene);
  write_synthetic_dataset(renderer, frames, out_dir);

  SceneConfig cfg;
  cfg.camera = renderer.camera();
  cfg.fps = scene.fps;
  ProviderSpec oracle;
  oracle.name = "oracle";
  oracle.kind = ProviderKind::boxes;
  oracle.command = oracle_command;
  oracle.unwarp.k = 3;
  oracle.unwarp.overlap = 0.10;
  cfg.providers.push_back(oracle);
  const auto kernels = default_kernels();
  cfg.scale_plans.push_back({160, 32, ScalePlan::Mode::linear, {}});
  cfg.scale_plans.push_back({160, 32, ScalePlan::Mode::interlaced, find_kernel(kernels, "k2")});
  cfg.scale_plans.push_back({96, 48, ScalePlan::Mode::interlaced, find_kernel(kernels, "k1")});
  save_scene_config(cfg, out_dir / "scene.json");
}

}  // namespace occupancy
