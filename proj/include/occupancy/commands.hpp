#pragma once

// The occupancy subcommands as library calls. tools/occupancy.cpp wraps each
// one; tests drive them directly.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "occupancy/config.hpp"
#include "occupancy/eval.hpp"
#include "occupancy/forge.hpp"
#include "occupancy/synthetic.hpp"

namespace occupancy {

struct RunStats {
  std::size_t frames = 0;
  std::size_t errors = 0;  ///< frames skipped because a stage failed

  double error_rate() const noexcept {
    return frames == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(frames);
  }
};

/// Builds one provider process (or stand-in) for a spec.
using ProviderFactory = std::function<std::unique_ptr<DetectionProvider>(const ProviderSpec&)>;

/// SubprocessProvider with a per-process scratch directory.
ProviderFactory subprocess_factory();

/// Providers and maps for every configured provider; turns a frame into fused
/// omni detections.
class FrameDetector {
 public:
  FrameDetector(const SceneConfig& config, const OmniCameraModel& camera,
                const ProviderFactory& factory, const std::string& map_tag = "maps");

  /// Throws the first provider error; the caller decides whether to skip.
  std::vector<DetectionBox> detect(const Image& frame);

  const OmniCameraModel& camera() const noexcept { return camera_; }

 private:
  struct Lane {
    ProviderSpec spec;
    std::vector<FragmentMap> maps;
    std::vector<std::unique_ptr<DetectionProvider>> workers;
  };
  OmniCameraModel camera_;
  double nms_threshold_;
  PoseBoxRule pose_rule_;
  std::vector<Lane> lanes_;
};

/// Writes fragment_<frame>_<i>.ppm for every frame and fragment.
RunStats run_unwarp(const SceneConfig& config, const DatasetManifest& dataset,
                    const std::filesystem::path& out_dir, const std::string& provider_name = {});

struct AnnotateOptions {
  std::optional<std::filesystem::path> ground_truth;  ///< enables F1 threshold selection
  bool point_mode = true;        ///< matching protocol for threshold selection
  bool prune = false;            ///< drop boxes below the chosen threshold from the output
  std::optional<FilterOrder> order;
  ProviderFactory factory;       ///< defaults to subprocess_factory()
  std::size_t queue_depth = 4;
};

struct AnnotateResult {
  RunStats stats;
  double threshold = 0.0;
  std::size_t accepted = 0;
  std::vector<FrameAnnotation> records;
};

AnnotateResult run_annotate(const SceneConfig& config, const DatasetManifest& dataset,
                            const std::filesystem::path& out, const AnnotateOptions& opts = {});

/// Writes recon_<frame>.pgm at plan.net_res for every frame once the ring
/// holds enough history.
RunStats run_degrade(const SceneConfig& config, const DatasetManifest& dataset,
                     const ScalePlan& plan, const std::filesystem::path& out_dir);

enum class EvalMode { point, iou };

struct EvaluateOptions {
  EvalMode mode = EvalMode::point;
  double iou_min = 0.4;
  double nms_threshold = 0.4;
  bool include_dropped = false;
};

struct EvaluationSummary {
  PRCurve curve;
  double average_precision = 0.0;
  ThresholdChoice best;
  CountReport counts;
  std::size_t frames = 0;
  std::size_t detections = 0;
  std::size_t ground_truths = 0;

  nlohmann::ordered_json to_json(EvalMode mode) const;
};

/// Matches predictions against ground truth frame by frame, pools the samples
/// and writes pr_curve.csv, counts.csv and summary.json into out_dir (when
/// non-empty). Point mode on a ground truth without head points throws
/// invalid-config.
EvaluationSummary run_evaluate(const std::filesystem::path& predictions,
                               const std::filesystem::path& ground_truth,
                               const std::filesystem::path& out_dir,
                               const EvaluateOptions& opts = {});

struct CountOptions {
  bool privacy = false;
  std::optional<double> threshold;  ///< overrides config.score_threshold
  bool watch = false;               ///< poll a directory for new frames
  double idle_timeout_seconds = 2.0;
  double poll_interval_seconds = 0.1;
  ProviderFactory factory;
  std::size_t queue_depth = 4;
};

struct CountRecord {
  double timestamp = 0.0;
  std::int64_t frame_index = 0;
  std::size_t count = 0;
  std::vector<AnnotationBox> boxes;
  std::string error;

  std::string to_json_line(bool privacy) const;
};

/// Streams line-delimited count records to `out` as frames are processed.
RunStats run_count(const SceneConfig& config, const std::filesystem::path& source,
                   std::ostream& out, const CountOptions& opts = {});

struct BenchOptions {
  int frame_size = 1024;
  int fragment_size = 448;
  int k = 3;
  int interlace_scale = 32;
  int repetitions = 20;
};

/// Throughput report (stable schema). Uses the config's camera and plans when
/// given, otherwise a synthetic centred camera.
nlohmann::ordered_json run_bench(const SceneConfig* config, const DatasetManifest* dataset,
                                 const BenchOptions& opts = {});

/// Renders a synthetic dataset plus a scene.json wired to the oracle detector.
void run_synth(const SyntheticScene& scene, std::size_t frames, const std::filesystem::path& out_dir,
               const std::string& oracle_command);

}  // namespace occupancy
