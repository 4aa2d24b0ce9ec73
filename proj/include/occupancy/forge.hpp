#pragma once

// Self-training label generation: run detection providers on unwarped
// fragments, warp their output back onto the omni image, fuse with NMS and
// filter frames whose count deviates from the recent mean.

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "occupancy/eval.hpp"
#include "occupancy/geometry.hpp"
#include "occupancy/provider.hpp"

namespace occupancy {

struct ProviderSpec {
  std::string name;
  ProviderKind kind = ProviderKind::boxes;
  std::string command;  ///< shell command speaking the wire protocol
  UnwarpConfig unwarp;  ///< unwarp.k is the fragment count for this provider
  double timeout_seconds = 10.0;
  int workers = 1;  ///< concurrent provider processes

  void validate() const;
};

struct FragmentDetections {
  int fragment_index = 0;
  std::vector<DetectionBox> boxes;
  std::vector<PoseDetection> poses;
};

/// Unwarps the frame with every map and asks a provider about each fragment.
/// Fragments are spread over the workers (one thread per worker); each
/// worker's requests stay in order. The first failing fragment's error is
/// rethrown after all workers finish.
std::vector<FragmentDetections> harvest_fragments(
    const Image& frame, ProviderKind kind, std::span<const FragmentMap> maps,
    std::span<const std::unique_ptr<DetectionProvider>> workers);

struct PoseBoxRule {
  double min_confidence = 0.1;
  double expansion = 0.1;  ///< total growth of width/height, as a fraction of the diagonal
};

/// Box over the confident keypoints, grown by rule.expansion * diagonal and
/// floored at 1x1; score is their mean confidence.
DetectionBox pose_to_box(const PoseDetection& pose, const PoseBoxRule& rule = {});

/// One provider's harvest together with the maps it was produced on.
struct ProviderHarvest {
  std::span<const FragmentDetections> detections;
  std::span<const FragmentMap> maps;
};

/// Warps every box (via its poly-point outline) and every pose back onto the
/// omni image, pools all providers and runs one NMS pass.
std::vector<DetectionBox> fuse_to_omni(std::span<const ProviderHarvest> harvests,
                                       double nms_threshold = 0.4,
                                       const PoseBoxRule& rule = {});

/// Temporal plausibility filter on per-frame detection counts.
class CountFilter {
 public:
  enum class Decision { accept, drop };

  explicit CountFilter(std::size_t window_len = 15, std::size_t tolerance = 0);

  /// Accepts when |count - round(mean(window))| <= tolerance or the window is
  /// empty; only accepted counts enter the window.
  Decision offer(std::size_t count);

  const std::deque<std::size_t>& window() const noexcept { return window_; }
  std::size_t window_len() const noexcept { return window_len_; }
  std::size_t tolerance() const noexcept { return tolerance_; }
  /// Mean rounded half away from zero; 0 for an empty window.
  std::size_t rounded_mean() const noexcept;

 private:
  std::deque<std::size_t> window_;
  std::size_t window_len_;
  std::size_t tolerance_;
  std::size_t sum_ = 0;
};

struct ThresholdChoice {
  double threshold = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Confidence threshold maximizing F1 over every distinct sample score; ties
/// go to the higher threshold. total_ground_truth = matched + unmatched GTs.
ThresholdChoice select_threshold_f1(std::span<const MatchSample> samples,
                                    std::size_t total_ground_truth);

}  // namespace occupancy
