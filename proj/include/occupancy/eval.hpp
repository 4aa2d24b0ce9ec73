#pragma once

// Detection evaluation: point-in-box and IoU matching, PR curves, average
// precision and count-by-detection reports.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "occupancy/geometry.hpp"

namespace occupancy {

enum class Verdict { tp, fp };

struct MatchSample {
  double score = 0.0;
  Verdict verdict = Verdict::fp;
  std::int64_t frame_index = 0;
  friend bool operator==(const MatchSample&, const MatchSample&) = default;
};

/// One sample per detection; unmatched ground truths are counted, not sampled.
struct MatchResult {
  std::vector<MatchSample> samples;
  std::size_t false_negatives = 0;

  std::size_t true_positives() const noexcept;
};

/// Order in which detections are matched: score descending, ties broken on
/// box geometry so equal-score permutations give identical verdicts.
bool match_before(const DetectionBox& a, const DetectionBox& b) noexcept;

/// A detection is a true positive when it contains a head point. Detections
/// are visited by descending score and take their nearest free point; when
/// every contained point is taken, earlier matches are re-routed along an
/// augmenting path if one exists, so no earlier true positive is ever lost
/// and the true-positive count of every score prefix is a maximum matching.
MatchResult match_points(std::span<const DetectionBox> detections,
                         std::span<const Point2> head_points, std::int64_t frame_index = 0);

/// VOC-style greedy: each detection (by descending score) takes the unmatched
/// ground-truth box with the highest IoU, provided it reaches iou_min.
MatchResult match_iou(std::span<const DetectionBox> detections,
                      std::span<const DetectionBox> ground_truth, double iou_min = 0.4,
                      std::int64_t frame_index = 0);

struct PRRow {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
};

/// Rows ordered by threshold descending, one per distinct score.
struct PRCurve {
  std::vector<PRRow> rows;
  std::size_t total_ground_truth = 0;
};

/// false_negatives is the pooled count of ground truths no detection matched.
/// Empty sample sets produce an empty curve.
PRCurve pr_curve(std::span<const MatchSample> samples, std::size_t false_negatives);

/// All-point interpolated area under the precision envelope.
double average_precision(const PRCurve& curve);

struct FrameCount {
  std::int64_t frame_index = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;
};

struct CountReport {
  std::vector<FrameCount> frames;
  double exact_match_rate = 1.0;
  double mean_absolute_error = 0.0;
  std::size_t max_error = 0;
};

struct CountInput {
  std::int64_t frame_index = 0;
  std::vector<DetectionBox> detections;
  std::size_t truth = 0;
};

/// Predicted count = detections scoring >= threshold that survive NMS.
CountReport count_report(std::span<const CountInput> frames, double threshold,
                         double nms_threshold = 0.4);

/// Aggregates for already-counted frames.
CountReport summarize_counts(std::vector<FrameCount> frames);

}  // namespace occupancy
