#include "occupancy/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace occupancy {

std::size_t MatchResult::true_positives() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const MatchSample& s) { return s.verdict == Verdict::tp; }));
}

bool match_before(const DetectionBox& a, const DetectionBox& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.x, a.y, a.w, a.h) < std::tie(b.x, b.y, b.w, b.h);
}

namespace {

std::vector<std::size_t> matching_order(std::span<const DetectionBox> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return match_before(dets[a], dets[b]);
  });
  return order;
}

// Bipartite detection -> head-point matcher. Candidates of each detection are
// its contained points, nearest-to-centre first.
class PointMatcher {
 public:
  PointMatcher(std::span<const DetectionBox> dets, std::span<const Point2> points)
      : candidates_(dets.size()), owner_(points.size(), kNone) {
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const Point2 c = dets[d].center();
      auto& cand = candidates_[d];
      for (std::size_t p = 0; p < points.size(); ++p) {
        if (dets[d].contains(points[p])) cand.push_back(p);
      }
      std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::hypot(points[a].x - c.x, points[a].y - c.y);
        const double db = std::hypot(points[b].x - c.x, points[b].y - c.y);
        if (da != db) return da < db;
        return std::tie(points[a].x, points[a].y) < std::tie(points[b].x, points[b].y);
      });
    }
  }

  bool assign(std::size_t det) {
    std::vector<char> visited(owner_.size(), 0);
    return augment(det, visited);
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool augment(std::size_t det, std::vector<char>& visited) {
    for (std::size_t p : candidates_[det]) {
      if (owner_[p] == kNone) {
        owner_[p] = det;
        return true;
      }
    }
    for (std::size_t p : candidates_[det]) {
      if (visited[p]) continue;
      visited[p] = 1;
      if (augment(owner_[p], visited)) {
        owner_[p] = det;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::size_t> owner_;
};

}  // namespace

MatchResult match_points(std::span<const DetectionBox> dets, std::span<const Point2> points,
                         std::int64_t frame_index) {
  MatchResult result;
  PointMatcher matcher(dets, points);
  std::size_t matched = 0;
  for (std::size_t d : matching_order(dets)) {
    const bool tp = matcher.assign(d);
    matched += tp ? 1 : 0;
    result.samples.push_back({dets[d].score, tp ? Verdict::tp : Verdict::fp, frame_index});
  }
  result.false_negatives = points.size() - matched;
  return result;
}

MatchResult match_iou(std::span<const DetectionBox> dets, std::span<const DetectionBox> gts,
                      double iou_min, std::int64_t frame_index) {
  MatchResult result;
  std::vector<char> taken(gts.size(), 0);
  std::size_t matched = 0;
  const auto gt_order = matching_order(gts);
  for (std::size_t d : matching_order(dets)) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g : gt_order) {
      if (taken[g]) continue;
      const double v = iou(dets[d], gts[g]);
      if (v >= iou_min && v > best) {
        best = v;
        best_gt = g;
      }
    }
    const bool tp = best_gt < gts.size();
    if (tp) {
      taken[best_gt] = 1;
      ++matched;
    }
    result.samples.push_back({dets[d].score, tp ? Verdict::tp : Verdict::fp, frame_index});
  }
  result.false_negatives = gts.size() - matched;
  return result;
}

PRCurve pr_curve(std::span<const MatchSample> samples, std::size_t false_negatives) {
  std::vector<MatchSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MatchSample& a, const MatchSample& b) { return a.score > b.score; });
  PRCurve curve;
  const std::size_t total_tp = static_cast<std::size_t>(std::count_if(
      sorted.begin(), sorted.end(), [](const MatchSample& s) { return s.verdict == Verdict::tp; }));
  curve.total_ground_truth = total_tp + false_negatives;

  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].verdict == Verdict::tp ? tp : fp) += 1;
    if (i + 1 < sorted.size() && sorted[i + 1].score == sorted[i].score) continue;
    PRRow row;
    row.threshold = sorted[i].score;
    row.tp = tp;
    row.fp = fp;
    row.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    row.recall = curve.total_ground_truth == 0
                     ? 0.0
                     : static_cast<double>(tp) / static_cast<double>(curve.total_ground_truth);
    // 2PR / (P + R) == 2TP / (TP + FP + G)
    const std::size_t den = tp + fp + curve.total_ground_truth;
    row.f1 = den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
    curve.rows.push_back(row);
  }
  return curve;
}

double average_precision(const PRCurve& curve) {
  if (curve.rows.empty() || curve.total_ground_truth == 0) return 0.0;
  // Rows run from high to low threshold, so recall is non-decreasing; sweep
  // backwards to carry the precision envelope.
  double ap = 0.0;
  double envelope = 0.0;
  for (std::size_t i = curve.rows.size(); i-- > 0;) {
    envelope = std::max(envelope, curve.rows[i].precision);
    // Recall steps are whole true positives; summing counts keeps a perfect
    // curve at exactly 1.
    const std::size_t prev_tp = i == 0 ? 0 : curve.rows[i - 1].tp;
    ap += static_cast<double>(curve.rows[i].tp - prev_tp) * envelope;
  }
  return ap / static_cast<double>(curve.total_ground_truth);
}

CountReport summarize_counts(std::vector<FrameCount> frames) {
  CountReport report;
  report.frames = std::move(frames);
  if (report.frames.empty()) return report;
  std::size_t exact = 0;
  std::size_t abs_sum = 0;
  for (const FrameCount& f : report.frames) {
    const std::size_t err = f.predicted > f.truth ? f.predicted - f.truth : f.truth - f.predicted;
    exact += err == 0 ? 1 : 0;
    abs_sum += err;
    report.max_error = std::max(report.max_error, err);
  }
  const double n = static_cast<double>(report.frames.size());
  report.exact_match_rate = static_cast<double>(exact) / n;
  report.mean_absolute_error = static_cast<double>(abs_sum) / n;
  return report;
}

CountReport count_report(std::span<const CountInput> frames, double threshold,
                         double nms_threshold) {
  std::vector<FrameCount> counts;
  counts.reserve(frames.size());
  for (const CountInput& f : frames) {
    std::vector<DetectionBox> above;
    for (const DetectionBox& d : f.detections) {
      if (d.score >= threshold) above.push_back(d);
    }
    counts.push_back({f.frame_index, nms(std::move(above), nms_threshold).size(), f.truth});
  }
  return summarize_counts(std::move(counts));
}

}  // namespace occupancy
