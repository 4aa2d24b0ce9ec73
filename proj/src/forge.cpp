#include "occupancy/forge.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "occupancy/error.hpp"

namespace occupancy {

void ProviderSpec::validate() const {
  if (name.empty()) throw Error(ErrorCode::invalid_config, "provider needs a name");
  if (command.empty()) throw Error(ErrorCode::invalid_config, "provider '" + name + "' has no command");
  if (!(timeout_seconds > 0.0)) {
    throw Error(ErrorCode::invalid_config, "provider '" + name + "' needs a positive timeout");
  }
  if (workers < 1) throw Error(ErrorCode::invalid_config, "provider '" + name + "' needs workers >= 1");
  unwarp.validate();
}

std::vector<FragmentDetections> harvest_fragments(
    const Image& frame, ProviderKind kind, std::span<const FragmentMap> maps,
    std::span<const std::unique_ptr<DetectionProvider>> workers) {
  if (workers.empty()) throw Error(ErrorCode::invalid_config, "harvest needs at least one provider");
  std::vector<Image> fragments;
  fragments.reserve(maps.size());
  for (const FragmentMap& m : maps) fragments.push_back(unwarp_frame(frame, m));

  std::vector<FragmentDetections> out(maps.size());
  std::vector<std::exception_ptr> errors(maps.size());
  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < maps.size(); i += workers.size()) {
      try {
        ProviderRequest req;
        req.frame = frame.frame_index;
        req.fragment = maps[i].fragment_index();
        req.kind = kind;
        ProviderReply reply = workers[worker]->detect(req, fragments[i]);
        out[i].fragment_index = req.fragment;
        out[i].boxes = std::move(reply.boxes);
        out[i].poses = std::move(reply.poses);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::min(workers.size(), maps.size());
  if (n_workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(run, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

DetectionBox pose_to_box(const PoseDetection& pose, const PoseBoxRule& rule) {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0, conf_sum = 0;
  std::size_t n = 0;
  for (const PoseKeypoint& k : pose.keypoints) {
    if (k.confidence < rule.min_confidence) continue;
    if (n == 0) {
      x0 = x1 = k.point.x;
      y0 = y1 = k.point.y;
    }
    x0 = std::min(x0, k.point.x);
    x1 = std::max(x1, k.point.x);
    y0 = std::min(y0, k.point.y);
    y1 = std::max(y1, k.point.y);
    conf_sum += k.confidence;
    ++n;
  }
  if (n == 0) {
    throw Error(ErrorCode::no_confident_keypoints,
                "no keypoint reaches confidence " + std::to_string(rule.min_confidence));
  }
  const double margin = rule.expansion * std::hypot(x1 - x0, y1 - y0) / 2.0;
  PolyPointSet grown;
  grown.points = {{x0 - margin, y0 - margin}, {x1 + margin, y1 + margin}};
  grown.provenance.score = conf_sum / static_cast<double>(n);
  grown.provenance.fragment = pose.fragment_index;
  return fit_box(grown);
}

std::vector<DetectionBox> fuse_to_omni(std::span<const ProviderHarvest> harvests,
                                       double nms_threshold, const PoseBoxRule& rule) {
  std::vector<DetectionBox> pooled;
  for (const ProviderHarvest& h : harvests) {
    for (const FragmentDetections& fd : h.detections) {
      auto it = std::find_if(h.maps.begin(), h.maps.end(), [&](const FragmentMap& m) {
        return m.fragment_index() == fd.fragment_index;
      });
      if (it == h.maps.end()) {
        throw Error(ErrorCode::invalid_config,
                    "detections reference unknown fragment " + std::to_string(fd.fragment_index));
      }
      for (const DetectionBox& b : fd.boxes) {
        pooled.push_back(fit_box(warp_polypoints(box_to_polypoints(b), *it)));
      }
      for (const PoseDetection& p : fd.poses) {
        PoseDetection warped = p;
        warped.keypoints.clear();
        for (const PoseKeypoint& k : p.keypoints) {
          if (k.confidence < rule.min_confidence) continue;
          const Point2 clamped{std::clamp(k.point.x, 0.0, it->width() - 1.0),
                               std::clamp(k.point.y, 0.0, it->height() - 1.0)};
          warped.keypoints.push_back({it->project(clamped), k.confidence});
        }
        if (warped.keypoints.empty()) continue;
        DetectionBox box = pose_to_box(warped, rule);
        box.fragment = fd.fragment_index;
        pooled.push_back(std::move(box));
      }
    }
  }
  return nms(std::move(pooled), nms_threshold);
}

// ---------------------------------------------------------------------------

CountFilter::CountFilter(std::size_t window_len, std::size_t tolerance)
    : window_len_(window_len), tolerance_(tolerance) {
  if (window_len == 0) throw Error(ErrorCode::invalid_config, "count filter window must be >= 1");
}

std::size_t CountFilter::rounded_mean() const noexcept {
  if (window_.empty()) return 0;
  // Counts are non-negative, so half-up is half-away-from-zero.
  return (2 * sum_ + window_.size()) / (2 * window_.size());
}

CountFilter::Decision CountFilter::offer(std::size_t count) {
  if (!window_.empty()) {
    const std::size_t mean = rounded_mean();
    const std::size_t dev = count > mean ? count - mean : mean - count;
    if (dev > tolerance_) return Decision::drop;
  }
  window_.push_back(count);
  sum_ += count;
  if (window_.size() > window_len_) {
    sum_ -= window_.front();
    window_.pop_front();
  }
  return Decision::accept;
}

ThresholdChoice select_threshold_f1(std::span<const MatchSample> samples,
                                    std::size_t total_ground_truth) {
  if (samples.empty()) throw Error(ErrorCode::no_samples, "threshold selection needs samples");
  std::vector<MatchSample> sorted(samples.begin(), samples.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MatchSample& a, const MatchSample& b) { return a.score > b.score; });
  // F1 = 2TP / (TP + FP + G); compared as exact fractions.
  std::size_t best_num = 0, best_den = 1, best_tp = 0, best_fp = 0;
  double best_threshold = sorted.front().score;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    (sorted[i].verdict == Verdict::tp ? tp : fp) += 1;
    if (i + 1 < sorted.size() && sorted[i + 1].score == sorted[i].score) continue;
    const std::size_t num = 2 * tp;
    const std::size_t den = tp + fp + total_ground_truth;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_threshold = sorted[i].score;
      best_tp = tp;
      best_fp = fp;
    }
  }
  ThresholdChoice c;
  c.threshold = best_threshold;
  c.f1 = best_den == 0 ? 0.0 : static_cast<double>(best_num) / static_cast<double>(best_den);
  c.precision = best_tp + best_fp == 0 ? 0.0 : static_cast<double>(best_tp) / (best_tp + best_fp);
  c.recall = total_ground_truth == 0 ? 0.0 : static_cast<double>(best_tp) / total_ground_truth;
  return c;
}

}  // namespace occupancy
