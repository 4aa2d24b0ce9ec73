#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "occupancy/eval.hpp"
#include "oracles.hpp"

using namespace occupancy;

namespace {

DetectionBox box(double x, double y, double w, double h, double score) {
  DetectionBox b;
  b.x = x;
  b.y = y;
  b.w = w;
  b.h = h;
  b.score = score;
  return b;
}

MatchSample sample(double score, bool tp) { return {score, tp ? Verdict::tp : Verdict::fp, 0}; }

std::size_t tps(const MatchResult& r) { return r.true_positives(); }
std::size_t fps(const MatchResult& r) { return r.samples.size() - r.true_positives(); }

}  // namespace

TEST(MatchPoints, Examples) {
  auto r = match_points(std::vector{box(0, 0, 10, 10, 0.9)}, std::vector<Point2>{{5, 5}});
  EXPECT_EQ(tps(r), 1u);
  EXPECT_EQ(fps(r), 0u);
  EXPECT_EQ(r.false_negatives, 0u);

  r = match_points(std::vector{box(0, 0, 10, 10, 0.9)}, std::vector<Point2>{{50, 50}});
  EXPECT_EQ(tps(r), 0u);
  EXPECT_EQ(fps(r), 1u);
  EXPECT_EQ(r.false_negatives, 1u);

  r = match_points(std::vector{box(0, 0, 10, 10, 0.6), box(1, 1, 10, 10, 0.9)},
                   std::vector<Point2>{{5, 5}});
  ASSERT_EQ(r.samples.size(), 2u);
  EXPECT_EQ(r.samples[0].score, 0.9);
  EXPECT_EQ(r.samples[0].verdict, Verdict::tp);
  EXPECT_EQ(r.samples[1].verdict, Verdict::fp);

  r = match_points(std::vector<DetectionBox>{}, std::vector<Point2>{{1, 1}, {2, 2}});
  EXPECT_EQ(r.false_negatives, 2u);
}

TEST(MatchPoints, LaterDetectionReroutesEarlierMatch) {
  // A contains p1 (nearest) and p2, B contains only p1. Plain greedy would give
  // A the nearest point and leave B empty; the maximum matching has two.
  const std::vector dets{box(0, 0, 20, 10, 0.9), box(4, 0, 8, 10, 0.5)};
  const std::vector<Point2> pts{{9, 5}, {18, 5}};
  const auto r = match_points(dets, pts);
  EXPECT_EQ(tps(r), 2u);
  EXPECT_EQ(r.samples[0].verdict, Verdict::tp);
  EXPECT_EQ(oracle::optimal_point_matching(dets, pts), 2u);
}

TEST(MatchPoints, EqualsOptimalOnSmallInstances) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0, 30);
  for (int trial = 0; trial < 3000; ++trial) {
    const int nd = trial % 9, np = (trial / 9) % 9;
    std::vector<DetectionBox> dets;
    std::vector<Point2> pts;
    for (int i = 0; i < nd; ++i) dets.push_back(oracle::random_box(rng, 30, 20));
    for (int i = 0; i < np; ++i) pts.push_back({std::round(pos(rng)), std::round(pos(rng))});
    const auto r = match_points(dets, pts);
    ASSERT_EQ(tps(r), oracle::optimal_point_matching(dets, pts));
    ASSERT_EQ(tps(r) + r.false_negatives, pts.size());
  }
}

TEST(MatchPoints, EqualScorePermutationInvariance) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<DetectionBox> dets;
    for (int i = 0; i < 6; ++i) dets.push_back(oracle::random_box(rng, 30, 20));
    std::vector<Point2> pts{{5, 5}, {12, 20}, {25, 9}, {18, 18}};
    auto sorted_samples = [](MatchResult r) {
      std::sort(r.samples.begin(), r.samples.end(), [](auto& a, auto& b) {
        return std::tie(a.score, a.verdict) < std::tie(b.score, b.verdict);
      });
      return r.samples;
    };
    const auto base = sorted_samples(match_points(dets, pts));
    std::shuffle(dets.begin(), dets.end(), rng);
    EXPECT_EQ(sorted_samples(match_points(dets, pts)), base);
    const std::vector<DetectionBox> gts{box(4, 4, 10, 10, 1), box(15, 15, 9, 9, 1)};
    EXPECT_EQ(sorted_samples(match_iou(dets, gts)),
              sorted_samples(match_iou(std::vector(dets.rbegin(), dets.rend()), gts)));
  }
}

TEST(MatchIou, Examples) {
  const auto gt = box(0, 0, 10, 10, 1);
  auto r = match_iou(std::vector{box(0, 0, 10, 10, 0.5)}, std::vector{gt});
  EXPECT_EQ(tps(r), 1u);

  // det 10x10 inside a 10x25.7 gt: IoU = 100/257 = 0.389.
  const auto tall = box(0, 0, 10, 25.7, 1);
  ASSERT_LT(iou(box(0, 0, 10, 10, 0.5), tall), 0.4);
  ASSERT_GT(iou(box(0, 0, 10, 10, 0.5), tall), 0.38);
  r = match_iou(std::vector{box(0, 0, 10, 10, 0.5)}, std::vector{tall});
  EXPECT_EQ(fps(r), 1u);
  EXPECT_EQ(r.false_negatives, 1u);
  // 100/250 = 0.4 exactly is a match.
  r = match_iou(std::vector{box(0, 0, 10, 10, 0.5)}, std::vector{box(0, 0, 10, 25, 1)});
  EXPECT_EQ(tps(r), 1u);

  r = match_iou(std::vector{box(0, 0, 10, 10, 0.5), box(1, 0, 10, 10, 0.7)}, std::vector{gt});
  EXPECT_EQ(tps(r), 1u);
  EXPECT_EQ(fps(r), 1u);
  EXPECT_EQ(r.samples[0].score, 0.7);
  EXPECT_EQ(r.samples[0].verdict, Verdict::tp);
}

TEST(PrCurve, SixSampleHandTable) {
  const std::vector s{sample(0.9, true),  sample(0.8, false), sample(0.7, true),
                      sample(0.6, false), sample(0.5, true),  sample(0.4, false)};
  const PRCurve c = pr_curve(s, 1);
  ASSERT_EQ(c.rows.size(), 6u);
  EXPECT_EQ(c.total_ground_truth, 4u);
  struct Row {
    double t, p, r, f1;
  };
  const Row expected[] = {{0.9, 1.0, 0.25, 2.0 / 5},  {0.8, 0.5, 0.25, 2.0 / 6},
                          {0.7, 2.0 / 3, 0.5, 4.0 / 7}, {0.6, 0.5, 0.5, 4.0 / 8},
                          {0.5, 0.6, 0.75, 6.0 / 9},  {0.4, 0.5, 0.75, 6.0 / 10}};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(c.rows[i].threshold, expected[i].t);
    EXPECT_DOUBLE_EQ(c.rows[i].precision, expected[i].p);
    EXPECT_DOUBLE_EQ(c.rows[i].recall, expected[i].r);
    EXPECT_DOUBLE_EQ(c.rows[i].f1, expected[i].f1);
  }
  // 0.25 * 1 + 0.25 * 2/3 + 0.25 * 0.6
  EXPECT_NEAR(average_precision(c), 0.25 + 0.25 * 2.0 / 3.0 + 0.15, 1e-12);
}

TEST(PrCurve, DegenerateCases) {
  const PRCurve empty = pr_curve({}, 3);
  EXPECT_TRUE(empty.rows.empty());
  EXPECT_EQ(average_precision(empty), 0.0);

  const std::vector all_tp{sample(0.9, true), sample(0.3, true), sample(0.3, true)};
  const PRCurve c = pr_curve(all_tp, 0);
  for (const auto& r : c.rows) EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(average_precision(c), 1.0);
  ASSERT_EQ(c.rows.size(), 2u);  // tied scores collapse

  EXPECT_EQ(average_precision(pr_curve(std::vector{sample(0.9, false), sample(0.1, false)}, 2)), 0.0);
}

TEST(PrCurve, MatchesBruteForceAndInvariants) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<MatchSample> s;
    const int n = 1 + static_cast<int>(rng() % 200);
    for (int i = 0; i < n; ++i) s.push_back(sample(static_cast<double>(rng() % 50) / 49.0, rng() % 3 != 0));
    const std::size_t fn = rng() % 20;
    const PRCurve c = pr_curve(s, fn);
    EXPECT_NEAR(average_precision(c), oracle::average_precision(s, fn), 1e-9);
    std::size_t total_tp = 0;
    for (const auto& x : s) total_tp += x.verdict == Verdict::tp;
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
      const auto& r = c.rows[i];
      std::size_t above = 0;
      for (const auto& x : s) above += x.score >= r.threshold;
      EXPECT_EQ(r.tp + r.fp, above);
      EXPECT_LE(r.tp, total_tp);
      EXPECT_GE(r.precision, 0.0);
      EXPECT_LE(r.recall, 1.0);
      if (i > 0) {
        EXPECT_LT(r.threshold, c.rows[i - 1].threshold);
        EXPECT_GE(r.recall, c.rows[i - 1].recall);
      }
    }
  }
}

TEST(CountReportTest, Examples) {
  std::vector<CountInput> frames;
  for (int f = 0; f < 10; ++f) {
    CountInput in;
    in.frame_index = f;
    in.truth = 2;
    in.detections.push_back(box(0, 0, 10, 10, 0.9));
    if (f != 4) in.detections.push_back(box(50, 50, 10, 10, 0.8));
    in.detections.push_back(box(1, 1, 10, 10, 0.7));  // duplicate, removed by NMS
    in.detections.push_back(box(90, 90, 10, 10, 0.1));  // below threshold
    frames.push_back(in);
  }
  const CountReport r = count_report(frames, 0.5);
  EXPECT_DOUBLE_EQ(r.exact_match_rate, 0.9);
  EXPECT_DOUBLE_EQ(r.mean_absolute_error, 0.1);
  EXPECT_EQ(r.max_error, 1u);

  std::vector<CountInput> empty_room(5);
  const CountReport e = count_report(empty_room, 0.5);
  for (const auto& f : e.frames) EXPECT_EQ(f.predicted, 0u);
  EXPECT_EQ(e.exact_match_rate, 1.0);
}
