#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "occupancy/error.hpp"
#include "occupancy/forge.hpp"
#include "occupancy/oracle.hpp"
#include "occupancy/synthetic.hpp"
#include "oracles.hpp"

using namespace occupancy;

namespace {

PoseDetection pose(std::vector<std::array<double, 3>> kps) {
  PoseDetection p;
  for (auto [x, y, c] : kps) p.keypoints.push_back({{x, y}, c});
  return p;
}

// Replies with a fixed set of boxes for every fragment.
class EchoProvider : public DetectionProvider {
 public:
  explicit EchoProvider(std::vector<DetectionBox> boxes, bool fail_on_one = false)
      : boxes_(std::move(boxes)), fail_on_one_(fail_on_one) {}
  ProviderReply detect(const ProviderRequest& req, const Image&) override {
    if (fail_on_one_ && req.fragment == 1) throw Error(ErrorCode::provider_timeout, "stub timeout");
    ProviderReply r;
    for (auto b : boxes_) {
      b.fragment = req.fragment;
      b.frame_index = req.frame;
      b.source = "echo";
      r.boxes.push_back(b);
    }
    return r;
  }

 private:
  std::vector<DetectionBox> boxes_;
  bool fail_on_one_;
};

class BlobProvider : public DetectionProvider {
 public:
  ProviderReply detect(const ProviderRequest& req, const Image& fragment) override {
    ProviderReply r;
    r.boxes = detect_blobs(fragment);
    for (auto& b : r.boxes) {
      b.fragment = req.fragment;
      b.frame_index = req.frame;
    }
    return r;
  }
};

std::vector<std::unique_ptr<DetectionProvider>> blob_workers(int n) {
  std::vector<std::unique_ptr<DetectionProvider>> w;
  for (int i = 0; i < n; ++i) w.push_back(std::make_unique<BlobProvider>());
  return w;
}

std::vector<DetectionBox> fused(const Image& frame, const std::vector<FragmentMap>& maps, int workers = 1) {
  const auto w = blob_workers(workers);
  const auto dets = harvest_fragments(frame, ProviderKind::boxes, maps, w);
  const ProviderHarvest h{dets, maps};
  return fuse_to_omni(std::span(&h, 1), 0.4);
}

}  // namespace

TEST(PoseToBox, Examples) {
  const DetectionBox one = pose_to_box(pose({{4, 7, 0.6}}));
  EXPECT_EQ(one.w, 1);
  EXPECT_EQ(one.h, 1);
  EXPECT_EQ(one.center(), (Point2{4, 7}));
  EXPECT_DOUBLE_EQ(one.score, 0.6);

  const DetectionBox two = pose_to_box(pose({{0, 0, 0.8}, {10, 10, 0.6}, {50, 50, 0.05}}));
  EXPECT_DOUBLE_EQ(two.score, 0.7);
  // 10x10 box grown by 10% of its diagonal in total
  const double grow = 0.1 * std::hypot(10.0, 10.0);
  EXPECT_NEAR(two.w, 10 + grow, 1e-12);
  EXPECT_NEAR(two.h, 10 + grow, 1e-12);
  EXPECT_NEAR(two.x, -grow / 2, 1e-12);
  EXPECT_TRUE(two.contains({0, 0}));
  EXPECT_TRUE(two.contains({10, 10}));

  try {
    pose_to_box(pose({{1, 1, 0.05}, {2, 2, 0.09}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_confident_keypoints);
  }
}

TEST(CountFilterTest, Rules) {
  CountFilter f(15, 0);
  EXPECT_EQ(f.offer(7), CountFilter::Decision::accept);  // empty window bootstraps
  CountFilter g(15, 0);
  for (int i = 0; i < 4; ++i) g.offer(3);
  EXPECT_EQ(g.rounded_mean(), 3u);
  EXPECT_EQ(g.offer(3), CountFilter::Decision::accept);
  const auto before = g.window();
  EXPECT_EQ(g.offer(5), CountFilter::Decision::drop);
  EXPECT_EQ(g.window(), before);

  CountFilter tol(4, 1);
  for (int c : {2, 3}) tol.offer(static_cast<std::size_t>(c));
  EXPECT_EQ(tol.rounded_mean(), 3u);  // 2.5 rounds away from zero
  EXPECT_EQ(tol.offer(4), CountFilter::Decision::accept);
  EXPECT_EQ(tol.offer(1), CountFilter::Decision::drop);
  for (int i = 0; i < 10; ++i) tol.offer(3);
  EXPECT_LE(tol.window().size(), 4u);
}

TEST(CountFilterTest, ConstantStreamAllAccepted) {
  CountFilter f;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(f.offer(2), CountFilter::Decision::accept);
  EXPECT_EQ(f.window().size(), 15u);
}

TEST(SelectThreshold, Examples) {
  std::vector<MatchSample> s;
  for (double v : {0.6, 0.7, 0.95}) s.push_back({v, Verdict::tp, 0});
  for (double v : {0.1, 0.3, 0.59}) s.push_back({v, Verdict::fp, 0});
  const auto c = select_threshold_f1(s, 3);
  EXPECT_EQ(c.threshold, 0.6);
  EXPECT_EQ(c.f1, 1.0);

  const auto fp_only = select_threshold_f1(std::vector<MatchSample>{{0.4, Verdict::fp, 0}, {0.8, Verdict::fp, 0}}, 2);
  EXPECT_EQ(fp_only.f1, 0.0);
  EXPECT_EQ(fp_only.threshold, 0.8);

  try {
    select_threshold_f1({}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_samples);
  }
}

TEST(SelectThreshold, MatchesExhaustiveScan) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<MatchSample> s;
    const int n = 1 + static_cast<int>(rng() % 40);
    std::size_t tp = 0;
    for (int i = 0; i < n; ++i) {
      const bool t = rng() % 2;
      tp += t;
      s.push_back({static_cast<double>(rng() % 12) / 11.0, t ? Verdict::tp : Verdict::fp, 0});
    }
    const std::size_t g = tp + rng() % 5;
    const auto got = select_threshold_f1(s, g);
    const auto want = oracle::best_f1(s, g);
    ASSERT_EQ(got.threshold, want.threshold);
  }
}

TEST(Harvest, EchoPassesThroughWithFragmentTags) {
  const auto cam = OmniCameraModel::centered(256, 0.1);
  const auto maps = build_fragment_maps(cam, UnwarpConfig{});
  DetectionBox b;
  b.x = 3;
  b.y = 4;
  b.w = 5;
  b.h = 6;
  b.score = 0.7;
  for (int workers : {1, 2, 3}) {
    std::vector<std::unique_ptr<DetectionProvider>> w;
    for (int i = 0; i < workers; ++i) w.push_back(std::make_unique<EchoProvider>(std::vector{b}));
    Image frame(256, 256, 1, 5);
    frame.frame_index = 12;
    const auto out = harvest_fragments(frame, ProviderKind::boxes, maps, w);
    ASSERT_EQ(out.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(out[i].fragment_index, i);
      ASSERT_EQ(out[i].boxes.size(), 1u);
      EXPECT_EQ(out[i].boxes[0].fragment, i);
      EXPECT_EQ(out[i].boxes[0].frame_index, 12);
      EXPECT_EQ(out[i].boxes[0].x, 3);
      EXPECT_EQ(out[i].boxes[0].score, 0.7);
    }
  }
}

TEST(Harvest, ProviderErrorSurfaces) {
  const auto maps = build_fragment_maps(OmniCameraModel::centered(128, 0.1), UnwarpConfig{});
  std::vector<std::unique_ptr<DetectionProvider>> w;
  w.push_back(std::make_unique<EchoProvider>(std::vector<DetectionBox>{}, true));
  w.push_back(std::make_unique<EchoProvider>(std::vector<DetectionBox>{}, true));
  try {
    harvest_fragments(Image(128, 128, 1), ProviderKind::boxes, maps, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::provider_timeout);
  }
}

TEST(Fuse, SyntheticPersonsCountedOnce) {
  for (std::size_t persons : {1u, 2u, 3u}) {
    SyntheticScene scene;
    scene.persons = persons;
    scene.seed = 40 + persons;
    const SyntheticRenderer r(scene);
    UnwarpConfig cfg;
    cfg.k = 3;
    cfg.overlap = 0.10;
    const auto maps = build_fragment_maps(r.camera(), cfg);
    int exact = 0;
    for (int f = 0; f < 40; ++f) {
      const auto boxes = fused(r.render(f).image, maps, f % 3 + 1);
      exact += boxes.size() == persons;
      for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) EXPECT_LE(iou(boxes[i], boxes[j]), 0.4);
      }
    }
    EXPECT_GE(exact, 38) << persons << " persons";
  }
}

TEST(Fuse, PersonInOverlapGivesOneBox) {
  SyntheticScene scene;
  scene.persons = 1;
  SyntheticRenderer r(scene);
  UnwarpConfig cfg;
  cfg.k = 3;
  cfg.overlap = 0.10;
  const auto maps = build_fragment_maps(r.camera(), cfg);
  // Find a frame where the head lies in an overlap wedge.
  for (int f = 0; f < 400; ++f) {
    const Point2 head = r.tracks()[0].head_at(f, r.camera());
    const auto hits = omni_to_fragment(head, maps);
    if (hits.size() != 2) continue;
    const auto frame = r.render(f);
    const auto w = blob_workers(1);
    const auto dets = harvest_fragments(frame.image, ProviderKind::boxes, maps, w);
    std::size_t raw = 0;
    for (const auto& d : dets) raw += d.boxes.size();
    EXPECT_GE(raw, 2u);
    const ProviderHarvest h{dets, maps};
    const auto out = fuse_to_omni(std::span(&h, 1), 0.4);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].contains(frame.heads[0]));
    return;
  }
  FAIL() << "no overlap frame found";
}

TEST(Fuse, PosesAndBoxesPool) {
  const auto cam = OmniCameraModel::centered(256, 0.1);
  const auto maps = build_fragment_maps(cam, UnwarpConfig{});
  FragmentDetections boxes_frag, pose_frag;
  boxes_frag.fragment_index = 0;
  pose_frag.fragment_index = 0;
  DetectionBox b;
  b.x = 40;
  b.y = 10;
  b.w = 20;
  b.h = 40;
  b.score = 0.9;
  b.fragment = 0;
  boxes_frag.boxes.push_back(b);
  PoseDetection p = pose({{50, 12, 0.8}, {42, 25, 0.8}, {58, 25, 0.8}, {45, 48, 0.8}, {55, 48, 0.8}});
  p.fragment_index = 0;
  pose_frag.poses.push_back(p);
  const std::vector<FragmentDetections> bd{boxes_frag}, pd{pose_frag};
  const std::vector<ProviderHarvest> h{{bd, maps}, {pd, maps}};
  const auto out = fuse_to_omni(h, 0.4);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].score, 0.9);
}
