#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>

#include "occupancy/annotation.hpp"
#include "occupancy/config.hpp"
#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"
#include "occupancy/provider.hpp"

using namespace occupancy;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("occupancy-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

FrameAnnotation random_record(std::mt19937_64& rng, std::int64_t frame) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FrameAnnotation r;
  r.frame_index = frame;
  r.timestamp = frame / 15.0 + u(rng) * 1e-3;
  r.accepted = rng() % 4 != 0;
  const int n = static_cast<int>(rng() % 6);
  for (int i = 0; i < n; ++i) r.boxes.push_back({u(rng), u(rng), u(rng), u(rng), u(rng)});
  if (rng() % 2) {
    r.points.emplace();
    for (int i = 0; i < n; ++i) r.points->push_back({u(rng), u(rng)});
  }
  if (rng() % 10 == 0) r.error = "provider-timeout: fragment 1";
  return r;
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io_error;
}

}  // namespace

TEST(Annotations, RoundTripBitExact) {
  const auto dir = temp_dir("annotations");
  std::mt19937_64 rng(1);
  std::vector<FrameAnnotation> records;
  for (int i = 0; i < 1000; ++i) records.push_back(random_record(rng, i));
  write_annotations(records, dir / "a.jsonl");
  const auto back = read_annotations(dir / "a.jsonl");
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) ASSERT_EQ(back[i], records[i]) << i;
}

TEST(Annotations, EmptyAndVersionMismatch) {
  const auto dir = temp_dir("annotations-edge");
  write_annotations({}, dir / "empty.jsonl");
  EXPECT_EQ(fs::file_size(dir / "empty.jsonl"), 0u);
  EXPECT_TRUE(read_annotations(dir / "empty.jsonl").empty());

  std::ofstream(dir / "v2.jsonl") << R"({"v":2,"frame":0,"ts":0,"accepted":true,"boxes":[]})" << '\n';
  EXPECT_EQ(code_of([&] { read_annotations(dir / "v2.jsonl"); }), ErrorCode::schema_version_mismatch);
  std::ofstream(dir / "bad.jsonl") << "{\"v\":1,\"frame\":\n";
  EXPECT_EQ(code_of([&] { read_annotations(dir / "bad.jsonl"); }), ErrorCode::io_error);
  EXPECT_EQ(code_of([&] { read_annotations(dir / "missing.jsonl"); }), ErrorCode::io_error);
}

TEST(Annotations, LineFormat) {
  FrameAnnotation r;
  r.frame_index = 3;
  r.timestamp = 0.2;
  r.boxes.push_back({0.5, 0.25, 0.1, 0.2, 0.9});
  EXPECT_EQ(to_json_line(r), R"({"v":1,"frame":3,"ts":0.2,"accepted":true,"boxes":[[0.5,0.25,0.1,0.2,0.9]]})");
}

TEST(Annotations, NormalizeClipsToImage) {
  DetectionBox b;
  b.x = -10;
  b.y = 50;
  b.w = 30;
  b.h = 20;
  b.score = 0.4;
  const AnnotationBox a = normalize_box(b, 100, 200);
  EXPECT_DOUBLE_EQ(a.cx, 0.1);
  EXPECT_DOUBLE_EQ(a.w, 0.2);
  EXPECT_DOUBLE_EQ(a.cy, 0.3);
  EXPECT_DOUBLE_EQ(a.h, 0.1);
  const DetectionBox d = to_detection(a, 7);
  EXPECT_DOUBLE_EQ(d.x, 0.0);
  EXPECT_DOUBLE_EQ(d.w, 0.2);
  EXPECT_EQ(d.frame_index, 7);
}

TEST(Protocol, RequestRoundTrip) {
  const ProviderRequest r{4, 2, "/tmp/x y.pgm", ProviderKind::pose};
  EXPECT_EQ(encode_request(r), R"({"v":1,"frame":4,"fragment":2,"image":"/tmp/x y.pgm","kind":"pose"})");
  EXPECT_EQ(decode_request(encode_request(r)), r);
}

TEST(Protocol, ReplyDecoding) {
  const ProviderRequest req{9, 1, "f", ProviderKind::boxes};
  const auto ok = decode_reply(R"({"v":1,"boxes":[[1,2,3,4,0.5]]})", req, "yolo");
  ASSERT_EQ(ok.boxes.size(), 1u);
  EXPECT_EQ(ok.boxes[0].fragment, 1);
  EXPECT_EQ(ok.boxes[0].frame_index, 9);
  EXPECT_EQ(ok.boxes[0].source, "yolo");
  EXPECT_EQ(ok.boxes[0].h, 4);

  for (const char* bad : {"", "nope", R"({"v":2,"boxes":[]})", R"({"v":1})", R"({"v":1,"boxes":[[1,2,3]]})",
                          R"({"v":1,"boxes":[[1,2,0,4,0.5]]})", R"({"v":1,"boxes":[[1,2,3,4,1.5]]})",
                          R"({"v":1,"poses":[]})"}) {
    EXPECT_EQ(code_of([&] { decode_reply(bad, req, "yolo"); }), ErrorCode::protocol_parse_error) << bad;
  }

  const ProviderRequest preq{9, 0, "f", ProviderKind::pose};
  const auto poses = decode_reply(R"({"v":1,"poses":[[[1,2,0.9],[3,4,0.2]]]})", preq, "pose");
  ASSERT_EQ(poses.poses.size(), 1u);
  EXPECT_EQ(poses.poses[0].keypoints[1].confidence, 0.2);
  EXPECT_EQ(code_of([&] { decode_reply(R"({"v":1,"poses":[[[1,2]]]})", preq, "pose"); }),
            ErrorCode::protocol_parse_error);
  ProviderReply reply;
  reply.poses = poses.poses;
  EXPECT_EQ(decode_reply(encode_reply(reply, ProviderKind::pose), preq, "pose").poses, poses.poses);
}

class Subprocess : public ::testing::Test {
 protected:
  static Image fragment() {
    Image img(60, 40, 1, 30);
    for (int y = 10; y < 30; ++y) {
      for (int x = 20; x < 28; ++x) img.at(x, y) = 220;
    }
    return img;
  }
  SubprocessProvider make(const std::string& flags, int timeout_ms = 3000) {
    return SubprocessProvider("oracle", std::string(OCCUPANCY_ORACLE) + " " + flags,
                              std::chrono::milliseconds(timeout_ms), temp_dir("scratch"));
  }
};

TEST_F(Subprocess, DetectsBlob) {
  auto p = make("");
  for (int frame = 0; frame < 3; ++frame) {
    const auto r = p.detect({frame, 1, "", ProviderKind::boxes}, fragment());
    ASSERT_EQ(r.boxes.size(), 1u);
    EXPECT_EQ(r.boxes[0].x, 20);
    EXPECT_EQ(r.boxes[0].w, 8);
    EXPECT_EQ(r.boxes[0].fragment, 1);
    EXPECT_EQ(r.boxes[0].frame_index, frame);
  }
  const auto pose = p.detect({3, 0, "", ProviderKind::pose}, fragment());
  ASSERT_EQ(pose.poses.size(), 1u);
}

TEST_F(Subprocess, TimeoutThenRecovers) {
  auto p = make("--hang-on-frame 1", 300);
  EXPECT_NO_THROW(p.detect({0, 0, "", ProviderKind::boxes}, fragment()));
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(code_of([&] { p.detect({1, 0, "", ProviderKind::boxes}, fragment()); }),
            ErrorCode::provider_timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(3));
  EXPECT_EQ(p.detect({2, 0, "", ProviderKind::boxes}, fragment()).boxes.size(), 1u);
}

TEST_F(Subprocess, GarbageAndCrash) {
  auto p = make("--garbage-on-frame 1 --crash-on-frame 3");
  EXPECT_EQ(code_of([&] { p.detect({1, 0, "", ProviderKind::boxes}, fragment()); }),
            ErrorCode::protocol_parse_error);
  EXPECT_EQ(p.detect({2, 0, "", ProviderKind::boxes}, fragment()).boxes.size(), 1u);
  EXPECT_THROW(p.detect({3, 0, "", ProviderKind::boxes}, fragment()), Error);
  EXPECT_EQ(p.detect({4, 0, "", ProviderKind::boxes}, fragment()).boxes.size(), 1u);
}

TEST_F(Subprocess, MissingCommand) {
  SubprocessProvider p("x", "/nonexistent/provider", std::chrono::milliseconds(500), temp_dir("scratch2"));
  EXPECT_THROW(p.detect({0, 0, "", ProviderKind::boxes}, fragment()), Error);
}

TEST(Config, LoadSaveRoundTrip) {
  const auto dir = temp_dir("config");
  std::ofstream(dir / "kernels.json") << R"({"kernels":[{"name":"kx","cells":[[0,2],[2,0]],"t":1}]})";
  std::ofstream(dir / "scene.json") << R"({
    "camera": {"width": 640, "height": 480, "center_x": 320, "center_y": 240,
               "radius_inner": 30, "radius_outer": 230},
    "kernel_file": "kernels.json",
    "providers": [
      {"name": "yolo", "kind": "boxes", "command": "det --fast", "k": 4, "timeout": 2.5,
       "workers": 2, "unwarp": {"overlap": 0.2, "y_b": 0.7}},
      {"name": "openpose", "kind": "pose", "command": "pose", "k": 2}
    ],
    "scale_plans": [{"net_res": 96, "scale_res": 48, "mode": "interlaced", "kernel": "kx", "t": 2}],
    "fps": 10, "nms_threshold": 0.3, "score_threshold": 0.25,
    "count_filter": {"window": 9, "tolerance": 1, "order": "filter-first"},
    "count": {"cadence": 5, "plan": 0},
    "map_cache": "maps"
  })";
  const SceneConfig c = load_scene_config(dir / "scene.json");
  EXPECT_EQ(c.camera.image_width, 640);
  EXPECT_EQ(c.providers.size(), 2u);
  EXPECT_EQ(c.provider("yolo").unwarp.k, 4);
  EXPECT_EQ(c.provider("yolo").unwarp.overlap, 0.2);
  EXPECT_EQ(c.provider("yolo").workers, 2);
  EXPECT_EQ(c.provider("openpose").kind, ProviderKind::pose);
  EXPECT_EQ(c.provider("").name, "yolo");
  EXPECT_EQ(c.scale_plans[0].kernel.cells[0][1], 2);
  EXPECT_EQ(c.scale_plans[0].kernel.t, 2);
  EXPECT_EQ(c.filter_window, 9u);
  EXPECT_EQ(c.filter_order, FilterOrder::filter_first);
  EXPECT_EQ(c.count_cadence, 5);
  EXPECT_EQ(c.map_cache, dir / "maps");

  save_scene_config(c, dir / "copy.json");
  const SceneConfig d = load_scene_config(dir / "copy.json");
  EXPECT_EQ(d.camera.radius_outer, c.camera.radius_outer);
  EXPECT_EQ(d.providers[1].command, "pose");
  EXPECT_EQ(d.scale_plans[0].kernel, c.scale_plans[0].kernel);
  EXPECT_EQ(d.fps, 10);
  EXPECT_EQ(d.filter_tolerance, 1u);
  EXPECT_EQ(code_of([&] { c.provider("nope"); }), ErrorCode::invalid_config);
}

TEST(Config, Rejections) {
  const auto dir = temp_dir("config-bad");
  const std::string cam = R"("camera": {"width": 100, "height": 100, "radius_outer": 50})";
  const std::vector<std::string> bad{
      "{",
      "{}",
      "{" + cam + R"(, "fps": 0})",
      "{" + cam + R"(, "scale_plans": [{"net_res": 96, "scale_res": 64, "mode": "interlaced", "kernel": "k2"}]})",
      "{" + cam + R"(, "scale_plans": [{"net_res": 96, "scale_res": 32, "mode": "interlaced", "kernel": "k7"}]})",
      "{" + cam + R"(, "providers": [{"name": "a", "kind": "segmenter", "command": "x"}]})",
      "{" + cam + R"(, "providers": [{"name": "a", "kind": "boxes", "command": "x", "k": 0}]})",
  };
  for (std::size_t i = 0; i < bad.size(); ++i) {
    std::ofstream(dir / "c.json", std::ios::trunc) << bad[i];
    EXPECT_EQ(code_of([&] { load_scene_config(dir / "c.json"); }), ErrorCode::invalid_config) << bad[i];
  }
  EXPECT_EQ(code_of([&] { load_scene_config(dir / "none.json"); }), ErrorCode::io_error);
}

TEST(Dataset, DirectoryManifestAndMissingFrame) {
  const auto dir = temp_dir("dataset");
  for (int i : {2, 0, 1}) write_pnm(Image(8, 8, 1, static_cast<std::uint8_t>(i)), dir / ("f" + std::to_string(i) + ".pgm"));
  std::ofstream(dir / "notes.txt") << "ignored";
  DatasetManifest m = load_dataset(dir);
  ASSERT_EQ(m.frames.size(), 3u);
  EXPECT_EQ(m.frames[0].filename(), "f0.pgm");
  const Image f1 = load_frame(m, 1, 15.0);
  EXPECT_EQ(f1.at(0, 0), 1);
  EXPECT_EQ(f1.frame_index, 1);
  EXPECT_DOUBLE_EQ(f1.timestamp, 1.0 / 15.0);

  m.split = "test-a";
  save_dataset_manifest(m, dir / "manifest.json");
  const DatasetManifest again = load_dataset(dir);
  EXPECT_EQ(again.split, "test-a");
  EXPECT_EQ(again.frames, m.frames);

  fs::remove(dir / "f1.pgm");
  try {
    load_dataset(dir / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
    EXPECT_NE(std::string(e.what()).find("f1.pgm"), std::string::npos);
  }
}

TEST(MapCache, ReusesMatchingSidecars) {
  const auto dir = temp_dir("mapcache");
  const auto cam = OmniCameraModel::centered(128, 0.1);
  UnwarpConfig cfg;
  const auto first = maps_for(cam, cfg, dir, "t");
  ASSERT_TRUE(fs::exists(dir / "t_2.omap"));
  const auto stamp = fs::last_write_time(dir / "t_0.omap");
  EXPECT_EQ(maps_for(cam, cfg, dir, "t"), first);
  EXPECT_EQ(fs::last_write_time(dir / "t_0.omap"), stamp);
  cfg.overlap = 0.2;  // layout changed: rebuilt
  const auto second = maps_for(cam, cfg, dir, "t");
  EXPECT_EQ(second, build_fragment_maps(cam, cfg));
}
