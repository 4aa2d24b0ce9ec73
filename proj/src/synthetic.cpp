#include "occupancy/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "occupancy/config.hpp"
#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"

namespace occupancy {
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint8_t kOutside = 0;
constexpr int kFloor = 50;
constexpr int kFurniture = 90;
constexpr int kPerson = 210;

double wrap_pi(double a) {
  a = std::fmod(a + std::numbers::pi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - std::numbers::pi;
}

}  // namespace

Movement movement_from_string(std::string_view s) {
  if (s == "limited") return Movement::limited;
  if (s == "moderate") return Movement::moderate;
  if (s == "high") return Movement::high;
  throw Error(ErrorCode::invalid_config, "movement must be limited, moderate or high");
}

std::string_view to_string(Movement m) noexcept {
  switch (m) {
    case Movement::limited: return "limited";
    case Movement::moderate: return "moderate";
    case Movement::high: return "high";
  }
  return "moderate";
}

double movement_speed(Movement m) noexcept {
  switch (m) {
    case Movement::limited: return 0.1;
    case Movement::moderate: return 0.5;
    case Movement::high: return 2.5;
  }
  return 0.5;
}

double PersonTrack::angle_at(std::int64_t frame) const noexcept {
  return angle0 + angular_speed * static_cast<double>(frame);
}

double PersonTrack::radius_at(std::int64_t frame) const noexcept {
  return radius + radial_amplitude * std::sin(radial_phase + 0.05 * static_cast<double>(frame));
}

Point2 PersonTrack::head_at(std::int64_t frame, const OmniCameraModel& cam) const noexcept {
  const double a = angle_at(frame);
  const double r = radius_at(frame) - length / 2.0;
  return {cam.center_x + r * std::cos(a), cam.center_y + r * std::sin(a)};
}

SyntheticRenderer::SyntheticRenderer(const SyntheticScene& scene)
    : scene_(scene), camera_(OmniCameraModel::centered(scene.image_size, scene.radius_inner_fraction)) {
  if (scene.image_size < 64) throw Error(ErrorCode::invalid_config, "synthetic image_size must be >= 64");
  std::mt19937_64 rng(scene.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double band = camera_.radius_outer - camera_.radius_inner;
  const double length = 0.28 * band;
  const double half_width = std::max(3.0, 0.035 * scene.image_size / 2.0);
  const double margin = half_width + 4.0;
  const double r_min = camera_.radius_inner + length / 2.0 + margin;
  const double r_max = camera_.radius_outer - length / 2.0 - margin;
  const double amplitude = scene.movement == Movement::limited ? 2.0 : 0.15 * (r_max - r_min);

  // Every person shares one angular speed so sector spacing never changes;
  // the speed is set so the slowest (innermost possible) person still moves
  // at the nominal low-resolution speed.
  const double lowres_px = static_cast<double>(scene.image_size) / scene.reference_scale_res;
  const double angular_speed = movement_speed(scene.movement) * lowres_px / (r_min);

  const double sector = scene.persons > 0 ? kTwoPi / static_cast<double>(scene.persons) : kTwoPi;
  const double base = unit(rng) * kTwoPi;
  for (std::size_t i = 0; i < scene.persons; ++i) {
    PersonTrack t;
    t.angle0 = base + sector * static_cast<double>(i) + (unit(rng) - 0.5) * 0.3 * sector;
    t.angular_speed = angular_speed;
    t.radius = r_min + amplitude + unit(rng) * std::max(0.0, r_max - r_min - 2.0 * amplitude);
    t.radial_amplitude = amplitude;
    t.radial_phase = unit(rng) * kTwoPi;
    t.length = length;
    t.half_width = half_width;
    tracks_.push_back(t);
  }
}

SyntheticFrame SyntheticRenderer::render(std::int64_t frame) const {
  const int n = scene_.image_size;
  SyntheticFrame out;
  out.image = Image(n, n, 1, kOutside);
  out.image.frame_index = frame;
  out.image.timestamp = static_cast<double>(frame) / scene_.fps;

  std::mt19937_64 rng(scene_.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(frame));
  std::uniform_int_distribution<int> noise(-static_cast<int>(scene_.noise),
                                           static_cast<int>(scene_.noise));

  struct Pose {
    double angle, r_head, r_foot, mid;
  };
  std::vector<Pose> poses;
  for (const auto& t : tracks_) {
    const double r = t.radius_at(frame);
    poses.push_back({t.angle_at(frame), r - t.length / 2.0, r + t.length / 2.0, r});
  }
  std::vector<int> x0(tracks_.size(), n), y0(tracks_.size(), n), x1(tracks_.size(), -1),
      y1(tracks_.size(), -1);

  const double cx = camera_.center_x;
  const double cy = camera_.center_y;

  // Conservative pixel bounds of each capsule's polar rectangle; pixels
  // outside all of them skip the capsule tests.
  struct Bounds {
    double x0, y0, x1, y1;
  };
  std::vector<Bounds> bounds;
  for (std::size_t p = 0; p < poses.size(); ++p) {
    const Pose& ps = poses[p];
    const double hw = tracks_[p].half_width;
    const double span = hw / ps.mid;
    Bounds b{1e300, 1e300, -1e300, -1e300};
    constexpr int kSteps = 32;
    for (int i = 0; i <= kSteps; ++i) {
      const double a = ps.angle - span + 2.0 * span * i / kSteps;
      for (double r : {ps.r_head - hw, ps.r_foot + hw}) {
        const double x = cx + r * std::cos(a);
        const double y = cy + r * std::sin(a);
        b = {std::min(b.x0, x), std::min(b.y0, y), std::max(b.x1, x), std::max(b.y1, y)};
      }
    }
    bounds.push_back({b.x0 - 2.0, b.y0 - 2.0, b.x1 + 2.0, b.y1 + 2.0});
  }
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double r = std::sqrt(dx * dx + dy * dy);
      if (r > camera_.radius_outer) continue;
      int v = kFloor;
      // a static desk in the lower right quadrant
      if (dx > 0.25 * n && dx < 0.38 * n && dy > 0.05 * n && dy < 0.2 * n) v = kFurniture;
      double theta = 0.0;
      bool have_theta = false;
      for (std::size_t p = 0; p < poses.size(); ++p) {
        const Bounds& bb = bounds[p];
        if (x < bb.x0 || x > bb.x1 || y < bb.y0 || y > bb.y1) continue;
        if (!have_theta) {
          theta = std::atan2(dy, dx);
          have_theta = true;
        }
        const Pose& ps = poses[p];
        // capsule test in (arc length at mid radius, radius) coordinates
        const double a = wrap_pi(theta - ps.angle) * ps.mid;
        const double b = std::clamp(r, ps.r_head, ps.r_foot);
        const double hw = tracks_[p].half_width;
        if (a * a + (r - b) * (r - b) <= hw * hw) {
          v = kPerson;
          x0[p] = std::min(x0[p], x);
          x1[p] = std::max(x1[p], x);
          y0[p] = std::min(y0[p], y);
          y1[p] = std::max(y1[p], y);
        }
      }
      if (scene_.noise > 0) v += noise(rng);
      out.image.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
    }
  }

  for (std::size_t p = 0; p < tracks_.size(); ++p) {
    if (x1[p] < 0) continue;
    DetectionBox b;
    b.x = x0[p];
    b.y = y0[p];
    b.w = x1[p] - x0[p] + 1;
    b.h = y1[p] - y0[p] + 1;
    b.score = 1.0;
    b.source = "ground-truth";
    b.frame_index = frame;
    out.boxes.push_back(b);
    out.heads.push_back(tracks_[p].head_at(frame, camera_));
  }
  return out;
}

FrameAnnotation SyntheticRenderer::truth(const SyntheticFrame& frame) const {
  FrameAnnotation r;
  r.frame_index = frame.image.frame_index;
  r.timestamp = frame.image.timestamp;
  r.accepted = true;
  const double n = scene_.image_size;
  for (const auto& b : frame.boxes) r.boxes.push_back(normalize_box(b, scene_.image_size, scene_.image_size));
  r.points.emplace();
  for (const auto& h : frame.heads) r.points->push_back({h.x / n, h.y / n});
  return r;
}

void write_synthetic_dataset(const SyntheticRenderer& renderer, std::size_t frames,
                             const fs::path& dir) {
  fs::create_directories(dir);
  DatasetManifest manifest;
  manifest.root = fs::absolute(dir);
  manifest.split = "synthetic";
  std::vector<FrameAnnotation> truth(frames);
  manifest.frames.resize(frames);
  // Frames are independent and deterministic, so render them in parallel.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::size_t i = 0; i < frames; ++i) {
    const SyntheticFrame f = renderer.render(static_cast<std::int64_t>(i));
    char name[32];
    std::snprintf(name, sizeof name, "frame_%06zu.pgm", i);
    write_pnm(f.image, manifest.root / name);
    manifest.frames[i] = manifest.root / name;
    truth[i] = renderer.truth(f);
  }
  manifest.ground_truth = manifest.root / "ground_truth.jsonl";
  write_annotations(truth, *manifest.ground_truth);
  save_dataset_manifest(manifest, manifest.root / "manifest.json");
}

}  // namespace occupancy
