#pragma once

// Synthetic ceiling-camera scenes used as a test oracle: people are drawn as
// radially oriented capsules defined in the unwarped (angle, radius) frame,
// so every fragment shows them upright with the head toward the top row.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "occupancy/annotation.hpp"
#include "occupancy/geometry.hpp"
#include "occupancy/image.hpp"

namespace occupancy {

enum class Movement { limited, moderate, high };

Movement movement_from_string(std::string_view s);
std::string_view to_string(Movement m) noexcept;

/// Person speed in low-resolution pixels per frame at `reference_scale_res`.
double movement_speed(Movement m) noexcept;

struct SyntheticScene {
  int image_size = 512;
  double radius_inner_fraction = 0.15;
  std::size_t persons = 3;
  Movement movement = Movement::moderate;
  double noise = 4.0;  ///< uniform noise amplitude, grey levels
  std::uint64_t seed = 1;
  double fps = 15.0;
  int reference_scale_res = 32;
};

struct PersonTrack {
  double angle0 = 0.0;         ///< radians at frame 0
  double angular_speed = 0.0;  ///< radians per frame
  double radius = 0.0;         ///< mid radius of the body axis
  double radial_amplitude = 0.0;
  double radial_phase = 0.0;
  double length = 0.0;      ///< radial extent of the body axis (head to feet)
  double half_width = 0.0;  ///< capsule radius in pixels

  double angle_at(std::int64_t frame) const noexcept;
  double radius_at(std::int64_t frame) const noexcept;
  /// Head point: centre of the inner end cap.
  Point2 head_at(std::int64_t frame, const OmniCameraModel& camera) const noexcept;
};

struct SyntheticFrame {
  Image image;
  std::vector<DetectionBox> boxes;  ///< pixel-tight ground-truth boxes
  std::vector<Point2> heads;        ///< pixel head points
};

class SyntheticRenderer {
 public:
  explicit SyntheticRenderer(const SyntheticScene& scene);

  const OmniCameraModel& camera() const noexcept { return camera_; }
  const std::vector<PersonTrack>& tracks() const noexcept { return tracks_; }
  const SyntheticScene& scene() const noexcept { return scene_; }

  /// Deterministic in (scene.seed, frame).
  SyntheticFrame render(std::int64_t frame) const;

  /// Normalized ground-truth record with boxes and head points.
  FrameAnnotation truth(const SyntheticFrame& frame) const;

 private:
  SyntheticScene scene_;
  OmniCameraModel camera_;
  std::vector<PersonTrack> tracks_;
};

/// Writes frame_NNNNNN.pgm, ground_truth.jsonl and manifest.json into dir.
void write_synthetic_dataset(const SyntheticRenderer& renderer, std::size_t frames,
                             const std::filesystem::path& dir);

}  // namespace occupancy
