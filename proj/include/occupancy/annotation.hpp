#pragma once

// Line-delimited JSON annotation records, one object per frame:
//   {"v":1,"frame":n,"ts":s,"accepted":b,"boxes":[[cx,cy,w,h,score],...]}
// Box coordinates are centre-format and normalized to [0,1] of the omni
// image. Ground-truth files may add "points":[[x,y],...] (normalized head
// points); frames whose providers failed carry "error":"<reason>".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "occupancy/geometry.hpp"

namespace occupancy {

inline constexpr int kAnnotationVersion = 1;

struct AnnotationBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double score = 0.0;
  friend bool operator==(const AnnotationBox&, const AnnotationBox&) = default;
};

struct FrameAnnotation {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;
  bool accepted = true;
  std::vector<AnnotationBox> boxes;
  std::optional<std::vector<Point2>> points;
  std::string error;  ///< empty unless the frame was skipped

  bool skipped() const noexcept { return !error.empty(); }
  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

/// Pixel box -> normalized centre format, clipped to the image.
AnnotationBox normalize_box(const DetectionBox& box, int image_width, int image_height);

/// Normalized record box -> DetectionBox in normalized (unit-square) coordinates.
DetectionBox to_detection(const AnnotationBox& box, std::int64_t frame_index = 0);

std::string to_json_line(const FrameAnnotation& record);
FrameAnnotation parse_json_line(std::string_view line);

void write_annotations(std::span<const FrameAnnotation> records,
                       const std::filesystem::path& path);
std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path);

}  // namespace occupancy
