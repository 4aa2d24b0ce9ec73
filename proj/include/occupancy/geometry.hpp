#pragma once

// Ceiling-mounted omnidirectional camera model and the polar unwarp into k
// overlapping perspective-like fragments.
//
// Fragment geometry: column u in [0, W-1] maps linearly to the polar angle
// [start_angle, end_angle]; row v in [0, H-1] maps linearly to the radius
// [r_lo, r_hi], so the bottom row samples the outer edge of the band.
// Pixel centers sit on integer coordinates.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occupancy/image.hpp"

namespace occupancy {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct OmniCameraModel {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius_inner = 0.0;  ///< exclusion disc around the distorted centre
  double radius_outer = 0.0;  ///< usable image circle
  int image_width = 0;
  int image_height = 0;

  /// Throws invalid-config when the radii or center are inconsistent.
  void validate() const;

  /// Camera centred on a square frame with the circle filling it.
  static OmniCameraModel centered(int side, double radius_inner_fraction = 0.0);
};

struct UnwarpConfig {
  int k = 3;
  double overlap = 0.10;  ///< fraction of the base sector duplicated at either side
  double y_b = 1.0;       ///< fraction of the radial band kept, from radius_outer inward
  int fragment_width = 0;   ///< 0 = derived from the arc length at the band midline
  int fragment_height = 0;  ///< 0 = derived from the band thickness

  void validate() const;
};

/// One unwarped fragment: its polar sector plus the per-pixel source LUT.
class FragmentMap {
 public:
  struct Layout {
    int fragment_index = 0;
    int width = 0;
    int height = 0;
    int camera_width = 0;
    int camera_height = 0;
    double center_x = 0.0;
    double center_y = 0.0;
    double start_angle = 0.0;  ///< radians, column 0
    double end_angle = 0.0;    ///< radians, column width-1
    double r_lo = 0.0;         ///< row 0
    double r_hi = 0.0;         ///< row height-1
    friend bool operator==(const Layout&, const Layout&) = default;
  };

  FragmentMap() = default;
  FragmentMap(const Layout& layout, std::vector<std::int32_t> lut);

  /// Builds the LUT from the analytic projection.
  static FragmentMap from_layout(const Layout& layout);

  const Layout& layout() const noexcept { return layout_; }
  int fragment_index() const noexcept { return layout_.fragment_index; }
  int width() const noexcept { return layout_.width; }
  int height() const noexcept { return layout_.height; }
  double start_angle() const noexcept { return layout_.start_angle; }
  double end_angle() const noexcept { return layout_.end_angle; }
  double angular_span() const noexcept { return layout_.end_angle - layout_.start_angle; }
  double r_lo() const noexcept { return layout_.r_lo; }
  double r_hi() const noexcept { return layout_.r_hi; }

  /// Interleaved (x, y) source coordinates, 24.8 fixed point, row-major.
  std::span<const std::int32_t> forward_lut() const noexcept { return lut_; }

  /// Exact (double) projection of a fragment coordinate, no bounds check.
  Point2 project(Point2 fragment_point) const noexcept;

  /// Offset of `angle` past start_angle if it falls inside the sector.
  std::optional<double> angle_offset(double angle) const noexcept;

  friend bool operator==(const FragmentMap&, const FragmentMap&) = default;

 private:
  Layout layout_;
  std::vector<std::int32_t> lut_;
};

/// Sector and band parameters of every fragment without building LUTs.
std::vector<FragmentMap::Layout> fragment_layouts(const OmniCameraModel& camera,
                                                  const UnwarpConfig& cfg);

std::vector<FragmentMap> build_fragment_maps(const OmniCameraModel& camera,
                                             const UnwarpConfig& cfg);

/// Bilinear sampling of the omni frame through the map's LUT (OpenMP kernel).
Image unwarp_frame(const Image& frame, const FragmentMap& map);

/// Throws out-of-fragment unless the point lies within [0,W-1] x [0,H-1].
Point2 fragment_to_omni(Point2 fragment_point, const FragmentMap& map);

struct FragmentHit {
  int fragment_index;
  Point2 point;
};

/// Every fragment whose sector and band contain the omni point. Empty when the
/// point sits in an exclusion area.
std::vector<FragmentHit> omni_to_fragment(Point2 omni_point, std::span<const FragmentMap> maps);

// FragmentMap sidecar: "OMAP", u16 version, layout, LUT as little-endian
// int32 with 8 fractional bits.
inline constexpr std::uint16_t kFragmentMapVersion = 1;
void write_fragment_map(const FragmentMap& map, std::ostream& out);
FragmentMap read_fragment_map(std::istream& in);
void save_fragment_map(const FragmentMap& map, const std::filesystem::path& path);
FragmentMap load_fragment_map(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Detection boxes

struct DetectionBox {
  double x = 0.0;  ///< top-left
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double score = 0.0;
  std::string source;
  std::int64_t frame_index = 0;
  int fragment = -1;  ///< originating fragment, -1 when detected on the omni image

  double area() const noexcept { return w * h; }
  Point2 center() const noexcept { return {x + w / 2, y + h / 2}; }
  bool contains(Point2 p) const noexcept {
    return p.x >= x && p.x <= x + w && p.y >= y && p.y <= y + h;
  }
  friend bool operator==(const DetectionBox&, const DetectionBox&) = default;
};

/// Boundary points of a box minus its two top corners, plus the box they came from.
struct PolyPointSet {
  std::vector<Point2> points;
  DetectionBox provenance;
};

PolyPointSet box_to_polypoints(const DetectionBox& box);

/// Each point is clamped into the fragment and projected onto the omni image.
PolyPointSet warp_polypoints(const PolyPointSet& pps, const FragmentMap& map);

/// Tightest axis-aligned box around the points, floored at 1x1 px around
/// its centre; score/source/frame come from the provenance box.
DetectionBox fit_box(const PolyPointSet& points);

double iou(const DetectionBox& a, const DetectionBox& b) noexcept;

/// Strict ordering used for suppression: score descending, then lower
/// fragment index, then lexicographic (x, y).
bool nms_before(const DetectionBox& a, const DetectionBox& b) noexcept;

/// Greedy suppression of boxes with IoU above `threshold`; result in
/// nms_before order.
std::vector<DetectionBox> nms(std::vector<DetectionBox> boxes, double threshold);

}  // namespace occupancy
