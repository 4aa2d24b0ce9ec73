#include "occupancy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"

namespace occupancy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kEps = 1e-9;

}  // namespace

void OmniCameraModel::validate() const {
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::invalid_config, "camera image dimensions must be positive");
  }
  if (!(radius_inner >= 0.0 && radius_inner < radius_outer)) {
    throw Error(ErrorCode::invalid_config, "camera needs 0 <= radius_inner < radius_outer");
  }
  if (radius_outer > std::min(image_width, image_height) / 2.0 + 1.0) {
    throw Error(ErrorCode::invalid_config, "radius_outer exceeds the image circle");
  }
  if (center_x < 0.0 || center_y < 0.0 || center_x > image_width - 1 ||
      center_y > image_height - 1) {
    throw Error(ErrorCode::invalid_config, "camera center lies outside the image");
  }
}

OmniCameraModel OmniCameraModel::centered(int side, double radius_inner_fraction) {
  OmniCameraModel cam;
  cam.image_width = side;
  cam.image_height = side;
  cam.center_x = (side - 1) / 2.0;
  cam.center_y = (side - 1) / 2.0;
  cam.radius_outer = side / 2.0;
  cam.radius_inner = radius_inner_fraction * cam.radius_outer;
  return cam;
}

void UnwarpConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::invalid_config, "k must be at least 1");
  if (!(overlap >= 0.0 && overlap < 0.5)) {
    throw Error(ErrorCode::invalid_config, "overlap must lie in [0, 0.5)");
  }
  if (!(y_b >= 0.0 && y_b <= 1.0)) throw Error(ErrorCode::invalid_config, "y_b must lie in [0, 1]");
  if (fragment_width < 0 || fragment_height < 0 || fragment_width == 1 || fragment_height == 1) {
    throw Error(ErrorCode::invalid_config, "fragment dimensions must be 0 (auto) or >= 2");
  }
}

FragmentMap::FragmentMap(const Layout& layout, std::vector<std::int32_t> lut)
    : layout_(layout), lut_(std::move(lut)) {
  if (layout_.width < 2 || layout_.height < 2 ||
      lut_.size() != 2 * static_cast<std::size_t>(layout_.width) * layout_.height) {
    throw Error(ErrorCode::dimension_mismatch, "fragment LUT does not match its layout");
  }
}

Point2 FragmentMap::project(Point2 p) const noexcept {
  const double angle = layout_.start_angle + p.x / (layout_.width - 1) * angular_span();
  const double radius = layout_.r_lo + p.y / (layout_.height - 1) * (layout_.r_hi - layout_.r_lo);
  return {layout_.center_x + radius * std::cos(angle), layout_.center_y + radius * std::sin(angle)};
}

std::optional<double> FragmentMap::angle_offset(double angle) const noexcept {
  double d = std::fmod(angle - layout_.start_angle, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  if (d <= angular_span() + kEps) return d;
  return std::nullopt;
}

FragmentMap FragmentMap::from_layout(const Layout& layout) {
  FragmentMap map(layout,
                  std::vector<std::int32_t>(2 * static_cast<std::size_t>(layout.width) *
                                            layout.height));
  std::int32_t* out = map.lut_.data();
  for (int v = 0; v < layout.height; ++v) {
    for (int u = 0; u < layout.width; ++u) {
      const Point2 p = map.project({static_cast<double>(u), static_cast<double>(v)});
      *out++ = kernels::to_fixed(p.x);
      *out++ = kernels::to_fixed(p.y);
    }
  }
  return map;
}

std::vector<FragmentMap::Layout> fragment_layouts(const OmniCameraModel& camera,
                                                  const UnwarpConfig& cfg) {
  camera.validate();
  cfg.validate();
  const double base = kTwoPi / cfg.k;
  const double r_hi = camera.radius_outer;
  const double r_lo = camera.radius_outer - cfg.y_b * (camera.radius_outer - camera.radius_inner);
  const double span = base * (1.0 + 2.0 * cfg.overlap);

  const int width = cfg.fragment_width > 0
                        ? cfg.fragment_width
                        : std::max(2, static_cast<int>(std::lround(span * (r_lo + r_hi) / 2.0)));
  const int height = cfg.fragment_height > 0
                         ? cfg.fragment_height
                         : std::max(2, static_cast<int>(std::lround(r_hi - r_lo)) + 1);

  std::vector<FragmentMap::Layout> layouts;
  layouts.reserve(cfg.k);
  for (int i = 0; i < cfg.k; ++i) {
    FragmentMap::Layout l;
    l.fragment_index = i;
    l.width = width;
    l.height = height;
    l.camera_width = camera.image_width;
    l.camera_height = camera.image_height;
    l.center_x = camera.center_x;
    l.center_y = camera.center_y;
    l.start_angle = i * base - cfg.overlap * base;
    l.end_angle = l.start_angle + span;
    l.r_lo = r_lo;
    l.r_hi = r_hi;
    layouts.push_back(l);
  }
  return layouts;
}

std::vector<FragmentMap> build_fragment_maps(const OmniCameraModel& camera,
                                             const UnwarpConfig& cfg) {
  std::vector<FragmentMap> maps;
  for (const auto& layout : fragment_layouts(camera, cfg)) {
    maps.push_back(FragmentMap::from_layout(layout));
  }
  return maps;
}

Image unwarp_frame(const Image& frame, const FragmentMap& map) {
  if (frame.width() != map.layout().camera_width || frame.height() != map.layout().camera_height) {
    throw Error(ErrorCode::dimension_mismatch,
                "frame is " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                    " but the map was built for " + std::to_string(map.layout().camera_width) +
                    "x" + std::to_string(map.layout().camera_height));
  }
  Image out = kernels::omp::remap_bilinear(frame, map.forward_lut(), map.width(), map.height());
  out.frame_index = frame.frame_index;
  out.timestamp = frame.timestamp;
  return out;
}

Point2 fragment_to_omni(Point2 p, const FragmentMap& map) {
  if (!(p.x >= -kEps && p.y >= -kEps && p.x <= map.width() - 1 + kEps &&
        p.y <= map.height() - 1 + kEps)) {
    throw Error(ErrorCode::out_of_fragment, "point lies outside fragment " +
                                                std::to_string(map.fragment_index()));
  }
  return map.project(p);
}

std::vector<FragmentHit> omni_to_fragment(Point2 q, std::span<const FragmentMap> maps) {
  std::vector<FragmentHit> hits;
  for (const FragmentMap& map : maps) {
    const auto& l = map.layout();
    const double dx = q.x - l.center_x;
    const double dy = q.y - l.center_y;
    const double r = std::hypot(dx, dy);
    if (r < l.r_lo - kEps || r > l.r_hi + kEps) continue;
    const auto offset = map.angle_offset(std::atan2(dy, dx));
    if (!offset) continue;
    const double band = l.r_hi - l.r_lo;
    const double u = std::min(*offset / map.angular_span(), 1.0) * (l.width - 1);
    const double v = band > 0.0 ? std::clamp((r - l.r_lo) / band, 0.0, 1.0) * (l.height - 1) : 0.0;
    hits.push_back({l.fragment_index, {u, v}});
  }
  return hits;
}

// ---------------------------------------------------------------------------

PolyPointSet box_to_polypoints(const DetectionBox& b) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) {
    throw Error(ErrorCode::degenerate_box, "box needs positive width and height");
  }
  const double x1 = b.x + b.w;
  const double y1 = b.y + b.h;
  const double xa = b.x + b.w / 3.0;
  const double xb = b.x + 2.0 * b.w / 3.0;
  const double ya = b.y + b.h / 3.0;
  const double yb = b.y + 2.0 * b.h / 3.0;
  PolyPointSet pps;
  pps.provenance = b;
  // Clockwise from the top side; the top corners are left out.
  pps.points = {{xa, b.y}, {xb, b.y}, {x1, ya},  {x1, yb},  {x1, y1},
                {xb, y1},  {xa, y1},  {b.x, y1}, {b.x, yb}, {b.x, ya}};
  return pps;
}

PolyPointSet warp_polypoints(const PolyPointSet& pps, const FragmentMap& map) {
  PolyPointSet out;
  out.provenance = pps.provenance;
  out.points.reserve(pps.points.size());
  const double xmax = map.width() - 1;
  const double ymax = map.height() - 1;
  for (const Point2& p : pps.points) {
    out.points.push_back(map.project({std::clamp(p.x, 0.0, xmax), std::clamp(p.y, 0.0, ymax)}));
  }
  return out;
}

DetectionBox fit_box(const PolyPointSet& pps) {
  if (pps.points.empty()) throw Error(ErrorCode::empty_set, "cannot fit a box to no points");
  double x0 = pps.points.front().x, x1 = x0;
  double y0 = pps.points.front().y, y1 = y0;
  for (const Point2& p : pps.points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  DetectionBox box = pps.provenance;
  box.x = x0;
  box.y = y0;
  box.w = x1 - x0;
  box.h = y1 - y0;
  if (box.w < 1.0) {
    box.x = (x0 + x1) / 2.0 - 0.5;
    box.w = 1.0;
  }
  if (box.h < 1.0) {
    box.y = (y0 + y1) / 2.0 - 0.5;
    box.h = 1.0;
  }
  return box;
}

double iou(const DetectionBox& a, const DetectionBox& b) noexcept {
  const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool nms_before(const DetectionBox& a, const DetectionBox& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.fragment != b.fragment) return a.fragment < b.fragment;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

std::vector<DetectionBox> nms(std::vector<DetectionBox> boxes, double threshold) {
  std::stable_sort(boxes.begin(), boxes.end(), nms_before);
  std::vector<char> suppressed(boxes.size(), 0);
  std::vector<DetectionBox> kept;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (suppressed[i]) continue;
    kept.push_back(boxes[i]);
    for (std::size_t j = i + 1; j < boxes.size(); ++j) {
      if (!suppressed[j] && iou(boxes[i], boxes[j]) > threshold) suppressed[j] = 1;
    }
  }
  return kept;
}

}  // namespace occupancy
