#include "occupancy/annotation.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "occupancy/error.hpp"

namespace occupancy {

using ordered_json = nlohmann::ordered_json;

AnnotationBox normalize_box(const DetectionBox& box, int image_width, int image_height) {
  const double x0 = std::clamp(box.x, 0.0, static_cast<double>(image_width));
  const double y0 = std::clamp(box.y, 0.0, static_cast<double>(image_height));
  const double x1 = std::clamp(box.x + box.w, 0.0, static_cast<double>(image_width));
  const double y1 = std::clamp(box.y + box.h, 0.0, static_cast<double>(image_height));
  return {(x0 + x1) / 2.0 / image_width, (y0 + y1) / 2.0 / image_height,
          (x1 - x0) / image_width, (y1 - y0) / image_height, box.score};
}

DetectionBox to_detection(const AnnotationBox& box, std::int64_t frame_index) {
  DetectionBox d;
  d.x = box.cx - box.w / 2.0;
  d.y = box.cy - box.h / 2.0;
  d.w = box.w;
  d.h = box.h;
  d.score = box.score;
  d.frame_index = frame_index;
  return d;
}

std::string to_json_line(const FrameAnnotation& r) {
  ordered_json j;
  j["v"] = kAnnotationVersion;
  j["frame"] = r.frame_index;
  j["ts"] = r.timestamp;
  j["accepted"] = r.accepted;
  j["boxes"] = ordered_json::array();
  for (const auto& b : r.boxes) j["boxes"].push_back({b.cx, b.cy, b.w, b.h, b.score});
  if (r.points) {
    j["points"] = ordered_json::array();
    for (const auto& p : *r.points) j["points"].push_back({p.x, p.y});
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j.dump();
}

FrameAnnotation parse_json_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("malformed annotation record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("v") || !j["v"].is_number_integer()) {
    throw Error(ErrorCode::io_error, "annotation record lacks a version field");
  }
  if (j["v"].get<int>() != kAnnotationVersion) {
    throw Error(ErrorCode::schema_version_mismatch,
                "annotation version " + j["v"].dump() + " is not supported");
  }
  try {
    FrameAnnotation r;
    r.frame_index = j.at("frame").get<std::int64_t>();
    r.timestamp = j.at("ts").get<double>();
    r.accepted = j.at("accepted").get<bool>();
    for (const auto& b : j.at("boxes")) {
      if (b.size() != 5) throw Error(ErrorCode::io_error, "annotation box needs 5 values");
      r.boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                         b[3].get<double>(), b[4].get<double>()});
    }
    if (j.contains("points")) {
      r.points.emplace();
      for (const auto& p : j["points"]) {
        if (p.size() != 2) throw Error(ErrorCode::io_error, "annotation point needs 2 values");
        r.points->push_back({p[0].get<double>(), p[1].get<double>()});
      }
    }
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, std::string("malformed annotation record: ") + e.what());
  }
}

void write_annotations(std::span<const FrameAnnotation> records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<FrameAnnotation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace occupancy
