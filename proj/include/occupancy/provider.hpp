#pragma once

// Detection-provider wire protocol (v1). The pipeline writes a fragment to a
// temporary PGM/PPM, sends one JSON request line on the provider's stdin
//   {"v":1,"frame":n,"fragment":i,"image":"<path>","kind":"boxes"|"pose"}
// and reads exactly one JSON reply line from its stdout:
//   boxes -> {"v":1,"boxes":[[x,y,w,h,score],...]}
//   pose  -> {"v":1,"poses":[[[x,y,c],...],...]}
// Coordinates are fragment pixels. Requests and replies are strictly ordered.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "occupancy/geometry.hpp"
#include "occupancy/image.hpp"

namespace occupancy {

inline constexpr int kProtocolVersion = 1;

enum class ProviderKind { boxes, pose };

std::string_view to_string(ProviderKind kind) noexcept;
ProviderKind provider_kind_from_string(std::string_view s);

struct PoseKeypoint {
  Point2 point;
  double confidence = 0.0;
  friend bool operator==(const PoseKeypoint&, const PoseKeypoint&) = default;
};

struct PoseDetection {
  std::vector<PoseKeypoint> keypoints;
  int fragment_index = -1;
  friend bool operator==(const PoseDetection&, const PoseDetection&) = default;
};

struct ProviderRequest {
  std::int64_t frame = 0;
  int fragment = 0;
  std::string image;
  ProviderKind kind = ProviderKind::boxes;
  friend bool operator==(const ProviderRequest&, const ProviderRequest&) = default;
};

struct ProviderReply {
  std::vector<DetectionBox> boxes;
  std::vector<PoseDetection> poses;
};

std::string encode_request(const ProviderRequest& request);
ProviderRequest decode_request(std::string_view line);

std::string encode_reply(const ProviderReply& reply, ProviderKind kind);

/// Throws protocol-parse-error on anything but a well-formed reply of `kind`.
/// Boxes and poses are tagged with the request's frame and fragment.
ProviderReply decode_reply(std::string_view line, const ProviderRequest& request,
                           std::string_view source);

/// Something that detects people on one fragment raster.
class DetectionProvider {
 public:
  virtual ~DetectionProvider() = default;
  virtual ProviderReply detect(const ProviderRequest& request, const Image& fragment) = 0;
};

/// Runs `/bin/sh -c command` as a long-lived child and talks the wire
/// protocol over its stdin/stdout. A timed-out or crashed child is killed and
/// transparently restarted on the next request.
class SubprocessProvider final : public DetectionProvider {
 public:
  SubprocessProvider(std::string name, std::string command, std::chrono::milliseconds timeout,
                     std::filesystem::path scratch_dir);
  ~SubprocessProvider() override;

  SubprocessProvider(const SubprocessProvider&) = delete;
  SubprocessProvider& operator=(const SubprocessProvider&) = delete;

  ProviderReply detect(const ProviderRequest& request, const Image& fragment) override;

  const std::string& name() const noexcept { return name_; }

 private:
  void start();
  void stop() noexcept;
  void send_line(const std::string& line);
  std::string receive_line(std::chrono::steady_clock::time_point deadline);

  std::string name_;
  std::string command_;
  std::chrono::milliseconds timeout_;
  std::filesystem::path scratch_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;  // bytes read past the last newline
  std::uint64_t serial_ = 0;
};

}  // namespace occupancy
