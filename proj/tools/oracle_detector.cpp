// Blob-detector provider speaking the line protocol on stdin/stdout. The
// fault flags let tests exercise timeout, garbage and crash handling.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "occupancy/error.hpp"
#include "occupancy/image_io.hpp"
#include "occupancy/oracle.hpp"
#include "occupancy/provider.hpp"

using namespace occupancy;

namespace {

// Stick figure standing in the fragment: head at the top of the blob.
PoseDetection pose_from_box(const DetectionBox& b) {
  const double cx = b.x + b.w / 2.0;
  const double c = b.score;
  PoseDetection p;
  p.keypoints = {
      {{cx, b.y + 0.1 * b.h}, c},
      {{b.x + 0.1 * b.w, b.y + 0.3 * b.h}, c},
      {{b.x + 0.9 * b.w, b.y + 0.3 * b.h}, c},
      {{b.x + 0.2 * b.w, b.y + 0.95 * b.h}, c},
      {{b.x + 0.8 * b.w, b.y + 0.95 * b.h}, c},
      {{cx, b.y + 0.6 * b.h}, 0.05},  // occluded hip, below any sane cutoff
  };
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic-scene blob detector provider"};
  BlobDetectorOptions opts;
  long long hang_frame = -1;
  long long garbage_frame = -1;
  long long crash_frame = -1;
  app.add_option("--threshold", opts.threshold, "Foreground luma threshold");
  app.add_option("--min-area", opts.min_area, "Minimum blob area in pixels");
  app.add_option("--edge-penalty", opts.edge_penalty, "Score factor for blobs cut by a side edge");
  app.add_option("--hang-on-frame", hang_frame, "Never answer requests for this frame");
  app.add_option("--garbage-on-frame", garbage_frame, "Answer this frame with malformed JSON");
  app.add_option("--crash-on-frame", crash_frame, "Exit when asked about this frame");
  CLI11_PARSE(app, argc, argv);

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    ProviderReply reply;
    ProviderRequest req;
    try {
      req = decode_request(line);
      if (req.frame == crash_frame) return 1;
      if (req.frame == hang_frame) {
        std::this_thread::sleep_for(std::chrono::hours(1));
      }
      if (req.frame == garbage_frame) {
        std::cout << "{\"v\":1,\"boxes\":[[1,2,3]" << std::endl;
        continue;
      }
      const auto boxes = detect_blobs(read_image(req.image), opts);
      if (req.kind == ProviderKind::boxes) {
        reply.boxes = boxes;
      } else {
        for (const auto& b : boxes) reply.poses.push_back(pose_from_box(b));
      }
    } catch (const std::exception& e) {
      std::fprintf(stderr, "oracle-detector: %s\n", e.what());
      std::cout << "{\"v\":1,\"error\":\"bad request\"}" << std::endl;
      continue;
    }
    std::cout << encode_reply(reply, req.kind) << std::endl;
  }
  return 0;
}
