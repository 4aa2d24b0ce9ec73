#pragma once

// Detector for synthetic scenes: bright connected blobs are people. Blobs cut
// by the left or right fragment edge are only partly visible and get a low
// score so they rank below complete views of the same person.

#include <vector>

#include "occupancy/geometry.hpp"
#include "occupancy/image.hpp"

namespace occupancy {

struct BlobDetectorOptions {
  int threshold = 150;   ///< luma above this is foreground
  int min_area = 20;     ///< pixels
  double edge_penalty = 0.3;
};

std::vector<DetectionBox> detect_blobs(const Image& fragment, const BlobDetectorOptions& opts = {});

}  // namespace occupancy
