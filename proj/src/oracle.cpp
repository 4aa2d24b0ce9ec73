#include "occupancy/oracle.hpp"

#include <algorithm>
#include <vector>

namespace occupancy {

std::vector<DetectionBox> detect_blobs(const Image& img, const BlobDetectorOptions& opts) {
  const Image luma = to_luma(img);
  const int w = luma.width();
  const int h = luma.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<DetectionBox> out;
  std::vector<int> stack;

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t seed = static_cast<std::size_t>(sy) * w + sx;
      if (label[seed] >= 0 || luma.at(sx, sy) <= opts.threshold) continue;
      // 8-connected flood fill
      int x0 = sx, x1 = sx, y0 = sy, y1 = sy, area = 0;
      long sum = 0;
      label[seed] = 1;
      stack.assign(1, static_cast<int>(seed));
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w;
        const int y = idx / w;
        ++area;
        sum += luma.at(x, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (label[n] >= 0 || luma.at(nx, ny) <= opts.threshold) continue;
            label[n] = 1;
            stack.push_back(static_cast<int>(n));
          }
        }
      }
      if (area < opts.min_area) continue;
      DetectionBox b;
      b.x = x0;
      b.y = y0;
      b.w = x1 - x0 + 1;
      b.h = y1 - y0 + 1;
      const double fill = static_cast<double>(area) / (b.w * b.h);
      const double brightness = static_cast<double>(sum) / area / 255.0;
      b.score = std::clamp(0.5 + 0.25 * fill + 0.2 * brightness, 0.0, 1.0);
      if (x0 == 0 || x1 == w - 1) b.score *= opts.edge_penalty;
      b.source = "oracle";
      b.frame_index = img.frame_index;
      out.push_back(b);
    }
  }
  std::stable_sort(out.begin(), out.end(), nms_before);
  return out;
}

}  // namespace occupancy
