#include "occupancy/image.hpp"

#include <algorithm>

#include "occupancy/error.hpp"

namespace occupancy {

Image::Image(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
    throw Error(ErrorCode::dimension_mismatch, "image must be non-empty with 1 or 3 channels");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image to_luma(const Image& src) {
  if (src.channels() == 1) return src;
  Image out(src.width(), src.height(), 1);
  out.frame_index = src.frame_index;
  out.timestamp = src.timestamp;
  for (int y = 0; y < src.height(); ++y) {
    const std::uint8_t* in = src.row(y);
    std::uint8_t* o = out.row(y);
    for (int x = 0; x < src.width(); ++x) {
      // 0.299, 0.587, 0.114 in 16-bit fixed point
      const unsigned v = 19595u * in[3 * x] + 38470u * in[3 * x + 1] + 7471u * in[3 * x + 2];
      o[x] = static_cast<std::uint8_t>((v + 32768u) >> 16);
    }
  }
  return out;
}

Image crop(const Image& src, int x0, int y0, int w, int h) {
  Image out(w, h, src.channels());
  out.frame_index = src.frame_index;
  out.timestamp = src.timestamp;
  const int sx0 = std::max(x0, 0);
  const int sx1 = std::min(x0 + w, src.width());
  if (sx1 <= sx0) return out;
  for (int y = 0; y < h; ++y) {
    const int sy = y0 + y;
    if (sy < 0 || sy >= src.height()) continue;
    std::copy(src.row(sy) + sx0 * src.channels(), src.row(sy) + sx1 * src.channels(),
              out.row(y) + (sx0 - x0) * src.channels());
  }
  return out;
}

}  // namespace occupancy
