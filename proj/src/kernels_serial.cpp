#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"

#include "bilinear_detail.hpp"

namespace occupancy::kernels::serial {

using detail::blend;
using detail::make_tap;

Image remap_bilinear(const Image& src, std::span<const std::int32_t> lut, int out_width,
                     int out_height) {
  if (lut.size() != 2 * static_cast<std::size_t>(out_width) * out_height) {
    throw Error(ErrorCode::dimension_mismatch, "LUT size does not match output dimensions");
  }
  Image out(out_width, out_height, src.channels());
  const int ch = src.channels();
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const std::size_t k = 2 * (static_cast<std::size_t>(y) * out_width + x);
      const detail::Tap tx = make_tap(lut[k], src.width());
      const detail::Tap ty = make_tap(lut[k + 1], src.height());
      for (int c = 0; c < ch; ++c) {
        out.at(x, y, c) = blend(src.at(tx.i0, ty.i0, c), src.at(tx.i1, ty.i0, c),
                                src.at(tx.i0, ty.i1, c), src.at(tx.i1, ty.i1, c), tx.frac, ty.frac);
      }
    }
  }
  return out;
}

Image area_resize(const Image& src, int out_width, int out_height) {
  const int sw = src.width();
  const int sh = src.height();
  const int ch = src.channels();
  Image out(out_width, out_height, ch);
  const std::uint64_t total = static_cast<std::uint64_t>(sw) * sh;
  // Work in units of 1/out_len source pixels so every boundary is an integer.
  for (int oy = 0; oy < out_height; ++oy) {
    const std::int64_t y0 = static_cast<std::int64_t>(oy) * sh;
    const std::int64_t y1 = y0 + sh;
    for (int ox = 0; ox < out_width; ++ox) {
      const std::int64_t x0 = static_cast<std::int64_t>(ox) * sw;
      const std::int64_t x1 = x0 + sw;
      for (int c = 0; c < ch; ++c) {
        std::uint64_t sum = 0;
        for (int sy = static_cast<int>(y0 / out_height); sy < sh; ++sy) {
          const std::int64_t wy =
              detail::overlap(y0, y1, static_cast<std::int64_t>(sy) * out_height,
                              static_cast<std::int64_t>(sy + 1) * out_height);
          if (wy == 0) break;
          for (int sx = static_cast<int>(x0 / out_width); sx < sw; ++sx) {
            const std::int64_t wx =
                detail::overlap(x0, x1, static_cast<std::int64_t>(sx) * out_width,
                                static_cast<std::int64_t>(sx + 1) * out_width);
            if (wx == 0) break;
            sum += static_cast<std::uint64_t>(wx * wy) * src.at(sx, sy, c);
          }
        }
        out.at(ox, oy, c) = detail::rounded_mean(sum, total);
      }
    }
  }
  return out;
}

Image bilinear_resize(const Image& src, int out_width, int out_height) {
  Image out(out_width, out_height, src.channels());
  for (int y = 0; y < out_height; ++y) {
    const detail::Tap ty =
        make_tap(detail::resample_coord(y, src.height(), out_height), src.height());
    for (int x = 0; x < out_width; ++x) {
      const detail::Tap tx =
          make_tap(detail::resample_coord(x, src.width(), out_width), src.width());
      for (int c = 0; c < src.channels(); ++c) {
        out.at(x, y, c) = blend(src.at(tx.i0, ty.i0, c), src.at(tx.i1, ty.i0, c),
                                src.at(tx.i0, ty.i1, c), src.at(tx.i1, ty.i1, c), tx.frac, ty.frac);
      }
    }
  }
  return out;
}

Image interlace_2x(const InterlaceSources& sources) {
  const Image& base = *sources[0];
  for (const Image* s : sources) {
    if (!s->same_shape(base)) {
      throw Error(ErrorCode::dimension_mismatch, "interlace sources differ in shape");
    }
  }
  Image out(2 * base.width(), 2 * base.height(), base.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const Image& s = *sources[(y & 1) * 2 + (x & 1)];
      for (int c = 0; c < base.channels(); ++c) out.at(x, y, c) = s.at(x / 2, y / 2, c);
    }
  }
  return out;
}

}  // namespace occupancy::kernels::serial
