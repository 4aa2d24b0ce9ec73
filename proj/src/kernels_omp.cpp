#include <vector>

#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"

#include "bilinear_detail.hpp"

namespace occupancy::kernels::omp {

using detail::blend;
using detail::make_tap;

Image remap_bilinear(const Image& src, std::span<const std::int32_t> lut, int out_width,
                     int out_height) {
  if (lut.size() != 2 * static_cast<std::size_t>(out_width) * out_height) {
    throw Error(ErrorCode::dimension_mismatch, "LUT size does not match output dimensions");
  }
  Image out(out_width, out_height, src.channels());
  const int ch = src.channels();
  const std::size_t stride = src.stride();
  const std::uint8_t* base = src.pixels().data();
  const int sw = src.width();
  const int sh = src.height();

#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_height; ++y) {
    const std::int32_t* l = lut.data() + 2 * static_cast<std::size_t>(y) * out_width;
    std::uint8_t* o = out.row(y);
    for (int x = 0; x < out_width; ++x, l += 2) {
      const detail::Tap tx = make_tap(l[0], sw);
      const detail::Tap ty = make_tap(l[1], sh);
      const std::uint8_t* r0 = base + ty.i0 * stride;
      const std::uint8_t* r1 = base + ty.i1 * stride;
      const int a = tx.i0 * ch;
      const int b = tx.i1 * ch;
      for (int c = 0; c < ch; ++c) {
        *o++ = blend(r0[a + c], r0[b + c], r1[a + c], r1[b + c], tx.frac, ty.frac);
      }
    }
  }
  return out;
}

namespace {

struct Span {
  int first;
  std::vector<std::uint32_t> weights;
};

// Per output index: the contiguous run of source pixels it covers and their
// integer coverage weights (in units of 1/out_len source pixels).
std::vector<Span> coverage(int src_len, int out_len) {
  std::vector<Span> spans(out_len);
  for (int o = 0; o < out_len; ++o) {
    const std::int64_t lo = static_cast<std::int64_t>(o) * src_len;
    const std::int64_t hi = lo + src_len;
    Span& s = spans[o];
    s.first = static_cast<int>(lo / out_len);
    for (int i = s.first; i < src_len; ++i) {
      const std::int64_t w = detail::overlap(lo, hi, static_cast<std::int64_t>(i) * out_len,
                                             static_cast<std::int64_t>(i + 1) * out_len);
      if (w == 0) break;
      s.weights.push_back(static_cast<std::uint32_t>(w));
    }
  }
  return spans;
}

}  // namespace

Image area_resize(const Image& src, int out_width, int out_height) {
  const int sw = src.width();
  const int sh = src.height();
  const int ch = src.channels();
  Image out(out_width, out_height, ch);
  const auto xs = coverage(sw, out_width);
  const auto ys = coverage(sh, out_height);

  // Horizontal pass: exact integer row sums, each at most 255 * sw.
  const std::size_t hstride = static_cast<std::size_t>(out_width) * ch;
  std::vector<std::uint64_t> rows(hstride * sh);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < sh; ++y) {
    const std::uint8_t* in = src.row(y);
    std::uint64_t* r = rows.data() + hstride * y;
    for (int ox = 0; ox < out_width; ++ox) {
      const Span& s = xs[ox];
      for (int c = 0; c < ch; ++c) {
        std::uint64_t acc = 0;
        for (std::size_t k = 0; k < s.weights.size(); ++k) {
          acc += static_cast<std::uint64_t>(s.weights[k]) * in[(s.first + k) * ch + c];
        }
        r[ox * ch + c] = acc;
      }
    }
  }

  const std::uint64_t total = static_cast<std::uint64_t>(sw) * sh;
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out_height; ++oy) {
    const Span& s = ys[oy];
    std::uint8_t* o = out.row(oy);
    for (std::size_t i = 0; i < hstride; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t k = 0; k < s.weights.size(); ++k) {
        acc += s.weights[k] * rows[hstride * (s.first + k) + i];
      }
      o[i] = detail::rounded_mean(acc, total);
    }
  }
  return out;
}

Image bilinear_resize(const Image& src, int out_width, int out_height) {
  const int ch = src.channels();
  Image out(out_width, out_height, ch);
  std::vector<detail::Tap> xt(out_width);
  for (int x = 0; x < out_width; ++x) {
    xt[x] = make_tap(detail::resample_coord(x, src.width(), out_width), src.width());
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < out_height; ++y) {
    const detail::Tap ty =
        make_tap(detail::resample_coord(y, src.height(), out_height), src.height());
    const std::uint8_t* r0 = src.row(ty.i0);
    const std::uint8_t* r1 = src.row(ty.i1);
    std::uint8_t* o = out.row(y);
    for (int x = 0; x < out_width; ++x) {
      const detail::Tap& tx = xt[x];
      const int a = tx.i0 * ch;
      const int b = tx.i1 * ch;
      for (int c = 0; c < ch; ++c) {
        *o++ = blend(r0[a + c], r0[b + c], r1[a + c], r1[b + c], tx.frac, ty.frac);
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
  const int w = base.width();
  const int h = base.height();
  const int ch = base.channels();
  Image out(2 * w, 2 * h, ch);
#pragma omp parallel for schedule(static) if (w * h > 16384)
  for (int y = 0; y < h; ++y) {
    for (int dy = 0; dy < 2; ++dy) {
      const std::uint8_t* even = sources[dy * 2]->row(y);
      const std::uint8_t* odd = sources[dy * 2 + 1]->row(y);
      std::uint8_t* o = out.row(2 * y + dy);
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < ch; ++c) {
          o[(2 * x) * ch + c] = even[x * ch + c];
          o[(2 * x + 1) * ch + c] = odd[x * ch + c];
        }
      }
    }
  }
  return out;
}

}  // namespace occupancy::kernels::omp
