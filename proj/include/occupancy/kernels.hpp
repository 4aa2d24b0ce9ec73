#pragma once

// Pixel kernels in two flavours: a straightforward serial reference and an
// OpenMP row-parallel variant. Both produce bit-identical output; the tests
// pin that, and bench/ compares their throughput.

#include <array>
#include <cstdint>
#include <span>

#include "occupancy/image.hpp"

namespace occupancy::kernels {

/// Fractional bits of the fixed-point source coordinates used by every
/// bilinear kernel (and by the serialized FragmentMap LUT).
inline constexpr int kFracBits = 8;
inline constexpr std::int32_t kFracOne = 1 << kFracBits;

inline std::int32_t to_fixed(double v) noexcept {
  return static_cast<std::int32_t>(v >= 0.0 ? v * kFracOne + 0.5 : v * kFracOne - 0.5);
}
inline double from_fixed(std::int32_t v) noexcept { return static_cast<double>(v) / kFracOne; }

/// The four source frames of a 2x2 interlacing step, row-major by output
/// sub-position: [0] feeds (even row, even col), [1] (even, odd),
/// [2] (odd, even), [3] (odd, odd).
using InterlaceSources = std::array<const Image*, 4>;

namespace serial {

/// lut holds (x, y) pairs in kFracBits fixed point, one per output pixel,
/// row-major. Source coordinates are clamped to the image edge.
Image remap_bilinear(const Image& src, std::span<const std::int32_t> lut, int out_width,
                     int out_height);

/// Box-filter decimation with exact fractional pixel coverage.
Image area_resize(const Image& src, int out_width, int out_height);

/// Pixel-center aligned bilinear resampling with edge clamping.
Image bilinear_resize(const Image& src, int out_width, int out_height);

Image interlace_2x(const InterlaceSources& sources);

}  // namespace serial

namespace omp {

Image remap_bilinear(const Image& src, std::span<const std::int32_t> lut, int out_width,
                     int out_height);
Image area_resize(const Image& src, int out_width, int out_height);
Image bilinear_resize(const Image& src, int out_width, int out_height);
Image interlace_2x(const InterlaceSources& sources);

}  // namespace omp

}  // namespace occupancy::kernels
