#pragma once

// Integer arithmetic shared by the serial and OpenMP kernels. Keeping it in
// one place is what makes the two variants bit-identical.

#include <algorithm>
#include <cstdint>

#include "occupancy/kernels.hpp"

namespace occupancy::kernels::detail {

inline std::int64_t floor_div(std::int64_t num, std::int64_t den) noexcept {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

/// Fixed-point source coordinate of output sample `dst` when resampling an
/// axis of `src_len` pixels to `dst_len`, pixel centers aligned, clamped.
inline std::int32_t resample_coord(int dst, int src_len, int dst_len) noexcept {
  const std::int64_t num = (static_cast<std::int64_t>(2 * dst + 1) * src_len - dst_len) * kFracOne;
  const std::int64_t den = 2 * static_cast<std::int64_t>(dst_len);
  const std::int64_t fixed = floor_div(2 * num + den, 2 * den);
  return static_cast<std::int32_t>(
      std::clamp<std::int64_t>(fixed, 0, static_cast<std::int64_t>(src_len - 1) * kFracOne));
}

struct Tap {
  int i0;
  int i1;
  std::uint32_t frac;  // weight of i1, in [0, kFracOne)
};

inline Tap make_tap(std::int32_t fixed, int len) noexcept {
  const std::int32_t clamped = std::clamp(fixed, 0, (len - 1) * kFracOne);
  const int i0 = clamped >> kFracBits;
  return {i0, std::min(i0 + 1, len - 1), static_cast<std::uint32_t>(clamped & (kFracOne - 1))};
}

inline std::uint8_t blend(std::uint32_t p00, std::uint32_t p01, std::uint32_t p10,
                          std::uint32_t p11, std::uint32_t ax, std::uint32_t ay) noexcept {
  const std::uint32_t top = p00 * (kFracOne - ax) + p01 * ax;
  const std::uint32_t bot = p10 * (kFracOne - ax) + p11 * ax;
  const std::uint32_t v = top * (kFracOne - ay) + bot * ay;
  return static_cast<std::uint8_t>((v + (1u << (2 * kFracBits - 1))) >> (2 * kFracBits));
}

/// Length of [a0, a1) ∩ [b0, b1), zero when disjoint.
inline std::int64_t overlap(std::int64_t a0, std::int64_t a1, std::int64_t b0,
                            std::int64_t b1) noexcept {
  return std::max<std::int64_t>(0, std::min(a1, b1) - std::max(a0, b0));
}

inline std::uint8_t rounded_mean(std::uint64_t sum, std::uint64_t total) noexcept {
  return static_cast<std::uint8_t>((2 * sum + total) / (2 * total));
}

}  // namespace occupancy::kernels::detail
