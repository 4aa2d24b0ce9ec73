#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace occupancy {

/// 8-bit raster, interleaved channels (1 = luma, 3 = RGB), row-major.
/// Carries the capture index and timestamp so it can flow through the
/// pipeline as a frame.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, std::uint8_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t stride() const noexcept { return static_cast<std::size_t>(width_) * channels_; }

  std::uint8_t* row(int y) noexcept { return data_.data() + y * stride(); }
  const std::uint8_t* row(int y) const noexcept { return data_.data() + y * stride(); }

  std::uint8_t& at(int x, int y, int c = 0) noexcept { return row(y)[x * channels_ + c]; }
  std::uint8_t at(int x, int y, int c = 0) const noexcept { return row(y)[x * channels_ + c]; }

  std::span<std::uint8_t> pixels() noexcept { return data_; }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  std::int64_t frame_index = 0;
  double timestamp = 0.0;

  friend bool operator==(const Image& a, const Image& b) noexcept {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// ITU-R BT.601 luma; a 1-channel image is returned unchanged.
Image to_luma(const Image& src);

/// Copy of the axis-aligned window [x0, x0+w) x [y0, y0+h); pixels outside
/// the source are zero.
Image crop(const Image& src, int x0, int y0, int w, int h);

}  // namespace occupancy
