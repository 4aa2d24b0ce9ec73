#pragma once

// Extreme-low-resolution degradation and temporal reconstruction with
// interlacing kernels.

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "occupancy/geometry.hpp"
#include "occupancy/image.hpp"

namespace occupancy {

/// 2x2 matrix of frame ages. Output sub-pixel (di, dj) of every 2x2 output
/// block is copied from the frame t * cells[di][dj] positions back in the ring.
struct InterlacingKernel {
  std::string name;
  std::array<std::array<int, 2>, 2> cells{};
  int t = 1;

  int age(int di, int dj) const noexcept { return t * cells[di][dj]; }
  int max_age() const noexcept;
  InterlacingKernel with_t(int time_delta) const;

  /// Throws invalid-config: negative cells, no zero cell, or t < 1.
  void validate() const;

  friend bool operator==(const InterlacingKernel&, const InterlacingKernel&) = default;
};

/// k1 checkerboard, k2 four distinct ages, k3 row interlace.
std::vector<InterlacingKernel> default_kernels();
const InterlacingKernel& find_kernel(const std::vector<InterlacingKernel>& kernels,
                                     const std::string& name);

// Kernel definition file: {"kernels":[{"name":"k2","cells":[[0,1],[2,3]],"t":1}, ...]}
std::vector<InterlacingKernel> load_kernels(const std::filesystem::path& path);
void save_kernels(const std::vector<InterlacingKernel>& kernels, const std::filesystem::path& path);

/// Bounded history of low-resolution frames, newest at age 0. Single writer;
/// readers must not overlap a push.
class FrameRing {
 public:
  explicit FrameRing(std::size_t capacity, double nominal_fps = 15.0);

  /// Evicts the oldest frame at capacity. Throws out-of-order-frame unless
  /// the index strictly increases, dimension-mismatch on a shape change.
  void push(Image frame);

  std::size_t size() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return count_ == 0; }
  double nominal_fps() const noexcept { return fps_; }

  /// Throws insufficient-history when fewer than age+1 frames are held.
  const Image& at_age(std::size_t age) const;
  const Image& current() const { return at_age(0); }

  /// Timestamp difference between the newest frame and the one at `age`.
  double age_seconds(std::size_t age) const { return current().timestamp - at_age(age).timestamp; }

  void clear() noexcept { count_ = 0; }

 private:
  std::vector<Image> slots_;
  std::size_t head_ = 0;  // slot of the newest frame
  std::size_t count_ = 0;
  double fps_;
};

struct ScalePlan {
  enum class Mode { linear, interlaced };

  int net_res = 160;   ///< detector input side
  int scale_res = 32;  ///< privacy downscale side
  Mode mode = Mode::linear;
  InterlacingKernel kernel;  ///< used in interlaced mode

  void validate() const;
  std::size_t history_needed() const;
};

/// Area-average decimation of a square frame to scale_res x scale_res.
Image downscale(const Image& frame, int scale_res);

/// Bilinear resampling to target_res x target_res.
Image upscale_linear(const Image& frame, int target_res);

/// Nearest-neighbour doubling; the static-scene reference for interlace().
Image nearest_2x(const Image& frame);

Image interlace(const FrameRing& ring, const InterlacingKernel& kernel);

/// Reconstructs the ring's newest frame at plan.net_res.
Image apply_scale_plan(const FrameRing& ring, const ScalePlan& plan);

/// The privacy path: square crop around the camera circle, luma, downscale.
Image degrade(const Image& frame, const OmniCameraModel& camera, int scale_res);

/// Square window (x0, y0, side) that degrade() crops.
struct SquareCrop {
  int x0;
  int y0;
  int side;
};
SquareCrop omni_square_crop(const OmniCameraModel& camera);

}  // namespace occupancy
