#include "occupancy/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"

namespace occupancy {

int InterlacingKernel::max_age() const noexcept {
  int m = 0;
  for (const auto& row : cells) {
    for (int c : row) m = std::max(m, c);
  }
  return t * m;
}

InterlacingKernel InterlacingKernel::with_t(int time_delta) const {
  InterlacingKernel k = *this;
  k.t = time_delta;
  k.validate();
  return k;
}

void InterlacingKernel::validate() const {
  bool has_current = false;
  for (const auto& row : cells) {
    for (int c : row) {
      if (c < 0) throw Error(ErrorCode::invalid_config, "kernel '" + name + "' has a negative age");
      has_current = has_current || c == 0;
    }
  }
  if (!has_current) {
    throw Error(ErrorCode::invalid_config, "kernel '" + name + "' never samples the current frame");
  }
  if (t < 1) throw Error(ErrorCode::invalid_config, "kernel '" + name + "' needs t >= 1");
}

std::vector<InterlacingKernel> default_kernels() {
  return {
      {"k1", {{{0, 1}, {1, 0}}}, 1},
      {"k2", {{{0, 1}, {2, 3}}}, 1},
      {"k3", {{{0, 0}, {1, 1}}}, 1},
  };
}

const InterlacingKernel& find_kernel(const std::vector<InterlacingKernel>& kernels,
                                     const std::string& name) {
  auto it = std::find_if(kernels.begin(), kernels.end(),
                         [&](const InterlacingKernel& k) { return k.name == name; });
  if (it == kernels.end()) throw Error(ErrorCode::invalid_config, "unknown kernel '" + name + "'");
  return *it;
}

std::vector<InterlacingKernel> load_kernels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open kernel file " + path.string());
  std::vector<InterlacingKernel> out;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& j : doc.at("kernels")) {
      InterlacingKernel k;
      k.name = j.at("name").get<std::string>();
      const auto& cells = j.at("cells");
      if (cells.size() != 2 || cells[0].size() != 2 || cells[1].size() != 2) {
        throw Error(ErrorCode::invalid_config, "kernel '" + k.name + "' must be 2x2");
      }
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) k.cells[r][c] = cells[r][c].get<int>();
      }
      k.t = j.value("t", 1);
      k.validate();
      out.push_back(std::move(k));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_config, "kernel file " + path.string() + ": " + e.what());
  }
  return out;
}

void save_kernels(const std::vector<InterlacingKernel>& kernels,
                  const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["kernels"] = nlohmann::json::array();
  for (const auto& k : kernels) {
    doc["kernels"].push_back({{"name", k.name},
                              {"cells", {{k.cells[0][0], k.cells[0][1]},
                                         {k.cells[1][0], k.cells[1][1]}}},
                              {"t", k.t}});
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

FrameRing::FrameRing(std::size_t capacity, double nominal_fps)
    : slots_(capacity), fps_(nominal_fps) {
  if (capacity == 0) throw Error(ErrorCode::invalid_config, "frame ring capacity must be >= 1");
  if (!(nominal_fps > 0.0)) throw Error(ErrorCode::invalid_config, "fps must be positive");
}

void FrameRing::push(Image frame) {
  if (count_ > 0) {
    const Image& newest = slots_[head_];
    if (frame.frame_index <= newest.frame_index) {
      throw Error(ErrorCode::out_of_order_frame,
                  "frame " + std::to_string(frame.frame_index) + " does not follow " +
                      std::to_string(newest.frame_index));
    }
    if (!frame.same_shape(newest)) {
      throw Error(ErrorCode::dimension_mismatch, "ring frames must share dimensions");
    }
  }
  head_ = count_ == 0 ? 0 : (head_ + 1) % slots_.size();
  slots_[head_] = std::move(frame);
  count_ = std::min(count_ + 1, slots_.size());
}

const Image& FrameRing::at_age(std::size_t age) const {
  if (age >= count_) {
    throw Error(ErrorCode::insufficient_history,
                "need a frame of age " + std::to_string(age) + " but the ring holds " +
                    std::to_string(count_));
  }
  return slots_[(head_ + slots_.size() - age) % slots_.size()];
}

// ---------------------------------------------------------------------------

void ScalePlan::validate() const {
  if (scale_res < 1 || net_res < 1 || scale_res > net_res) {
    throw Error(ErrorCode::invalid_config, "scale plan needs 1 <= scale_res <= net_res");
  }
  if (mode == Mode::interlaced) {
    if (net_res < 2 * scale_res) {
      throw Error(ErrorCode::invalid_config, "interlaced plan needs net_res >= 2 * scale_res (" +
                                                 std::to_string(net_res) + " < " +
                                                 std::to_string(2 * scale_res) + ")");
    }
    kernel.validate();
  }
}

std::size_t ScalePlan::history_needed() const {
  return mode == Mode::interlaced ? static_cast<std::size_t>(kernel.max_age()) + 1 : 1;
}

Image downscale(const Image& frame, int scale_res) {
  if (frame.width() != frame.height()) {
    throw Error(ErrorCode::invalid_resolution, "downscale expects a square frame");
  }
  if (scale_res < 8 || scale_res > frame.width()) {
    throw Error(ErrorCode::invalid_resolution,
                "scale_res " + std::to_string(scale_res) + " outside [8, " +
                    std::to_string(frame.width()) + "]");
  }
  Image out = kernels::omp::area_resize(frame, scale_res, scale_res);
  out.frame_index = frame.frame_index;
  out.timestamp = frame.timestamp;
  return out;
}

Image upscale_linear(const Image& frame, int target_res) {
  if (target_res < std::max(frame.width(), frame.height())) {
    throw Error(ErrorCode::invalid_resolution,
                "upscale target " + std::to_string(target_res) + " is below the frame size");
  }
  Image out = kernels::omp::bilinear_resize(frame, target_res, target_res);
  out.frame_index = frame.frame_index;
  out.timestamp = frame.timestamp;
  return out;
}

Image nearest_2x(const Image& frame) {
  return kernels::omp::interlace_2x({&frame, &frame, &frame, &frame});
}

Image interlace(const FrameRing& ring, const InterlacingKernel& kernel) {
  kernel.validate();
  if (ring.size() <= static_cast<std::size_t>(kernel.max_age())) {
    throw Error(ErrorCode::insufficient_history,
                "kernel '" + kernel.name + "' with t=" + std::to_string(kernel.t) + " needs " +
                    std::to_string(kernel.max_age() + 1) + " frames, ring holds " +
                    std::to_string(ring.size()));
  }
  kernels::InterlaceSources sources{};
  for (int di = 0; di < 2; ++di) {
    for (int dj = 0; dj < 2; ++dj) sources[di * 2 + dj] = &ring.at_age(kernel.age(di, dj));
  }
  Image out = kernels::omp::interlace_2x(sources);
  out.frame_index = ring.current().frame_index;
  out.timestamp = ring.current().timestamp;
  return out;
}

Image apply_scale_plan(const FrameRing& ring, const ScalePlan& plan) {
  plan.validate();
  const Image& current = ring.current();
  if (current.width() != plan.scale_res || current.height() != plan.scale_res) {
    throw Error(ErrorCode::dimension_mismatch, "ring frames are not at the plan's scale_res");
  }
  if (plan.mode == ScalePlan::Mode::linear) return upscale_linear(current, plan.net_res);
  return upscale_linear(interlace(ring, plan.kernel), plan.net_res);
}

SquareCrop omni_square_crop(const OmniCameraModel& camera) {
  const int side = std::max(1, static_cast<int>(std::lround(2.0 * camera.radius_outer)));
  return {static_cast<int>(std::lround(camera.center_x + 0.5 - camera.radius_outer)),
          static_cast<int>(std::lround(camera.center_y + 0.5 - camera.radius_outer)), side};
}

Image degrade(const Image& frame, const OmniCameraModel& camera, int scale_res) {
  const SquareCrop c = omni_square_crop(camera);
  return downscale(to_luma(crop(frame, c.x0, c.y0, c.side, c.side)), scale_res);
}

}  // namespace occupancy
