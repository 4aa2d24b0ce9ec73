#pragma once

#include <filesystem>

#include "occupancy/image.hpp"

namespace occupancy {

// Binary portable anymap (P5 gray / P6 RGB, maxval 255).
Image read_pnm(const std::filesystem::path& path);
void write_pnm(const Image& image, const std::filesystem::path& path);

Image read_png(const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

/// Dispatches on extension: .pgm/.ppm/.pnm or .png.
Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);

bool is_frame_file(const std::filesystem::path& path);

}  // namespace occupancy
