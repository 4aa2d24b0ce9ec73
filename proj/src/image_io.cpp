#include "occupancy/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "occupancy/error.hpp"

namespace occupancy {
namespace fs = std::filesystem;

namespace {

int read_header_int(std::istream& in, const fs::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) {
    throw Error(ErrorCode::io_error, "malformed PNM header in " + path.string());
  }
  int v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = in.get();
  }
  // exactly one whitespace byte separates maxval from the raster
  return v;
}

std::string lower_ext(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

}  // namespace

Image read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw Error(ErrorCode::io_error, "not a binary PGM/PPM: " + path.string());
  }
  const int channels = magic[1] == '5' ? 1 : 3;
  const int w = read_header_int(in, path);
  const int h = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (w <= 0 || h <= 0 || maxval != 255) {
    throw Error(ErrorCode::io_error, "unsupported PNM geometry/maxval in " + path.string());
  }
  Image img(w, h, channels);
  auto px = img.pixels();
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (in.gcount() != static_cast<std::streamsize>(px.size())) {
    throw Error(ErrorCode::io_error, "truncated raster in " + path.string());
  }
  return img;
}

void write_pnm(const Image& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << (image.channels() == 1 ? "P5" : "P6") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  auto px = image.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw Error(ErrorCode::io_error, "short write to " + path.string());
}

Image read_png(const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw Error(ErrorCode::io_error, "cannot read PNG " + path.string() + ": " + png.message);
  }
  const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
  png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height), gray ? 1 : 3);
  if (!png_image_finish_read(&png, nullptr, img.pixels().data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::io_error, "cannot decode PNG " + path.string() + ": " + png.message);
  }
  return img;
}

void write_png(const Image& image, const fs::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels().data(), 0, nullptr)) {
    throw Error(ErrorCode::io_error, "cannot write PNG " + path.string() + ": " + png.message);
  }
}

bool is_frame_file(const fs::path& path) {
  const std::string ext = lower_ext(path);
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png";
}

Image read_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::io_error, "missing frame file " + path.string());
  return lower_ext(path) == ".png" ? read_png(path) : read_pnm(path);
}

void write_image(const Image& image, const fs::path& path) {
  if (lower_ext(path) == ".png") {
    write_png(image, path);
  } else {
    write_pnm(image, path);
  }
}

}  // namespace occupancy
