#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "occupancy/error.hpp"
#include "occupancy/image.hpp"
#include "occupancy/image_io.hpp"
#include "occupancy/kernels.hpp"

using namespace occupancy;
namespace ks = occupancy::kernels::serial;
namespace ko = occupancy::kernels::omp;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h, int c) {
  Image img(w, h, c);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("occupancy-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Kernels, SerialAndParallelRemapAgree) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int ch = trial % 2 ? 3 : 1;
    const Image src = random_image(rng, 37 + trial, 29 + 2 * trial, ch);
    const int w = 23 + trial, h = 17;
    std::vector<std::int32_t> lut(2 * w * h);
    std::uniform_real_distribution<double> cx(-3.0, src.width() + 3.0), cy(-3.0, src.height() + 3.0);
    for (std::size_t i = 0; i < lut.size(); i += 2) {
      lut[i] = kernels::to_fixed(cx(rng));
      lut[i + 1] = kernels::to_fixed(cy(rng));
    }
    EXPECT_EQ(ks::remap_bilinear(src, lut, w, h), ko::remap_bilinear(src, lut, w, h));
  }
}

TEST(Kernels, RemapAtIntegerCoordinatesCopies) {
  std::mt19937_64 rng(2);
  const Image src = random_image(rng, 16, 9, 3);
  std::vector<std::int32_t> lut;
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 16; ++x) {
      lut.push_back(x * kernels::kFracOne);
      lut.push_back(y * kernels::kFracOne);
    }
  }
  EXPECT_EQ(ks::remap_bilinear(src, lut, 16, 9), src);
}

TEST(Kernels, SerialAndParallelResizeAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int ch = trial % 3 == 0 ? 3 : 1;
    const Image src = random_image(rng, 20 + static_cast<int>(rng() % 200), 20 + static_cast<int>(rng() % 200), ch);
    const int ow = 1 + static_cast<int>(rng() % 250), oh = 1 + static_cast<int>(rng() % 250);
    EXPECT_EQ(ks::bilinear_resize(src, ow, oh), ko::bilinear_resize(src, ow, oh));
    const int dw = 1 + static_cast<int>(rng() % src.width()), dh = 1 + static_cast<int>(rng() % src.height());
    EXPECT_EQ(ks::area_resize(src, dw, dh), ko::area_resize(src, dw, dh));
  }
}

TEST(Kernels, SerialAndParallelInterlaceAgree) {
  std::mt19937_64 rng(4);
  for (int side : {8, 32, 100, 200}) {
    std::array<Image, 4> frames;
    for (auto& f : frames) f = random_image(rng, side, side, 1);
    kernels::InterlaceSources src{&frames[0], &frames[1], &frames[2], &frames[3]};
    const Image a = ks::interlace_2x(src);
    EXPECT_EQ(a, ko::interlace_2x(src));
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        ASSERT_EQ(a.at(2 * x, 2 * y), frames[0].at(x, y));
        ASSERT_EQ(a.at(2 * x + 1, 2 * y), frames[1].at(x, y));
        ASSERT_EQ(a.at(2 * x, 2 * y + 1), frames[2].at(x, y));
        ASSERT_EQ(a.at(2 * x + 1, 2 * y + 1), frames[3].at(x, y));
      }
    }
  }
}

TEST(Kernels, AreaResizeBlockMeansExact) {
  // Each 2x2 block holds {a, a+1, a+2, a+3}; the mean is a + 1.5 which rounds up.
  Image src(64, 64, 1);
  for (int by = 0; by < 32; ++by) {
    for (int bx = 0; bx < 32; ++bx) {
      const int a = (by * 32 + bx) % 250;
      src.at(2 * bx, 2 * by) = static_cast<std::uint8_t>(a);
      src.at(2 * bx + 1, 2 * by) = static_cast<std::uint8_t>(a + 1);
      src.at(2 * bx, 2 * by + 1) = static_cast<std::uint8_t>(a + 2);
      src.at(2 * bx + 1, 2 * by + 1) = static_cast<std::uint8_t>(a + 3);
    }
  }
  const Image out = ks::area_resize(src, 32, 32);
  for (int by = 0; by < 32; ++by) {
    for (int bx = 0; bx < 32; ++bx) {
      const int a = (by * 32 + bx) % 250;
      ASSERT_EQ(out.at(bx, by), a + 2);
    }
  }
}

TEST(Kernels, BilinearCheckerboardMatchesClosedForm) {
  Image src(2, 2, 1);
  src.at(0, 0) = 10;
  src.at(1, 0) = 200;
  src.at(0, 1) = 230;
  src.at(1, 1) = 40;
  const Image out = ks::bilinear_resize(src, 4, 4);
  auto coord = [](int d) { return std::clamp((d + 0.5) * 2.0 / 4.0 - 0.5, 0.0, 1.0); };
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const double fx = coord(x), fy = coord(y);
      const double v = (1 - fx) * (1 - fy) * 10 + fx * (1 - fy) * 200 + (1 - fx) * fy * 230 + fx * fy * 40;
      EXPECT_LE(std::abs(out.at(x, y) - v), 0.5) << x << "," << y;
    }
  }
  EXPECT_EQ(out.at(0, 0), 10);
  EXPECT_EQ(out.at(3, 3), 40);
}

TEST(Kernels, ConstantsArePreserved) {
  for (int v : {0, 1, 127, 254, 255}) {
    const Image c(50, 30, 1, static_cast<std::uint8_t>(v));
    for (const Image& out : {ks::bilinear_resize(c, 77, 91), ks::area_resize(c, 13, 7),
                             ko::bilinear_resize(c, 160, 160), ko::area_resize(c, 49, 29)}) {
      for (auto p : out.pixels()) ASSERT_EQ(p, v);
    }
  }
}

TEST(Kernels, SameSizeResizeIsIdentity) {
  std::mt19937_64 rng(6);
  const Image src = random_image(rng, 33, 21, 3);
  EXPECT_EQ(ks::bilinear_resize(src, 33, 21), src);
  EXPECT_EQ(ks::area_resize(src, 33, 21), src);
}

TEST(ImageOps, LumaAndCrop) {
  Image rgb(2, 1, 3);
  rgb.at(0, 0, 0) = 255;
  rgb.at(1, 0, 0) = rgb.at(1, 0, 1) = rgb.at(1, 0, 2) = 200;
  const Image y = to_luma(rgb);
  ASSERT_EQ(y.channels(), 1);
  EXPECT_NEAR(y.at(0, 0), 0.299 * 255, 1.0);
  EXPECT_EQ(y.at(1, 0), 200);

  Image src(4, 4, 1, 9);
  const Image c = crop(src, -1, 2, 3, 3);
  EXPECT_EQ(c.at(0, 0), 0);
  EXPECT_EQ(c.at(1, 0), 9);
  EXPECT_EQ(c.at(1, 2), 0);
}

TEST(ImageIo, PnmAndPngRoundTrip) {
  const auto dir = temp_dir("imageio");
  std::mt19937_64 rng(8);
  for (int ch : {1, 3}) {
    Image img = random_image(rng, 31, 17, ch);
    for (const char* ext : {".png", ch == 1 ? ".pgm" : ".ppm"}) {
      const auto path = dir / (std::string("img") + std::to_string(ch) + ext);
      write_image(img, path);
      EXPECT_EQ(read_image(path), img) << path;
    }
  }
}

TEST(ImageIo, MissingFileNamesIt) {
  try {
    read_image("/nonexistent/frame_000001.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
    EXPECT_NE(std::string(e.what()).find("frame_000001.pgm"), std::string::npos);
  }
}

TEST(ImageIo, RejectsMalformedPnm) {
  const auto dir = temp_dir("badpnm");
  std::ofstream(dir / "bad.pgm", std::ios::binary) << "P5\n4 4\n65535\n";
  EXPECT_THROW(read_image(dir / "bad.pgm"), Error);
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n4 4\n255\nab";
  EXPECT_THROW(read_image(dir / "short.pgm"), Error);
}
