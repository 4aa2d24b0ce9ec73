#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "occupancy/error.hpp"
#include "occupancy/geometry.hpp"

namespace occupancy {

namespace {

constexpr std::array<char, 4> kMagic = {'O', 'M', 'A', 'P'};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::io_error, "truncated fragment map");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_fragment_map(const FragmentMap& map, std::ostream& out) {
  const auto& l = map.layout();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kFragmentMapVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.fragment_index));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.camera_width));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.camera_height));
  for (double v : {l.center_x, l.center_y, l.start_angle, l.end_angle, l.r_lo, l.r_hi}) {
    put_f64(out, v);
  }
  for (std::int32_t v : map.forward_lut()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(v));
  if (!out) throw Error(ErrorCode::io_error, "failed writing fragment map");
}

FragmentMap read_fragment_map(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::io_error, "not an OMAP fragment map");
  const auto version = get_le<std::uint16_t>(in);
  if (version != kFragmentMapVersion) {
    throw Error(ErrorCode::schema_version_mismatch,
                "fragment map version " + std::to_string(version) + " is not supported");
  }
  FragmentMap::Layout l;
  l.fragment_index = static_cast<int>(get_le<std::uint32_t>(in));
  l.width = static_cast<int>(get_le<std::uint32_t>(in));
  l.height = static_cast<int>(get_le<std::uint32_t>(in));
  l.camera_width = static_cast<int>(get_le<std::uint32_t>(in));
  l.camera_height = static_cast<int>(get_le<std::uint32_t>(in));
  l.center_x = get_f64(in);
  l.center_y = get_f64(in);
  l.start_angle = get_f64(in);
  l.end_angle = get_f64(in);
  l.r_lo = get_f64(in);
  l.r_hi = get_f64(in);
  if (l.width < 2 || l.height < 2 || l.width > (1 << 15) || l.height > (1 << 15)) {
    throw Error(ErrorCode::io_error, "implausible fragment map dimensions");
  }
  std::vector<std::int32_t> lut(2 * static_cast<std::size_t>(l.width) * l.height);
  for (auto& v : lut) v = static_cast<std::int32_t>(get_le<std::uint32_t>(in));
  return FragmentMap(l, std::move(lut));
}

void save_fragment_map(const FragmentMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  write_fragment_map(map, out);
}

FragmentMap load_fragment_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return read_fragment_map(in);
}

}  // namespace occupancy
