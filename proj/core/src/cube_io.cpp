#include "fakedet/cube_io.hpp"

#include <fstream>
#include <limits>

#include "fakedet/binary_io.hpp"
#include "fakedet/error.hpp"

namespace fakedet {

namespace {
constexpr char kMagic[4] = {'F', 'Q', 'C', '1'};
}

void write_cube(std::ostream& out, const PlanarImage& cube) {
  out.write(kMagic, 4);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.height()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.width()));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cube.channels()));
  for (double v : cube.data()) detail::write_le<float>(out, static_cast<float>(v));
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing cube");
}

PlanarImage read_cube(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  require(in.gcount() == 4 && std::equal(magic, magic + 4, kMagic), ErrorKind::kIo,
          "not an FQC1 cube (bad magic)");
  const auto h = detail::read_le<std::uint32_t>(in);
  const auto w = detail::read_le<std::uint32_t>(in);
  const auto c = detail::read_le<std::uint32_t>(in);
  constexpr auto kMax = static_cast<std::uint32_t>(std::numeric_limits<int>::max());
  require(h <= kMax && w <= kMax && c <= kMax, ErrorKind::kIo, "cube dimensions overflow");
  const std::size_t n = static_cast<std::size_t>(h) * w * c;
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i) data[i] = detail::read_le<float>(in);
  return PlanarImage(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c), std::move(data));
}

void write_cube_file(const std::filesystem::path& path, const PlanarImage& cube) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  write_cube(out, cube);
}

PlanarImage read_cube_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  return read_cube(in);
}

}  // namespace fakedet
