#pragma once

#include <filesystem>
#include <iosfwd>

#include "fakedet/image.hpp"

namespace fakedet {

// FQC1 layout: the 4 magic bytes "FQC1", little-endian u32 height, width and
// channels, then height*width*channels little-endian float32 values in
// channel-last row-major order. Coefficients are narrowed to float32 on write.

void write_cube(std::ostream& out, const PlanarImage& cube);
PlanarImage read_cube(std::istream& in);

void write_cube_file(const std::filesystem::path& path, const PlanarImage& cube);
PlanarImage read_cube_file(const std::filesystem::path& path);

}  // namespace fakedet
