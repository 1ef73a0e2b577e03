#pragma once

#include <filesystem>
#include <iosfwd>

#include "fakedet/network.hpp"

namespace fakedet {

// Model container, version 1:
//   "FDMD"            4 bytes magic
//   u32 version       little-endian
//   u64 header_bytes  little-endian
//   header            UTF-8 JSON: kind, spec, transform, augment, normalizer,
//                     metadata, and the ordered tensor table [{name, shape}]
//   blobs             each tensor's values as little-endian float64, in
//                     table order
//
// Reading back a written model reproduces every tensor bit for bit.

inline constexpr std::uint32_t kModelFormatVersion = 1;

void write_model(std::ostream& out, const ModelParams& params);
ModelParams read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace fakedet
