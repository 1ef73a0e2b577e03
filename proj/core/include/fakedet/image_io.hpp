#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fakedet/image.hpp"

namespace fakedet {

/// 8-bit quantization used at every I/O boundary: round(v * 255), clamped.
std::vector<std::uint8_t> quantize_8bit(const PlanarImage& img);
PlanarImage dequantize_8bit(std::span<const std::uint8_t> bytes, int height, int width, int channels);

/// Decodes a PNG or JPEG file (sniffed by signature) into RGB in [0, 1].
/// Throws kIngestion for unreadable or undecodable files.
PlanarImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB (3 channels) or grayscale (1 channel) PNG.
void write_png(const std::filesystem::path& path, const PlanarImage& img);

/// Baseline JPEG in memory; errors surface as kAugmentation with the codec message.
std::vector<std::uint8_t> encode_jpeg(const PlanarImage& img, int quality);
PlanarImage decode_jpeg(std::span<const std::uint8_t> bytes);

}  // namespace fakedet
