#include "fakedet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

// jpeglib.h expects size_t and FILE to be declared first.
#include <jpeglib.h>

#include "fakedet/error.hpp"

namespace fakedet {

std::vector<std::uint8_t> quantize_8bit(const PlanarImage& img) {
  std::vector<std::uint8_t> out(img.size());
  auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
  }
  return out;
}

PlanarImage dequantize_8bit(std::span<const std::uint8_t> bytes, int height, int width, int channels) {
  std::vector<double> data(bytes.size());
  std::transform(bytes.begin(), bytes.end(), data.begin(),
                 [](std::uint8_t b) { return static_cast<double>(b) / 255.0; });
  return PlanarImage(height, width, channels, std::move(data));
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIngestion, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

PlanarImage decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorKind::kIngestion, "cannot decode PNG " + name + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorKind::kIngestion, "cannot decode PNG " + name + ": " + msg);
  }
  return dequantize_8bit(buffer, static_cast<int>(image.height), static_cast<int>(image.width), 3);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

void jpeg_silence(j_common_ptr, int) {}

}  // namespace

// The two codec wrappers below keep every non-trivial C++ object out of the
// frames a longjmp can cross; buffers are plain pointers owned by libjpeg
// until the final copy.

std::vector<std::uint8_t> encode_jpeg(const PlanarImage& img, int quality) {
  require(quality >= 1 && quality <= 100, ErrorKind::kInvalidInput,
          "JPEG quality must be in [1, 100], got " + std::to_string(quality));
  require(img.channels() == 3 || img.channels() == 1, ErrorKind::kInvalidInput,
          "JPEG needs 1 or 3 channels");
  require(img.height() > 0 && img.width() > 0, ErrorKind::kInvalidInput, "empty image");
  const std::vector<std::uint8_t> pixels = quantize_8bit(img);

  jpeg_compress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  unsigned char* out_buf = nullptr;
  unsigned long out_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(out_buf);
    throw Error(ErrorKind::kAugmentation, std::string("JPEG encode failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out_buf, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = img.channels();
  cinfo.in_color_space = img.channels() == 3 ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(pixels.data() + cinfo.next_scanline * stride);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> result(out_buf, out_buf + out_size);
  std::free(out_buf);
  return result;
}

PlanarImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  err.base.emit_message = jpeg_silence;
  unsigned char* volatile pixels = nullptr;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    std::free(const_cast<unsigned char*>(pixels));
    throw Error(ErrorKind::kAugmentation, std::string("JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  const int h = static_cast<int>(cinfo.output_height);
  const int w = static_cast<int>(cinfo.output_width);
  pixels = static_cast<unsigned char*>(std::malloc(stride * cinfo.output_height));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  PlanarImage out = dequantize_8bit(std::span<const std::uint8_t>(pixels, stride * h), h, w, 3);
  std::free(const_cast<unsigned char*>(pixels));
  return out;
}

PlanarImage read_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin())) {
    return decode_png(bytes, path.string());
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    try {
      return decode_jpeg(bytes);
    } catch (const Error& e) {
      fail(ErrorKind::kIngestion, path.string() + ": " + e.what());
    }
  }
  fail(ErrorKind::kIngestion, "unrecognized image format: " + path.string());
}

void write_png(const std::filesystem::path& path, const PlanarImage& img) {
  require(img.channels() == 3 || img.channels() == 1, ErrorKind::kInvalidInput,
          "PNG output needs 1 or 3 channels");
  const std::vector<std::uint8_t> pixels = quantize_8bit(img);
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    fail(ErrorKind::kIo, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

}  // namespace fakedet
