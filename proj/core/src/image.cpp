#include "fakedet/image.hpp"

#include <algorithm>
#include <string>

#include "fakedet/error.hpp"

namespace fakedet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kInvalidConfig: return "invalid config";
    case ErrorKind::kAugmentation: return "augmentation error";
    case ErrorKind::kIngestion: return "ingestion error";
    case ErrorKind::kTraining: return "training error";
    case ErrorKind::kEvaluation: return "evaluation error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

PlanarImage::PlanarImage(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  require(height >= 0 && width >= 0 && channels >= 0, ErrorKind::kInvalidInput,
          "image dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

PlanarImage::PlanarImage(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  require(height >= 0 && width >= 0 && channels >= 0, ErrorKind::kInvalidInput,
          "image dimensions must be non-negative");
  require(data_.size() == static_cast<std::size_t>(height) * width * channels,
          ErrorKind::kInvalidInput,
          "image data length " + std::to_string(data_.size()) + " does not match " +
              std::to_string(height) + "x" + std::to_string(width) + "x" +
              std::to_string(channels));
}

PlanarImage PlanarImage::channel(int c) const {
  require(c >= 0 && c < channels_, ErrorKind::kInvalidInput, "channel index out of range");
  PlanarImage out(height_, width_, 1);
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  for (std::size_t i = 0; i < n; ++i) out.data_[i] = data_[i * channels_ + c];
  return out;
}

void PlanarImage::set_channel(int c, const PlanarImage& plane) {
  require(c >= 0 && c < channels_, ErrorKind::kInvalidInput, "channel index out of range");
  require(plane.height_ == height_ && plane.width_ == width_ && plane.channels_ == 1,
          ErrorKind::kInvalidInput, "plane shape does not match image");
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  for (std::size_t i = 0; i < n; ++i) data_[i * channels_ + c] = plane.data_[i];
}

PlanarImage concat_channels(std::span<const PlanarImage> parts) {
  require(!parts.empty(), ErrorKind::kInvalidInput, "nothing to concatenate");
  const int h = parts.front().height();
  const int w = parts.front().width();
  int total = 0;
  for (const auto& p : parts) {
    require(p.height() == h && p.width() == w, ErrorKind::kInvalidInput,
            "concatenated images must share height and width");
    total += p.channels();
  }
  PlanarImage out(h, w, total);
  auto dst = out.data();
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  int offset = 0;
  for (const auto& p : parts) {
    auto src = p.data();
    const int pc = p.channels();
    for (std::size_t i = 0; i < pixels; ++i) {
      std::copy_n(src.begin() + i * pc, pc, dst.begin() + i * total + offset);
    }
    offset += pc;
  }
  return out;
}

bool in_unit_range(const PlanarImage& img) {
  return std::all_of(img.data().begin(), img.data().end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

PlanarImage clamp_unit(PlanarImage img) {
  for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace fakedet
