#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fakedet {

/// H x W x C floating image, channel-last and row-major.
///
/// Pixel-domain images hold values in [0, 1]; frequency-domain planes reuse
/// the same container with unbounded values.
class PlanarImage {
 public:
  PlanarImage() = default;
  PlanarImage(int height, int width, int channels, double fill = 0.0);
  PlanarImage(int height, int width, int channels, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int y, int x, int c = 0) {
    return data_[index(y, x, c)];
  }
  double at(int y, int x, int c = 0) const {
    return data_[index(y, x, c)];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Copies channel `c` out as a single-channel image.
  PlanarImage channel(int c) const;
  /// Writes a single-channel image into channel `c`.
  void set_channel(int c, const PlanarImage& plane);

  bool same_shape(const PlanarImage& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Stacks single- or multi-channel images of equal H x W along channels.
PlanarImage concat_channels(std::span<const PlanarImage> parts);

/// True when every value lies in [0, 1].
bool in_unit_range(const PlanarImage& img);

PlanarImage clamp_unit(PlanarImage img);

}  // namespace fakedet
