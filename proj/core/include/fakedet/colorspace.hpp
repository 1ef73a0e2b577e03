#pragma once

#include "fakedet/image.hpp"

namespace fakedet {

/// Luma weights for an RGB -> YCbCr conversion. Only the red and blue weights
/// are stored; the green weight is whatever makes the three sum to one.
class ColorCoefficients {
 public:
  /// Throws kInvalidConfig unless all three weights come out strictly positive.
  static ColorCoefficients from_luma_weights(double k_ry, double k_by);

  static ColorCoefficients itu601() { return from_luma_weights(0.299, 0.114); }
  static ColorCoefficients itu709() { return from_luma_weights(0.2126, 0.0722); }
  static ColorCoefficients smpte240m() { return from_luma_weights(0.212, 0.087); }

  double k_ry() const noexcept { return k_ry_; }
  double k_by() const noexcept { return k_by_; }
  double k_gy() const noexcept { return 1.0 - k_ry_ - k_by_; }

  /// Divisors mapping B-Y and R-Y into [-0.5, 0.5] (1.772 and 1.402 for ITU601).
  double cb_scale() const noexcept { return 2.0 * (1.0 - k_by_); }
  double cr_scale() const noexcept { return 2.0 * (1.0 - k_ry_); }

 private:
  ColorCoefficients(double k_ry, double k_by) : k_ry_(k_ry), k_by_(k_by) {}

  double k_ry_;
  double k_by_;
};

enum class ChromaConvention {
  /// Cb from blue, Cr from red, scaled into [-0.5, 0.5], zero-centered.
  kBt601,
  /// Unscaled Cb = R - Y, Cr = B - Y (blue/red roles swapped).
  kSwapped,
};

/// Channels of the result are ordered (Y, Cb, Cr).
PlanarImage rgb_to_ycbcr(const PlanarImage& img, const ColorCoefficients& coeffs,
                         ChromaConvention convention = ChromaConvention::kBt601);

/// Inverse of rgb_to_ycbcr; output is clamped to [0, 1].
PlanarImage ycbcr_to_rgb(const PlanarImage& img, const ColorCoefficients& coeffs,
                         ChromaConvention convention = ChromaConvention::kBt601);

}  // namespace fakedet
