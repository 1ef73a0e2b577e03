#include "fakedet/colorspace.hpp"

#include <algorithm>
#include <string>

#include "fakedet/error.hpp"

namespace fakedet {

ColorCoefficients ColorCoefficients::from_luma_weights(double k_ry, double k_by) {
  const double k_gy = 1.0 - k_ry - k_by;
  require(k_ry > 0.0 && k_by > 0.0 && k_gy > 0.0, ErrorKind::kInvalidConfig,
          "luma weights must be strictly positive and sum to 1 (k_ry=" +
              std::to_string(k_ry) + ", k_by=" + std::to_string(k_by) + ")");
  return ColorCoefficients(k_ry, k_by);
}

namespace {

void require_three_channels(const PlanarImage& img) {
  require(img.channels() == 3, ErrorKind::kInvalidInput,
          "expected a 3-channel image, got " + std::to_string(img.channels()));
}

}  // namespace

PlanarImage rgb_to_ycbcr(const PlanarImage& img, const ColorCoefficients& coeffs,
                         ChromaConvention convention) {
  require_three_channels(img);
  PlanarImage out(img.height(), img.width(), 3);
  auto src = img.data();
  auto dst = out.data();
  const double kr = coeffs.k_ry();
  const double kb = coeffs.k_by();
  const double cb_scale = coeffs.cb_scale();
  const double cr_scale = coeffs.cr_scale();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const double r = src[i], g = src[i + 1], b = src[i + 2];
    // Written relative to G so that R == G == B gives Y == G bit-exactly and
    // the chroma differences vanish without rounding residue.
    const double y = std::clamp(g + kr * (r - g) + kb * (b - g), 0.0, 1.0);
    dst[i] = y;
    if (convention == ChromaConvention::kBt601) {
      dst[i + 1] = (b - y) / cb_scale;
      dst[i + 2] = (r - y) / cr_scale;
    } else {
      dst[i + 1] = r - y;
      dst[i + 2] = b - y;
    }
  }
  return out;
}

PlanarImage ycbcr_to_rgb(const PlanarImage& img, const ColorCoefficients& coeffs,
                         ChromaConvention convention) {
  require_three_channels(img);
  PlanarImage out(img.height(), img.width(), 3);
  auto src = img.data();
  auto dst = out.data();
  const double kr = coeffs.k_ry();
  const double kb = coeffs.k_by();
  const double kg = coeffs.k_gy();
  for (std::size_t i = 0; i < src.size(); i += 3) {
    const double y = src[i];
    double r, b;
    if (convention == ChromaConvention::kBt601) {
      b = y + src[i + 1] * coeffs.cb_scale();
      r = y + src[i + 2] * coeffs.cr_scale();
    } else {
      r = y + src[i + 1];
      b = y + src[i + 2];
    }
    const double g = (y - kr * r - kb * b) / kg;
    dst[i] = std::clamp(r, 0.0, 1.0);
    dst[i + 1] = std::clamp(g, 0.0, 1.0);
    dst[i + 2] = std::clamp(b, 0.0, 1.0);
  }
  return out;
}

}  // namespace fakedet
