#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "fakedet/image.hpp"
#include "fakedet/rng.hpp"

namespace fakedet {

/// Separable Gaussian filter without clamping. Kernel radius is ceil(3 sigma),
/// weights are normalized to sum 1, and borders use half-sample symmetric
/// reflection (... c b a | a b c ... c b a | ...), which preserves the mean.
PlanarImage gaussian_filter(const PlanarImage& img, double sigma);

/// Normalized 1-D kernel used by gaussian_filter, indexed from -radius.
std::vector<double> gaussian_kernel(double sigma);

/// Pixel-domain blur; sigma must be >= 0.1. Output is clamped to [0, 1].
PlanarImage gaussian_blur(const PlanarImage& img, double sigma);

/// Encode/decode through baseline JPEG at the given quality (1..100).
PlanarImage jpeg_roundtrip(const PlanarImage& img, int quality);

struct AugmentConfig {
  double probability = 0.1;
  std::pair<double, double> blur_sigma_range{0.5, 3.0};
  std::pair<int, int> jpeg_quality_range{70, 95};
  std::uint64_t seed = 0;

  /// Throws kInvalidConfig when a field is out of range.
  void validate() const;

  friend bool operator==(const AugmentConfig&, const AugmentConfig&) = default;
};

/// What augment() decided to do for one sample.
struct AugmentPlan {
  std::optional<double> blur_sigma;
  std::optional<int> jpeg_quality;
};

/// Blur and JPEG are drawn independently, each with cfg.probability.
AugmentPlan draw_augment_plan(const AugmentConfig& cfg, Rng& rng);
PlanarImage apply_augment_plan(const PlanarImage& img, const AugmentPlan& plan);

PlanarImage augment(const PlanarImage& img, const AugmentConfig& cfg, Rng& rng);

/// Generator for sample `index` in epoch `epoch`; independent of visit order.
inline Rng augment_rng(const AugmentConfig& cfg, std::uint64_t epoch, std::uint64_t index) {
  return derive_rng(cfg.seed, {0xA06ull, epoch, index});
}

}  // namespace fakedet
