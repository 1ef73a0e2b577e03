#include "fakedet/augmentation.hpp"

#include <cmath>
#include <string>

#include "fakedet/error.hpp"
#include "fakedet/image_io.hpp"

namespace fakedet {

std::vector<double> gaussian_kernel(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidInput, "sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

// Half-sample symmetric index: the signal repeats with period 2n as
// x0..x(n-1) x(n-1)..x0.
int reflect(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace

PlanarImage gaussian_filter(const PlanarImage& img, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int h = img.height(), w = img.width(), c = img.channels();
  PlanarImage tmp(h, w, c), out(h, w, c);
  std::vector<int> xs(w + 2 * radius), ys(h + 2 * radius);
  for (int i = 0; i < w + 2 * radius; ++i) xs[i] = reflect(i - radius, w);
  for (int i = 0; i < h + 2 * radius; ++i) ys[i] = reflect(i - radius, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = 0; t <= 2 * radius; ++t) acc += kernel[t] * img.at(y, xs[x + t], k);
        tmp.at(y, x, k) = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = 0; t <= 2 * radius; ++t) acc += kernel[t] * tmp.at(ys[y + t], x, k);
        out.at(y, x, k) = acc;
      }
    }
  }
  return out;
}

PlanarImage gaussian_blur(const PlanarImage& img, double sigma) {
  require(sigma >= 0.1, ErrorKind::kInvalidInput,
          "blur sigma must be >= 0.1, got " + std::to_string(sigma));
  return clamp_unit(gaussian_filter(img, sigma));
}

PlanarImage jpeg_roundtrip(const PlanarImage& img, int quality) {
  require(img.channels() == 3, ErrorKind::kInvalidInput, "JPEG round trip needs an RGB image");
  const auto bytes = encode_jpeg(img, quality);
  PlanarImage out = decode_jpeg(bytes);
  require(out.same_shape(img), ErrorKind::kAugmentation, "JPEG codec changed the image shape");
  return out;
}

void AugmentConfig::validate() const {
  require(probability >= 0.0 && probability <= 1.0, ErrorKind::kInvalidConfig,
          "augmentation probability must be in [0, 1]");
  require(blur_sigma_range.first > 0.0 && blur_sigma_range.first <= blur_sigma_range.second,
          ErrorKind::kInvalidConfig, "blur sigma range must be positive and ordered");
  require(blur_sigma_range.first >= 0.1, ErrorKind::kInvalidConfig, "blur sigma must be >= 0.1");
  require(jpeg_quality_range.first >= 1 && jpeg_quality_range.second <= 100 &&
              jpeg_quality_range.first <= jpeg_quality_range.second,
          ErrorKind::kInvalidConfig, "JPEG quality range must be ordered within [1, 100]");
}

AugmentPlan draw_augment_plan(const AugmentConfig& cfg, Rng& rng) {
  // Always consume four draws so later draws do not shift with earlier outcomes.
  const double u_blur = uniform01(rng);
  const double u_sigma = uniform01(rng);
  const double u_jpeg = uniform01(rng);
  const double u_quality = uniform01(rng);
  AugmentPlan plan;
  if (u_blur < cfg.probability) {
    const auto [lo, hi] = cfg.blur_sigma_range;
    plan.blur_sigma = lo + (hi - lo) * u_sigma;
  }
  if (u_jpeg < cfg.probability) {
    const auto [lo, hi] = cfg.jpeg_quality_range;
    const int span = hi - lo + 1;
    plan.jpeg_quality = lo + std::min(static_cast<int>(u_quality * span), span - 1);
  }
  return plan;
}

PlanarImage apply_augment_plan(const PlanarImage& img, const AugmentPlan& plan) {
  PlanarImage out = img;
  if (plan.blur_sigma) out = gaussian_blur(out, *plan.blur_sigma);
  if (plan.jpeg_quality) out = jpeg_roundtrip(out, *plan.jpeg_quality);
  return out;
}

PlanarImage augment(const PlanarImage& img, const AugmentConfig& cfg, Rng& rng) {
  require(img.channels() == 3, ErrorKind::kInvalidInput, "augment expects an RGB image");
  return apply_augment_plan(img, draw_augment_plan(cfg, rng));
}

}  // namespace fakedet
