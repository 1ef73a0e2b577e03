#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fakedet/corpus.hpp"
#include "fakedet/network.hpp"

namespace fakedet {

/// Equal-weight mean of two probability pairs. Inputs must each sum to 1
/// within 1e-9; the output is renormalized so it sums to 1.
ProbPair fuse_probabilities(const ProbPair& spatial, const ProbPair& frequency);

struct ClassF1 {
  double value = 0.0;
  /// Set when precision or recall had a zero denominator (or both were zero);
  /// value is then reported as 0.
  bool degenerate = false;
};

struct MetricsReport {
  double accuracy = 0.0;
  ClassF1 f1_fake;
  ClassF1 f1_real;
  /// confusion[truth][predicted], 0 = real, 1 = fake.
  std::array<std::array<std::int64_t, 2>, 2> confusion{};
  std::int64_t n = 0;
};

MetricsReport compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

/// fake iff p_fake > threshold.
Label decide(const ProbPair& p, double threshold = 0.5);

struct NamedReport {
  std::string model;  ///< "spatial", "frequency", or "fused"
  MetricsReport report;
};

/// Scores every model on `images` (already decoded RGB) and, with exactly two
/// models, the fused prediction as well.
std::vector<NamedReport> evaluate_images(std::span<const ModelParams> models,
                                         std::span<const PlanarImage> images,
                                         std::span<const Label> labels, double threshold = 0.5,
                                         int workers = 1);

/// Decodes the dataset and calls evaluate_images.
std::vector<NamedReport> evaluate_dataset(std::span<const ModelParams> models, const LabeledDataset& data,
                                          double threshold = 0.5, int workers = 1);

struct RobustnessConfig {
  std::vector<double> blur_sigmas{3, 5, 7, 9, 11};
  std::vector<int> jpeg_qualities{85, 87, 90, 92, 95};

  void validate() const;
  friend bool operator==(const RobustnessConfig&, const RobustnessConfig&) = default;
};

enum class PerturbationKind { kNone, kBlur, kJpeg };
std::string to_string(PerturbationKind kind);

struct SweepRow {
  PerturbationKind kind = PerturbationKind::kNone;
  double value = 0.0;  ///< sigma or quality; 0 for the clean row
  std::string model;
  MetricsReport report;
};

/// Clean row first, then every blur sigma, then every JPEG quality; each
/// perturbation row is repeated for every model and the fusion. Only copies
/// of the test images are perturbed.
std::vector<SweepRow> robustness_sweep(std::span<const ModelParams> models, const LabeledDataset& test,
                                       const RobustnessConfig& rcfg, double threshold = 0.5,
                                       int workers = 1);

}  // namespace fakedet
