#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fakedet/augmentation.hpp"
#include "fakedet/corpus.hpp"
#include "fakedet/network.hpp"
#include "fakedet/optimizer.hpp"
#include "fakedet/transforms.hpp"

namespace fakedet {

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 5e-4;
  int batch_size = 24;
  int epochs = 24;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  Precision precision = Precision::kFloat64;
  int workers = 1;
  /// Backbone widths; input_channels is filled in from the stream kind.
  NetworkSpec network;

  void validate() const;
  AdamHyper adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
  int epoch = 0;  ///< 0 is the untrained initialization
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;  ///< best-validation parameters
  int best_epoch = 0;
  std::vector<EpochRecord> history;
};

/// Optional per-epoch progress hook.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Trains one stream. Spatial models see augmented RGB pixels; frequency
/// models see normalized cubes of augmented pixels, with the normalizer
/// fitted once on the un-augmented training set. Validation accuracy is
/// measured before training and after every epoch; the parameters of the
/// first best epoch are returned.
TrainResult train_stream(StreamKind kind, const LabeledDataset& train, const LabeledDataset& val,
                         const TrainConfig& tcfg, const TransformConfig& xcfg,
                         const AugmentConfig& acfg, const EpochCallback& on_epoch = {});

}  // namespace fakedet
