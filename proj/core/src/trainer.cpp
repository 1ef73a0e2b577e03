#include "fakedet/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "fakedet/error.hpp"
#include "fakedet/evaluation.hpp"
#include "fakedet/parallel.hpp"
#include "fakedet/rng.hpp"
#include "fakedet/serialization.hpp"

namespace fakedet {

void TrainConfig::validate() const {
  require(learning_rate > 0.0 && weight_decay >= 0.0, ErrorKind::kInvalidConfig,
          "learning rate must be positive and weight decay non-negative");
  require(batch_size >= 1, ErrorKind::kInvalidConfig, "batch_size must be >= 1");
  require(epochs >= 0, ErrorKind::kInvalidConfig, "epochs must be >= 0");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_eps > 0.0,
          ErrorKind::kInvalidConfig, "Adam moment coefficients out of range");
  require(workers >= 1, ErrorKind::kInvalidConfig, "workers must be >= 1");
}

namespace {

std::vector<PlanarImage> decode_all(const LabeledDataset& ds, int workers) {
  std::vector<PlanarImage> out(ds.size());
  parallel_for(ds.size(), workers, [&](std::size_t i) { out[i] = load_sample(ds.items[i]); });
  return out;
}

std::vector<Label> labels_of(const LabeledDataset& ds) {
  std::vector<Label> out;
  out.reserve(ds.size());
  for (const auto& s : ds.items) out.push_back(s.label);
  return out;
}

double accuracy_of(const std::vector<Logits>& logits, std::span<const Label> labels) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (decide(softmax(logits[i])) == labels[i]) ++hits;
  }
  return logits.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(logits.size());
}

}  // namespace

TrainResult train_stream(StreamKind kind, const LabeledDataset& train, const LabeledDataset& val,
                         const TrainConfig& tcfg, const TransformConfig& xcfg,
                         const AugmentConfig& acfg, const EpochCallback& on_epoch) {
  tcfg.validate();
  acfg.validate();
  require(!train.empty(), ErrorKind::kTraining, "training set is empty");
  require(!val.empty(), ErrorKind::kTraining, "validation set is empty");
  const int workers = tcfg.workers;

  const std::vector<PlanarImage> train_images = decode_all(train, workers);
  const std::vector<PlanarImage> val_images = decode_all(val, workers);
  const std::vector<Label> train_labels = labels_of(train);
  const std::vector<Label> val_labels = labels_of(val);

  NetworkSpec spec = tcfg.network;
  spec.input_channels = kind == StreamKind::kSpatial ? 3 : xcfg.output_channels();
  ModelParams params = init_params(spec, tcfg.seed);
  params.kind = kind;
  params.transform = xcfg;
  params.augment = acfg;

  if (kind == StreamKind::kFrequency) {
    std::vector<PlanarImage> cubes(train_images.size());
    parallel_for(train_images.size(), workers, [&](std::size_t i) {
      cubes[i] = assemble_frequency_cube(train_images[i], xcfg).data;
    });
    NormalizerAccumulator acc;
    for (const auto& c : cubes) acc.add(c);
    params.normalizer = acc.finish();
  }

  std::vector<PlanarImage> val_inputs(val_images.size());
  parallel_for(val_images.size(), workers,
               [&](std::size_t i) { val_inputs[i] = prepare_input(params, val_images[i]); });
  auto val_accuracy = [&](const ModelParams& p) {
    return accuracy_of(forward(p, val_inputs, tcfg.precision, workers), val_labels);
  };

  TrainResult result;
  EpochRecord initial;
  initial.val_accuracy = val_accuracy(params);
  result.history.push_back(initial);
  if (on_epoch) on_epoch(initial);
  result.params = params;
  double best_accuracy = initial.val_accuracy;

  AdamState state = AdamState::zeros_like([&] {
    std::vector<Tensor> t;
    for (const auto& nt : params.tensors) t.push_back(nt.tensor);
    return t;
  }());
  const AdamHyper hyper = tcfg.adam();
  const std::size_t n = train_images.size();
  std::vector<std::size_t> order(n);

  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = derive_rng(tcfg.seed, {0x5F1Eull, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(tcfg.batch_size));
      const std::size_t b = end - start;
      std::vector<PlanarImage> inputs(b);
      std::vector<Label> labels(b);
      parallel_for(b, workers, [&](std::size_t k) {
        const std::size_t idx = order[start + k];
        Rng rng = augment_rng(acfg, static_cast<std::uint64_t>(epoch), idx);
        inputs[k] = prepare_input(params, augment(train_images[idx], acfg, rng));
      });
      for (std::size_t k = 0; k < b; ++k) labels[k] = train_labels[order[start + k]];

      const LossAndGrad lg = loss_and_grad(params, inputs, labels, tcfg.weight_decay, tcfg.precision, workers);
      adam_step(params, lg.grads, state, hyper);
      loss_sum += lg.data_loss * static_cast<double>(b);
      for (std::size_t k = 0; k < b; ++k)
        if (decide(softmax(lg.logits[k])) == labels[k]) ++hits;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(n);
    record.train_accuracy = static_cast<double>(hits) / static_cast<double>(n);
    record.val_accuracy = val_accuracy(params);
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (record.val_accuracy > best_accuracy) {
      best_accuracy = record.val_accuracy;
      result.best_epoch = epoch;
      result.params = params;
    }
  }

  result.params.metadata = nlohmann::json{
      {"stream", to_string(kind)},
      {"best_epoch", result.best_epoch},
      {"best_val_accuracy", best_accuracy},
      {"train_config", tcfg},
      {"history", result.history},
      {"train_size", train.size()},
      {"val_size", val.size()},
  };
  return result;
}

}  // namespace fakedet
