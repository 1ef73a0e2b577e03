#include "fakedet/evaluation.hpp"

#include <cmath>
#include <string>

#include "fakedet/augmentation.hpp"
#include "fakedet/error.hpp"
#include "fakedet/parallel.hpp"

namespace fakedet {

namespace {

void require_simplex(const ProbPair& p, const char* which) {
  const bool ok = std::isfinite(p.p_real) && std::isfinite(p.p_fake) && p.p_real >= 0.0 &&
                  p.p_fake >= 0.0 && std::abs(p.p_real + p.p_fake - 1.0) <= 1e-9;
  require(ok, ErrorKind::kInvalidInput,
          std::string(which) + " probabilities (" + std::to_string(p.p_real) + ", " +
              std::to_string(p.p_fake) + ") are not a probability pair");
}

ClassF1 f1_for(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  if (tp + fp == 0 || tp + fn == 0) return {0.0, true};
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0.0) return {0.0, true};
  return {2.0 * precision * recall / (precision + recall), false};
}

}  // namespace

ProbPair fuse_probabilities(const ProbPair& spatial, const ProbPair& frequency) {
  require_simplex(spatial, "spatial");
  require_simplex(frequency, "frequency");
  const double real = 0.5 * (spatial.p_real + frequency.p_real);
  const double fake = 0.5 * (spatial.p_fake + frequency.p_fake);
  const double total = real + fake;
  return ProbPair{real / total, fake / total};
}

Label decide(const ProbPair& p, double threshold) {
  return p.p_fake > threshold ? Label::kFake : Label::kReal;
}

MetricsReport compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  require(truth.size() == predicted.size(), ErrorKind::kEvaluation, "label and prediction counts differ");
  require(!truth.empty(), ErrorKind::kEvaluation, "cannot score an empty set");
  MetricsReport r;
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++r.confusion[static_cast<int>(truth[i])][static_cast<int>(predicted[i])];
  r.n = static_cast<std::int64_t>(truth.size());
  const auto& c = r.confusion;
  r.accuracy = static_cast<double>(c[0][0] + c[1][1]) / static_cast<double>(r.n);
  r.f1_fake = f1_for(c[1][1], c[0][1], c[1][0]);
  r.f1_real = f1_for(c[0][0], c[1][0], c[0][1]);
  return r;
}

std::vector<NamedReport> evaluate_images(std::span<const ModelParams> models,
                                         std::span<const PlanarImage> images,
                                         std::span<const Label> labels, double threshold, int workers) {
  require(!images.empty(), ErrorKind::kEvaluation, "evaluation set is empty");
  require(images.size() == labels.size(), ErrorKind::kEvaluation, "image and label counts differ");
  require(models.size() == 1 || models.size() == 2, ErrorKind::kEvaluation,
          "evaluation takes one or two models");

  std::vector<std::vector<ProbPair>> probs;
  for (const auto& model : models) {
    std::vector<PlanarImage> inputs(images.size());
    parallel_for(images.size(), workers, [&](std::size_t i) { inputs[i] = prepare_input(model, images[i]); });
    probs.push_back(predict_prepared(model, inputs, Precision::kFloat64, workers));
  }

  std::vector<NamedReport> out;
  std::vector<Label> predicted(images.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t i = 0; i < images.size(); ++i) predicted[i] = decide(probs[m][i], threshold);
    out.push_back({to_string(models[m].kind), compute_metrics(labels, predicted)});
  }
  if (models.size() == 2) {
    for (std::size_t i = 0; i < images.size(); ++i)
      predicted[i] = decide(fuse_probabilities(probs[0][i], probs[1][i]), threshold);
    out.push_back({"fused", compute_metrics(labels, predicted)});
  }
  return out;
}

namespace {

std::vector<PlanarImage> decode(const LabeledDataset& data, int workers) {
  std::vector<PlanarImage> images(data.size());
  parallel_for(data.size(), workers, [&](std::size_t i) { images[i] = load_sample(data.items[i]); });
  return images;
}

std::vector<Label> labels_of(const LabeledDataset& data) {
  std::vector<Label> labels;
  for (const auto& s : data.items) labels.push_back(s.label);
  return labels;
}

}  // namespace

std::vector<NamedReport> evaluate_dataset(std::span<const ModelParams> models, const LabeledDataset& data,
                                          double threshold, int workers) {
  require(!data.empty(), ErrorKind::kEvaluation, "evaluation set is empty");
  const auto images = decode(data, workers);
  const auto labels = labels_of(data);
  return evaluate_images(models, images, labels, threshold, workers);
}

void RobustnessConfig::validate() const {
  for (double s : blur_sigmas)
    require(s >= 0.1, ErrorKind::kInvalidConfig, "blur sigmas must be >= 0.1");
  for (int q : jpeg_qualities)
    require(q >= 1 && q <= 100, ErrorKind::kInvalidConfig, "JPEG qualities must lie in [1, 100]");
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kNone: return "none";
    case PerturbationKind::kBlur: return "blur";
    case PerturbationKind::kJpeg: return "jpeg";
  }
  return "none";
}

std::vector<SweepRow> robustness_sweep(std::span<const ModelParams> models, const LabeledDataset& test,
                                       const RobustnessConfig& rcfg, double threshold, int workers) {
  rcfg.validate();
  require(!test.empty(), ErrorKind::kEvaluation, "test set is empty");
  const std::vector<PlanarImage> clean = decode(test, workers);
  const std::vector<Label> labels = labels_of(test);

  std::vector<SweepRow> rows;
  auto run = [&](PerturbationKind kind, double value, const std::vector<PlanarImage>& images) {
    for (auto& nr : evaluate_images(models, images, labels, threshold, workers))
      rows.push_back({kind, value, std::move(nr.model), nr.report});
  };
  run(PerturbationKind::kNone, 0.0, clean);

  std::vector<PlanarImage> perturbed(clean.size());
  for (double sigma : rcfg.blur_sigmas) {
    parallel_for(clean.size(), workers, [&](std::size_t i) { perturbed[i] = gaussian_blur(clean[i], sigma); });
    run(PerturbationKind::kBlur, sigma, perturbed);
  }
  for (int quality : rcfg.jpeg_qualities) {
    parallel_for(clean.size(), workers, [&](std::size_t i) { perturbed[i] = jpeg_roundtrip(clean[i], quality); });
    run(PerturbationKind::kJpeg, static_cast<double>(quality), perturbed);
  }
  return rows;
}

}  // namespace fakedet
