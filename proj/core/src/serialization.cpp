#include "fakedet/serialization.hpp"

#include "fakedet/error.hpp"

namespace fakedet {

using nlohmann::json;

namespace {

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const SynthConfig& c) {
  j = json{{"size", c.size},
           {"base_smoothness", c.base_smoothness},
           {"artifact_amplitude", c.artifact_amplitude},
           {"upsample_factor", c.upsample_factor},
           {"seed", c.seed}};
}

void from_json(const json& j, SynthConfig& c) {
  read_opt(j, "size", c.size);
  read_opt(j, "base_smoothness", c.base_smoothness);
  read_opt(j, "artifact_amplitude", c.artifact_amplitude);
  read_opt(j, "upsample_factor", c.upsample_factor);
  read_opt(j, "seed", c.seed);
}

void to_json(json& j, const AugmentConfig& c) {
  j = json{{"probability", c.probability},
           {"blur_sigma_range", {c.blur_sigma_range.first, c.blur_sigma_range.second}},
           {"jpeg_quality_range", {c.jpeg_quality_range.first, c.jpeg_quality_range.second}},
           {"seed", c.seed}};
}

void from_json(const json& j, AugmentConfig& c) {
  read_opt(j, "probability", c.probability);
  if (j.contains("blur_sigma_range")) {
    const auto& r = j.at("blur_sigma_range");
    c.blur_sigma_range = {r.at(0).get<double>(), r.at(1).get<double>()};
  }
  if (j.contains("jpeg_quality_range")) {
    const auto& r = j.at("jpeg_quality_range");
    c.jpeg_quality_range = {r.at(0).get<int>(), r.at(1).get<int>()};
  }
  read_opt(j, "seed", c.seed);
}

void to_json(json& j, const TransformConfig& c) {
  j = json{{"colorspace", to_string(c.colorspace)},
           {"chroma", c.chroma == ChromaConvention::kBt601 ? "bt601" : "swapped"},
           {"transforms", c.transforms_string()},
           {"block_size", c.block.to_string()}};
}

void from_json(const json& j, TransformConfig& c) {
  if (j.contains("colorspace")) c.colorspace = parse_colorspace(j.at("colorspace").get<std::string>());
  if (j.contains("chroma")) {
    const auto s = j.at("chroma").get<std::string>();
    require(s == "bt601" || s == "swapped", ErrorKind::kInvalidConfig, "unknown chroma convention " + s);
    c.chroma = s == "bt601" ? ChromaConvention::kBt601 : ChromaConvention::kSwapped;
  }
  if (j.contains("transforms")) c.set_transforms(j.at("transforms").get<std::string>());
  if (j.contains("block_size")) {
    const auto& b = j.at("block_size");
    c.block = b.is_number() ? BlockSize(b.get<int>()) : BlockSize::parse(b.get<std::string>());
  }
}

void to_json(json& j, const NetworkSpec& c) {
  j = json{{"input_channels", c.input_channels},
           {"stem_width", c.stem_width},
           {"block_widths", c.block_widths}};
}

void from_json(const json& j, NetworkSpec& c) {
  read_opt(j, "input_channels", c.input_channels);
  read_opt(j, "stem_width", c.stem_width);
  read_opt(j, "block_widths", c.block_widths);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"learning_rate", c.learning_rate},
           {"weight_decay", c.weight_decay},
           {"batch_size", c.batch_size},
           {"epochs", c.epochs},
           {"adam_beta1", c.adam_beta1},
           {"adam_beta2", c.adam_beta2},
           {"adam_eps", c.adam_eps},
           {"seed", c.seed},
           {"precision", c.precision == Precision::kFloat64 ? "f64" : "f32"},
           {"workers", c.workers},
           {"network", c.network}};
}

void from_json(const json& j, TrainConfig& c) {
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "weight_decay", c.weight_decay);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "epochs", c.epochs);
  read_opt(j, "adam_beta1", c.adam_beta1);
  read_opt(j, "adam_beta2", c.adam_beta2);
  read_opt(j, "adam_eps", c.adam_eps);
  read_opt(j, "seed", c.seed);
  if (j.contains("precision")) {
    const auto s = j.at("precision").get<std::string>();
    require(s == "f64" || s == "f32", ErrorKind::kInvalidConfig, "precision must be f64 or f32");
    c.precision = s == "f64" ? Precision::kFloat64 : Precision::kFloat32;
  }
  read_opt(j, "workers", c.workers);
  read_opt(j, "network", c.network);
}

void to_json(json& j, const RobustnessConfig& c) {
  j = json{{"blur_sigmas", c.blur_sigmas}, {"jpeg_qualities", c.jpeg_qualities}};
}

void from_json(const json& j, RobustnessConfig& c) {
  read_opt(j, "blur_sigmas", c.blur_sigmas);
  read_opt(j, "jpeg_qualities", c.jpeg_qualities);
}

void to_json(json& j, const ChannelNormalizer& c) {
  j = json{{"mean", c.mean}, {"std", c.std}};
}

void from_json(const json& j, ChannelNormalizer& c) {
  read_opt(j, "mean", c.mean);
  read_opt(j, "std", c.std);
  require(c.mean.size() == c.std.size(), ErrorKind::kInvalidConfig, "normalizer mean/std length mismatch");
}

void to_json(json& j, const EpochRecord& r) {
  j = json{{"epoch", r.epoch},
           {"train_loss", r.train_loss},
           {"train_accuracy", r.train_accuracy},
           {"val_accuracy", r.val_accuracy}};
}

void from_json(const json& j, EpochRecord& r) {
  read_opt(j, "epoch", r.epoch);
  read_opt(j, "train_loss", r.train_loss);
  read_opt(j, "train_accuracy", r.train_accuracy);
  read_opt(j, "val_accuracy", r.val_accuracy);
}

}  // namespace fakedet
