#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakedet/augmentation.hpp"
#include "fakedet/corpus.hpp"
#include "fakedet/image.hpp"
#include "fakedet/transforms.hpp"

namespace fakedet {

/// Compact residual classifier.
///
///   stem:   3x3 conv (input_channels -> stem_width) + bias, ReLU
///   blocks: for each width w in block_widths, a basic block of two 3x3
///           convs with bias; when w differs from the previous width the
///           first conv has stride 2 and the skip path is a stride-2 1x1
///           projection, otherwise the skip is the identity. ReLU after the
///           sum.
///   head:   global average pool, then an affine map to 2 logits.
///
/// There is no batch statistic anywhere, so each sample's logits depend
/// only on that sample.
struct NetworkSpec {
  int input_channels = 3;
  int stem_width = 16;
  std::vector<int> block_widths{16, 32, 64};

  void validate() const;
  /// Product of all block strides; H and W must be divisible by it.
  int downsample_factor() const;
  std::size_t parameter_count() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;

  std::size_t numel() const noexcept { return values.size(); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
  friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// Names and shapes in canonical order, e.g. "stem.weight" (16, C, 3, 3),
/// "block0.conv1.bias" (16), "block1.proj.weight" (32, 16, 1, 1),
/// "head.weight" (2, 64).
std::vector<NamedTensor> parameter_layout(const NetworkSpec& spec);

/// Convolution and affine weights carry weight decay; biases do not.
bool is_decayed(const std::string& name);

enum class StreamKind { kSpatial, kFrequency };
std::string to_string(StreamKind kind);
StreamKind parse_stream_kind(const std::string& text);

enum class Precision { kFloat64, kFloat32 };

struct ModelParams {
  StreamKind kind = StreamKind::kSpatial;
  NetworkSpec spec;
  std::vector<NamedTensor> tensors;
  /// Attached preprocessing; normalizer is empty for spatial models.
  TransformConfig transform;
  AugmentConfig augment;
  ChannelNormalizer normalizer;
  /// Free-form training record (history, best epoch, configs).
  nlohmann::json metadata = nlohmann::json::object();

  const Tensor& tensor(const std::string& name) const;
  Tensor& tensor(const std::string& name);

  /// Throws kInvalidInput if tensor names or shapes disagree with spec.
  void check_shapes() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Fan-in scaled uniform weights (He-uniform for convolutions,
/// 1/sqrt(fan_in) for the head), zero biases. Deterministic in seed.
ModelParams init_params(const NetworkSpec& spec, std::uint64_t seed);

using Logits = std::array<double, 2>;

/// Logits for every image in the batch. Each input is H x W x C with C equal
/// to spec.input_channels and H, W divisible by spec.downsample_factor().
std::vector<Logits> forward(const ModelParams& params, std::span<const PlanarImage> batch,
                            Precision precision = Precision::kFloat64, int workers = 1);

struct LossAndGrad {
  double loss = 0.0;        ///< cross-entropy + L2 term
  double data_loss = 0.0;   ///< mean cross-entropy alone
  std::vector<Tensor> grads;  ///< same order and shapes as params.tensors
  std::vector<Logits> logits;  ///< per-sample forward outputs
};

/// Mean softmax cross-entropy plus (weight_decay / 2) * sum of squared
/// decayed weights, with the exact analytic gradient. Per-sample gradients
/// are reduced in sample order, so the result is independent of `workers`.
LossAndGrad loss_and_grad(const ModelParams& params, std::span<const PlanarImage> batch,
                          std::span<const Label> labels, double weight_decay,
                          Precision precision = Precision::kFloat64, int workers = 1);

struct ProbPair {
  double p_real = 0.5;
  double p_fake = 0.5;
};

ProbPair softmax(const Logits& logits);

/// Builds the network input for one pixel-domain RGB image according to the
/// model's stream kind: the image itself (spatial) or its normalized
/// frequency cube (frequency).
PlanarImage prepare_input(const ModelParams& params, const PlanarImage& rgb);

/// prepare_input + forward + softmax.
ProbPair predict_proba(const ModelParams& params, const PlanarImage& rgb,
                       Precision precision = Precision::kFloat64);

/// Softmax over the logits of already-prepared inputs.
std::vector<ProbPair> predict_prepared(const ModelParams& params, std::span<const PlanarImage> inputs,
                                       Precision precision = Precision::kFloat64, int workers = 1);

}  // namespace fakedet
