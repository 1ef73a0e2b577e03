#pragma once

#include <cstdint>
#include <vector>

#include "fakedet/network.hpp"

namespace fakedet {

struct AdamHyper {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First and second moment estimates, shaped like the parameters.
struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState zeros_like(const std::vector<Tensor>& params);
};

/// Bias-corrected Adam update of `values` in place. Any L2 term is expected
/// to already be folded into `grads`.
void adam_update(std::vector<std::vector<double>*> values, const std::vector<const std::vector<double>*>& grads,
                 AdamState& state, const AdamHyper& hyper);

/// Convenience wrapper over the model's named tensors.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamHyper& hyper);

}  // namespace fakedet
