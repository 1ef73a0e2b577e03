#include "fakedet/optimizer.hpp"

#include <cmath>

#include "fakedet/error.hpp"

namespace fakedet {

AdamState AdamState::zeros_like(const std::vector<Tensor>& params) {
  AdamState s;
  for (const auto& t : params) {
    s.m.emplace_back(t.numel(), 0.0);
    s.v.emplace_back(t.numel(), 0.0);
  }
  return s;
}

void adam_update(std::vector<std::vector<double>*> values, const std::vector<const std::vector<double>*>& grads,
                 AdamState& state, const AdamHyper& hyper) {
  require(values.size() == grads.size() && values.size() == state.m.size() &&
              values.size() == state.v.size(),
          ErrorKind::kInvalidInput, "optimizer state does not match parameters");
  ++state.step;
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < values.size(); ++k) {
    auto& w = *values[k];
    const auto& g = *grads[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    require(w.size() == g.size() && w.size() == m.size() && w.size() == v.size(),
            ErrorKind::kInvalidInput, "optimizer tensor size mismatch");
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g[j];
      v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g[j] * g[j];
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      w[j] -= hyper.learning_rate * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamHyper& hyper) {
  require(grads.size() == params.tensors.size(), ErrorKind::kInvalidInput,
          "gradient count does not match parameters");
  std::vector<std::vector<double>*> values;
  std::vector<const std::vector<double>*> g;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    values.push_back(&params.tensors[k].tensor.values);
    g.push_back(&grads[k].values);
  }
  adam_update(std::move(values), g, state, hyper);
}

}  // namespace fakedet
