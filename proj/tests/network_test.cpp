#include "fakedet/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fakedet/error.hpp"
#include "fakedet/optimizer.hpp"
#include "oracles.hpp"

namespace fakedet {
namespace {

NetworkSpec one_block_spec() {
  NetworkSpec spec;
  spec.input_channels = 3;
  spec.stem_width = 4;
  spec.block_widths = {6};
  return spec;
}

TEST(NetworkSpecTest, LayoutAndCounts) {
  NetworkSpec spec;
  spec.input_channels = 18;
  const auto layout = parameter_layout(spec);
  EXPECT_EQ(layout.front().name, "stem.weight");
  EXPECT_EQ(layout.front().tensor.shape, (std::vector<int>{16, 18, 3, 3}));
  EXPECT_EQ(layout.back().name, "head.bias");
  EXPECT_EQ(layout.back().tensor.shape, (std::vector<int>{2}));
  EXPECT_EQ(layout[layout.size() - 2].tensor.shape, (std::vector<int>{2, 64}));
  std::size_t total = 0;
  bool has_proj0 = false, has_proj1 = false;
  for (const auto& t : layout) {
    std::size_t n = 1;
    for (int d : t.tensor.shape) n *= static_cast<std::size_t>(d);
    total += n;
    has_proj0 |= t.name == "block0.proj.weight";
    has_proj1 |= t.name == "block1.proj.weight";
  }
  EXPECT_FALSE(has_proj0);
  EXPECT_TRUE(has_proj1);
  EXPECT_EQ(total, spec.parameter_count());
  EXPECT_EQ(spec.downsample_factor(), 4);
  EXPECT_EQ(one_block_spec().downsample_factor(), 2);
  EXPECT_TRUE(is_decayed("block1.proj.weight"));
  EXPECT_FALSE(is_decayed("head.bias"));

  NetworkSpec bad;
  bad.block_widths = {};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(InitParamsTest, DeterministicZeroBiasesAndBounded) {
  const NetworkSpec spec;
  const ModelParams a = init_params(spec, 7), b = init_params(spec, 7), c = init_params(spec, 8);
  EXPECT_EQ(a.tensors, b.tensors);
  EXPECT_NE(a.tensors, c.tensors);
  EXPECT_NO_THROW(a.check_shapes());
  for (const auto& t : a.tensors) {
    if (!is_decayed(t.name)) {
      for (double v : t.tensor.values) EXPECT_EQ(v, 0.0) << t.name;
      continue;
    }
    const auto& s = t.tensor.shape;
    const double fan_in = s.size() == 4 ? static_cast<double>(s[1]) * s[2] * s[3] : s[1];
    const double bound = t.name == "head.weight" ? 1.0 / std::sqrt(fan_in) : std::sqrt(6.0 / fan_in);
    for (double v : t.tensor.values) ASSERT_LE(std::abs(v), bound) << t.name;
  }
  EXPECT_EQ(a.tensor("stem.weight").shape, (std::vector<int>{16, 3, 3, 3}));
}

TEST(ForwardTest, ShapesAndPerSampleIndependence) {
  std::mt19937_64 rng(41);
  const ModelParams params = init_params(NetworkSpec{}, 1);
  std::vector<PlanarImage> batch;
  for (int i = 0; i < 24; ++i) batch.push_back(oracle::random_image(rng, 16, 16, 3));
  const auto all = forward(params, batch);
  ASSERT_EQ(all.size(), 24u);
  for (int i : {0, 5, 23}) {
    const auto single = forward(params, std::span<const PlanarImage>(&batch[i], 1));
    EXPECT_NEAR(single[0][0], all[i][0], 1e-12);
    EXPECT_NEAR(single[0][1], all[i][1], 1e-12);
  }
  const auto threaded = forward(params, batch, Precision::kFloat64, 3);
  EXPECT_EQ(threaded, all);
  const auto f32 = forward(params, batch, Precision::kFloat32);
  for (int i = 0; i < 24; ++i) EXPECT_NEAR(f32[i][0], all[i][0], 1e-4);
}

TEST(ForwardTest, ZeroInputWithZeroHeadGivesZeroLogits) {
  ModelParams params = init_params(NetworkSpec{}, 2);
  for (double& v : params.tensor("head.weight").values) v = 0.0;
  const std::vector<PlanarImage> batch{PlanarImage(8, 8, 3)};
  const auto logits = forward(params, batch);
  EXPECT_EQ(logits[0][0], 0.0);
  EXPECT_EQ(logits[0][1], 0.0);
}

TEST(ForwardTest, RejectsShapeMismatch) {
  const ModelParams params = init_params(NetworkSpec{}, 3);
  const std::vector<PlanarImage> wrong_channels{PlanarImage(8, 8, 18)};
  EXPECT_THROW(forward(params, wrong_channels), Error);
  const std::vector<PlanarImage> wrong_size{PlanarImage(10, 8, 3)};
  try {
    forward(params, wrong_size);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(LossTest, UniformLogitsGiveLn2) {
  ModelParams params = init_params(one_block_spec(), 4);
  for (double& v : params.tensor("head.weight").values) v = 0.0;
  std::mt19937_64 rng(42);
  const std::vector<PlanarImage> batch{oracle::random_image(rng, 8, 8, 3), oracle::random_image(rng, 8, 8, 3)};
  const std::vector<Label> labels{Label::kReal, Label::kFake};
  const auto r = loss_and_grad(params, batch, labels, 0.0);
  EXPECT_NEAR(r.data_loss, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
}

TEST(LossTest, WeightDecayTermIsAdditive) {
  const ModelParams params = init_params(one_block_spec(), 5);
  std::mt19937_64 rng(43);
  const std::vector<PlanarImage> batch{oracle::random_image(rng, 8, 8, 3)};
  const std::vector<Label> labels{Label::kFake};
  const auto plain = loss_and_grad(params, batch, labels, 0.0);
  const auto decayed = loss_and_grad(params, batch, labels, 0.1);
  double sq = 0.0;
  for (const auto& t : params.tensors)
    if (is_decayed(t.name))
      for (double v : t.tensor.values) sq += v * v;
  EXPECT_NEAR(decayed.loss - plain.loss, 0.05 * sq, 1e-12);
  EXPECT_EQ(decayed.data_loss, plain.data_loss);
  for (std::size_t k = 0; k < params.tensors.size(); ++k)
    for (std::size_t i = 0; i < params.tensors[k].tensor.numel(); ++i) {
      const double expected = plain.grads[k].values[i] +
                              (is_decayed(params.tensors[k].name) ? 0.1 * params.tensors[k].tensor.values[i] : 0.0);
      ASSERT_NEAR(decayed.grads[k].values[i], expected, 1e-12);
    }
}

// Central differences on every parameter of a one-block network, step 1e-5.
// The error of a tensor is ||g - g_fd|| / max(||g||, ||g_fd||).
TEST(GradientTest, MatchesFiniteDifferencesOnEveryTensor) {
  std::mt19937_64 rng(44);
  ModelParams params = init_params(one_block_spec(), 6);
  for (auto& t : params.tensors)
    if (!is_decayed(t.name))
      for (double& v : t.tensor.values) v = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
  const std::vector<PlanarImage> batch{oracle::random_image(rng, 8, 8, 3, -1.0, 1.0),
                                       oracle::random_image(rng, 8, 8, 3, -1.0, 1.0)};
  const std::vector<Label> labels{Label::kReal, Label::kFake};
  const double wd = 5e-4;
  const auto analytic = loss_and_grad(params, batch, labels, wd);
  const double h = 1e-5;
  for (std::size_t k = 0; k < params.tensors.size(); ++k) {
    auto& values = params.tensors[k].tensor.values;
    double diff = 0.0, na = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss_and_grad(params, batch, labels, wd).loss;
      values[i] = saved - h;
      const double down = loss_and_grad(params, batch, labels, wd).loss;
      values[i] = saved;
      const double fd = (up - down) / (2 * h);
      const double g = analytic.grads[k].values[i];
      diff += (g - fd) * (g - fd);
      na += g * g;
      nf += fd * fd;
    }
    const double rel = std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nf), 1e-300});
    EXPECT_LT(rel, 1e-5) << params.tensors[k].name;
  }
}

TEST(GradientTest, IndependentOfWorkerCount) {
  std::mt19937_64 rng(45);
  const ModelParams params = init_params(NetworkSpec{}, 7);
  std::vector<PlanarImage> batch;
  std::vector<Label> labels;
  for (int i = 0; i < 6; ++i) {
    batch.push_back(oracle::random_image(rng, 16, 16, 3));
    labels.push_back(i % 2 ? Label::kFake : Label::kReal);
  }
  const auto a = loss_and_grad(params, batch, labels, 5e-4, Precision::kFloat64, 1);
  const auto b = loss_and_grad(params, batch, labels, 5e-4, Precision::kFloat64, 4);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grads, b.grads);
}

TEST(SoftmaxTest, Properties) {
  const auto half = softmax({0.0, 0.0});
  EXPECT_EQ(half.p_real, 0.5);
  EXPECT_EQ(half.p_fake, 0.5);
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 1000; ++i) {
    const double l = u(rng), c = u(rng);
    const auto p = softmax({l, l + c});
    ASSERT_NEAR(p.p_fake, 1.0 / (1.0 + std::exp(-c)), 1e-12);
    ASSERT_NEAR(p.p_real + p.p_fake, 1.0, 1e-12);
    const auto shifted = softmax({l + 100.0, l + c + 100.0});
    ASSERT_NEAR(shifted.p_fake, p.p_fake, 1e-12);
  }
  const auto extreme = softmax({-1000.0, 1000.0});
  EXPECT_EQ(extreme.p_fake, 1.0);
  EXPECT_EQ(extreme.p_real, 0.0);
}

TEST(PredictTest, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(47);
  ModelParams params = init_params(NetworkSpec{}, 8);
  for (int i = 0; i < 10; ++i) {
    const auto p = predict_proba(params, oracle::random_image(rng, 16, 16, 3));
    EXPECT_NEAR(p.p_real + p.p_fake, 1.0, 1e-12);
    EXPECT_GE(p.p_fake, 0.0);
    EXPECT_LE(p.p_fake, 1.0);
  }
  EXPECT_THROW(predict_proba(params, PlanarImage(16, 16, 1)), Error);
}

TEST(AdamTest, ZeroGradientLeavesParameters) {
  std::vector<double> w{1.0, -2.0, 3.0};
  const std::vector<double> g{0.0, 0.0, 0.0};
  AdamState state;
  state.m = {std::vector<double>(3, 0.0)};
  state.v = {std::vector<double>(3, 0.0)};
  adam_update({&w}, {&g}, state, AdamHyper{});
  EXPECT_EQ(w, (std::vector<double>{1.0, -2.0, 3.0}));
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  std::vector<double> w{1.0};
  const std::vector<double> g{1.0};
  AdamState state;
  state.m = {{0.0}};
  state.v = {{0.0}};
  AdamHyper hyper;
  hyper.learning_rate = 1e-3;
  hyper.eps = 0.0;
  adam_update({&w}, {&g}, state, hyper);
  EXPECT_NEAR(w[0], 1.0 - 1e-3, 1e-15);
  EXPECT_EQ(state.step, 1);
}

TEST(AdamTest, DescendsQuadratic) {
  std::vector<double> w{1.0};
  AdamState state;
  state.m = {{0.0}};
  state.v = {{0.0}};
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> g{2.0 * w[0]};
    adam_update({&w}, {&g}, state, hyper);
  }
  EXPECT_LT(std::abs(w[0]), 0.1);
}

TEST(AdamTest, StepOnModelParams) {
  ModelParams params = init_params(one_block_spec(), 9);
  std::vector<Tensor> grads;
  for (const auto& t : params.tensors) grads.push_back(Tensor{t.tensor.shape, std::vector<double>(t.tensor.numel(), 1.0)});
  std::vector<Tensor> plain;
  for (const auto& t : params.tensors) plain.push_back(t.tensor);
  AdamState state = AdamState::zeros_like(plain);
  const ModelParams before = params;
  adam_step(params, grads, state, AdamHyper{});
  for (std::size_t k = 0; k < params.tensors.size(); ++k)
    for (std::size_t i = 0; i < params.tensors[k].tensor.numel(); ++i)
      ASSERT_NEAR(params.tensors[k].tensor.values[i], before.tensors[k].tensor.values[i] - 1e-4 / (1.0 + 1e-8), 1e-15);
}

}  // namespace
}  // namespace fakedet
