#include "fakedet/network.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "fakedet/error.hpp"
#include "fakedet/parallel.hpp"
#include "fakedet/rng.hpp"

namespace fakedet {

void NetworkSpec::validate() const {
  require(input_channels > 0, ErrorKind::kInvalidConfig, "input_channels must be positive");
  require(stem_width > 0, ErrorKind::kInvalidConfig, "stem_width must be positive");
  require(!block_widths.empty(), ErrorKind::kInvalidConfig, "at least one residual block is required");
  for (int w : block_widths) require(w > 0, ErrorKind::kInvalidConfig, "block widths must be positive");
}

int NetworkSpec::downsample_factor() const {
  int factor = 1;
  int prev = stem_width;
  for (int w : block_widths) {
    if (w != prev) factor *= 2;
    prev = w;
  }
  return factor;
}

std::vector<NamedTensor> parameter_layout(const NetworkSpec& spec) {
  spec.validate();
  std::vector<NamedTensor> out;
  auto add = [&out](std::string name, std::vector<int> shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    out.push_back(NamedTensor{std::move(name), Tensor{std::move(shape), std::vector<double>(n, 0.0)}});
  };
  add("stem.weight", {spec.stem_width, spec.input_channels, 3, 3});
  add("stem.bias", {spec.stem_width});
  int prev = spec.stem_width;
  for (std::size_t i = 0; i < spec.block_widths.size(); ++i) {
    const int w = spec.block_widths[i];
    const std::string p = "block" + std::to_string(i);
    add(p + ".conv1.weight", {w, prev, 3, 3});
    add(p + ".conv1.bias", {w});
    add(p + ".conv2.weight", {w, w, 3, 3});
    add(p + ".conv2.bias", {w});
    if (w != prev) {
      add(p + ".proj.weight", {w, prev, 1, 1});
      add(p + ".proj.bias", {w});
    }
    prev = w;
  }
  add("head.weight", {2, prev});
  add("head.bias", {2});
  return out;
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : parameter_layout(*this)) n += t.tensor.numel();
  return n;
}

bool is_decayed(const std::string& name) {
  return name.size() >= 7 && name.compare(name.size() - 7, 7, ".weight") == 0;
}

std::string to_string(StreamKind kind) {
  return kind == StreamKind::kSpatial ? "spatial" : "frequency";
}

StreamKind parse_stream_kind(const std::string& text) {
  if (text == "spatial") return StreamKind::kSpatial;
  if (text == "frequency") return StreamKind::kFrequency;
  fail(ErrorKind::kInvalidConfig, "unknown stream '" + text + "' (expected spatial or frequency)");
}

const Tensor& ModelParams::tensor(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t.tensor;
  fail(ErrorKind::kInvalidInput, "no parameter named " + name);
}

Tensor& ModelParams::tensor(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).tensor(name));
}

void ModelParams::check_shapes() const {
  const auto layout = parameter_layout(spec);
  require(layout.size() == tensors.size(), ErrorKind::kInvalidInput,
          "parameter count does not match the network spec");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    require(layout[i].name == tensors[i].name && layout[i].tensor.shape == tensors[i].tensor.shape &&
                layout[i].tensor.numel() == tensors[i].tensor.numel(),
            ErrorKind::kInvalidInput, "parameter " + tensors[i].name + " does not match the network spec");
  }
}

ModelParams init_params(const NetworkSpec& spec, std::uint64_t seed) {
  ModelParams params;
  params.spec = spec;
  params.tensors = parameter_layout(spec);
  Rng rng = derive_rng(seed, {0x1417ull});
  for (auto& [name, t] : params.tensors) {
    if (!is_decayed(name)) continue;
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < t.shape.size(); ++d) fan_in *= static_cast<std::size_t>(t.shape[d]);
    const bool head = name == "head.weight";
    const double bound = head ? 1.0 / std::sqrt(static_cast<double>(fan_in))
                              : std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& v : t.values) v = uniform(rng, -bound, bound);
  }
  return params;
}

ProbPair softmax(const Logits& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double s = e0 + e1;
  ProbPair p;
  p.p_fake = e1 / s;
  p.p_real = 1.0 - p.p_fake;
  return p;
}

namespace {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
template <class T>
using MatMap = Eigen::Map<RowMat<T>>;
template <class T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
// Eigen picks its vectorized code path from the buffer address, so every
// buffer shares one alignment to keep results bit-reproducible.
template <class T>
using Buf = std::vector<T, Eigen::aligned_allocator<T>>;

// Channel-last activation of one sample.
template <class T>
struct Act {
  int h = 0, w = 0, c = 0;
  Buf<T> v;

  Act() = default;
  Act(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<std::size_t>(h_) * w_ * c_, T(0)) {}
  int pixels() const { return h * w; }
};

// Convolution with weights stored as the (k*k*cin) x cout matrix that
// multiplies an im2col patch matrix whose columns run (ky, kx, ci).
template <class T>
struct Conv {
  int cin = 0, cout = 0, k = 3, stride = 1;
  std::size_t w_index = 0, b_index = 0;  // positions in ModelParams::tensors
  RowMat<T> w;
  RowVec<T> b;

  int pad() const { return k / 2; }
  int out_dim(int d) const { return (d + 2 * pad() - k) / stride + 1; }
  int patch() const { return k * k * cin; }
};

template <class T>
Conv<T> make_conv(const ModelParams& params, std::size_t w_index, int stride) {
  const Tensor& wt = params.tensors[w_index].tensor;
  const Tensor& bt = params.tensors[w_index + 1].tensor;
  Conv<T> conv;
  conv.cout = wt.shape[0];
  conv.cin = wt.shape[1];
  conv.k = wt.shape[2];
  conv.stride = stride;
  conv.w_index = w_index;
  conv.b_index = w_index + 1;
  conv.w.resize(conv.patch(), conv.cout);
  for (int co = 0; co < conv.cout; ++co)
    for (int ci = 0; ci < conv.cin; ++ci)
      for (int ky = 0; ky < conv.k; ++ky)
        for (int kx = 0; kx < conv.k; ++kx) {
          const std::size_t src = ((static_cast<std::size_t>(co) * conv.cin + ci) * conv.k + ky) * conv.k + kx;
          conv.w((ky * conv.k + kx) * conv.cin + ci, co) = static_cast<T>(wt.values[src]);
        }
  conv.b.resize(conv.cout);
  for (int co = 0; co < conv.cout; ++co) conv.b(co) = static_cast<T>(bt.values[co]);
  return conv;
}

// Inverse of the layout shuffle in make_conv, accumulating into `dst`.
template <class T>
void add_gemm_to_storage(const Conv<T>& conv, const T* gemm, std::vector<double>& dst) {
  for (int co = 0; co < conv.cout; ++co)
    for (int ci = 0; ci < conv.cin; ++ci)
      for (int ky = 0; ky < conv.k; ++ky)
        for (int kx = 0; kx < conv.k; ++kx) {
          const std::size_t to = ((static_cast<std::size_t>(co) * conv.cin + ci) * conv.k + ky) * conv.k + kx;
          dst[to] += static_cast<double>(gemm[static_cast<std::size_t>((ky * conv.k + kx) * conv.cin + ci) * conv.cout + co]);
        }
}

template <class T>
void im2col(const Conv<T>& conv, const Act<T>& in, int ho, int wo, Buf<T>& col) {
  const int patch = conv.patch();
  col.assign(static_cast<std::size_t>(ho) * wo * patch, T(0));
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      T* row = col.data() + (static_cast<std::size_t>(oy) * wo + ox) * patch;
      for (int ky = 0; ky < conv.k; ++ky) {
        const int iy = oy * conv.stride + ky - conv.pad();
        if (iy < 0 || iy >= in.h) continue;
        for (int kx = 0; kx < conv.k; ++kx) {
          const int ix = ox * conv.stride + kx - conv.pad();
          if (ix < 0 || ix >= in.w) continue;
          const T* src = in.v.data() + (static_cast<std::size_t>(iy) * in.w + ix) * in.c;
          std::copy_n(src, in.c, row + (ky * conv.k + kx) * in.c);
        }
      }
    }
  }
}

template <class T>
void col2im_add(const Conv<T>& conv, const T* dcol, int ho, int wo, Act<T>& din) {
  const int patch = conv.patch();
  for (int oy = 0; oy < ho; ++oy) {
    for (int ox = 0; ox < wo; ++ox) {
      const T* row = dcol + (static_cast<std::size_t>(oy) * wo + ox) * patch;
      for (int ky = 0; ky < conv.k; ++ky) {
        const int iy = oy * conv.stride + ky - conv.pad();
        if (iy < 0 || iy >= din.h) continue;
        for (int kx = 0; kx < conv.k; ++kx) {
          const int ix = ox * conv.stride + kx - conv.pad();
          if (ix < 0 || ix >= din.w) continue;
          T* dst = din.v.data() + (static_cast<std::size_t>(iy) * din.w + ix) * din.c;
          const T* src = row + (ky * conv.k + kx) * din.c;
          for (int ci = 0; ci < din.c; ++ci) dst[ci] += src[ci];
        }
      }
    }
  }
}

template <class T>
Act<T> conv_forward(const Conv<T>& conv, const Act<T>& in, Buf<T>& col) {
  const int ho = conv.out_dim(in.h), wo = conv.out_dim(in.w);
  im2col(conv, in, ho, wo, col);
  Act<T> out(ho, wo, conv.cout);
  MatMap<T> o(out.v.data(), out.pixels(), conv.cout);
  o.noalias() = ConstMatMap<T>(col.data(), out.pixels(), conv.patch()) * conv.w;
  o.rowwise() += conv.b;
  return out;
}

// Accumulates dW (gemm layout) and db; adds dInput into *din when given.
template <class T>
void conv_backward(const Conv<T>& conv, const Act<T>& in, const Act<T>& dout, Buf<T>& dw,
                   Buf<T>& db, Act<T>* din, Buf<T>& col) {
  const int ho = dout.h, wo = dout.w;
  im2col(conv, in, ho, wo, col);
  ConstMatMap<T> d(dout.v.data(), dout.pixels(), conv.cout);
  ConstMatMap<T> c(col.data(), dout.pixels(), conv.patch());
  MatMap<T>(dw.data(), conv.patch(), conv.cout).noalias() += c.transpose() * d;
  Eigen::Map<RowVec<T>>(db.data(), conv.cout) += d.colwise().sum();
  if (din) {
    Buf<T> dcol(static_cast<std::size_t>(dout.pixels()) * conv.patch());
    MatMap<T>(dcol.data(), dout.pixels(), conv.patch()).noalias() = d * conv.w.transpose();
    col2im_add(conv, dcol.data(), ho, wo, *din);
  }
}

template <class T>
void relu_in_place(Act<T>& a) {
  for (T& v : a.v) v = v > T(0) ? v : T(0);
}

// dz = da where the forward output was positive.
template <class T>
void relu_backward(const Act<T>& out, Act<T>& grad) {
  for (std::size_t i = 0; i < grad.v.size(); ++i)
    if (!(out.v[i] > T(0))) grad.v[i] = T(0);
}

template <class T>
struct Net {
  struct Block {
    Conv<T> conv1, conv2;
    bool has_proj = false;
    Conv<T> proj;  // valid when has_proj
  };
  Conv<T> stem;
  std::vector<Block> blocks;
  RowMat<T> head_w;  // 2 x C
  Eigen::Matrix<T, 2, 1> head_b;
  std::size_t head_w_index = 0;
  int input_channels = 0;
  int downsample = 1;

  explicit Net(const ModelParams& params) {
    params.check_shapes();
    const NetworkSpec& spec = params.spec;
    input_channels = spec.input_channels;
    downsample = spec.downsample_factor();
    std::size_t idx = 0;
    stem = make_conv<T>(params, idx, 1);
    idx += 2;
    int prev = spec.stem_width;
    for (int w : spec.block_widths) {
      Block b;
      const int stride = w != prev ? 2 : 1;
      b.conv1 = make_conv<T>(params, idx, stride);
      b.conv2 = make_conv<T>(params, idx + 2, 1);
      idx += 4;
      if (w != prev) {
        b.proj = make_conv<T>(params, idx, 2);
        b.has_proj = true;
        idx += 2;
      }
      blocks.push_back(std::move(b));
      prev = w;
    }
    head_w_index = idx;
    const Tensor& hw = params.tensors[idx].tensor;
    const Tensor& hb = params.tensors[idx + 1].tensor;
    head_w.resize(2, prev);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < prev; ++c) head_w(r, c) = static_cast<T>(hw.values[static_cast<std::size_t>(r) * prev + c]);
    head_b << static_cast<T>(hb.values[0]), static_cast<T>(hb.values[1]);
  }

  struct Trace {
    Act<T> input;
    Act<T> stem_out;
    struct BlockTrace {
      Act<T> hidden;  // relu(conv1)
      Act<T> out;     // relu(conv2 + skip)
    };
    std::vector<BlockTrace> blocks;
    RowVec<T> pooled;
  };

  Act<T> to_act(const PlanarImage& img) const {
    require(img.channels() == input_channels, ErrorKind::kInvalidInput,
            "network expects " + std::to_string(input_channels) + " input channels, got " +
                std::to_string(img.channels()));
    require(img.height() > 0 && img.width() > 0 && img.height() % downsample == 0 &&
                img.width() % downsample == 0,
            ErrorKind::kInvalidInput,
            "input " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                " is not divisible by the network stride " + std::to_string(downsample));
    Act<T> a(img.height(), img.width(), img.channels());
    auto src = img.data();
    for (std::size_t i = 0; i < src.size(); ++i) a.v[i] = static_cast<T>(src[i]);
    return a;
  }

  Eigen::Matrix<T, 2, 1> run(const PlanarImage& img, Trace* trace) const {
    Buf<T> col;
    Act<T> x = to_act(img);
    Act<T> a = conv_forward(stem, x, col);
    relu_in_place(a);
    if (trace) {
      trace->input = std::move(x);
      trace->stem_out = a;
      trace->blocks.clear();
    }
    for (const Block& b : blocks) {
      Act<T> h = conv_forward(b.conv1, a, col);
      relu_in_place(h);
      Act<T> z = conv_forward(b.conv2, h, col);
      if (b.has_proj) {
        const Act<T> s = conv_forward(b.proj, a, col);
        for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] += s.v[i];
      } else {
        for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] += a.v[i];
      }
      relu_in_place(z);
      if (trace) trace->blocks.push_back({std::move(h), z});
      a = std::move(z);
    }
    RowVec<T> pooled = ConstMatMap<T>(a.v.data(), a.pixels(), a.c).colwise().sum() / static_cast<T>(a.pixels());
    Eigen::Matrix<T, 2, 1> logits = head_w * pooled.transpose() + head_b;
    if (trace) trace->pooled = std::move(pooled);
    return logits;
  }

  // Per-parameter gradient buffers; conv weights stay in gemm layout.
  using Grads = std::vector<Buf<T>>;

  Grads zero_grads(const ModelParams& params) const {
    Grads g(params.tensors.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i].assign(params.tensors[i].tensor.numel(), T(0));
    return g;
  }

  // Backpropagates dlogits through a traced forward pass into g.
  void backward(const Trace& tr, const Eigen::Matrix<T, 2, 1>& dlogits, Grads& g) const {
    Buf<T> col;
    const int cl = static_cast<int>(head_w.cols());
    MatMap<T>(g[head_w_index].data(), 2, cl).noalias() += dlogits * tr.pooled;
    g[head_w_index + 1][0] += dlogits(0);
    g[head_w_index + 1][1] += dlogits(1);
    const RowVec<T> dpooled = dlogits.transpose() * head_w;

    const Act<T>& last = tr.blocks.empty() ? tr.stem_out : tr.blocks.back().out;
    Act<T> da(last.h, last.w, last.c);
    const T inv = T(1) / static_cast<T>(last.pixels());
    MatMap<T>(da.v.data(), da.pixels(), da.c).rowwise() = dpooled * inv;

    for (std::size_t bi = blocks.size(); bi-- > 0;) {
      const Block& b = blocks[bi];
      const Act<T>& in = bi == 0 ? tr.stem_out : tr.blocks[bi - 1].out;
      const auto& bt = tr.blocks[bi];
      relu_backward(bt.out, da);  // da is now dz, shared by both paths

      Act<T> dh(bt.hidden.h, bt.hidden.w, bt.hidden.c);
      conv_backward(b.conv2, bt.hidden, da, g[b.conv2.w_index], g[b.conv2.b_index], &dh, col);
      relu_backward(bt.hidden, dh);

      Act<T> din(in.h, in.w, in.c);
      conv_backward(b.conv1, in, dh, g[b.conv1.w_index], g[b.conv1.b_index], &din, col);
      if (b.has_proj) {
        conv_backward(b.proj, in, da, g[b.proj.w_index], g[b.proj.b_index], &din, col);
      } else {
        for (std::size_t i = 0; i < din.v.size(); ++i) din.v[i] += da.v[i];
      }
      da = std::move(din);
    }
    relu_backward(tr.stem_out, da);
    conv_backward(stem, tr.input, da, g[stem.w_index], g[stem.b_index], static_cast<Act<T>*>(nullptr), col);
  }

  // Copies gemm-layout buffers back into the canonical tensor layouts.
  void add_to_storage(const Grads& g, std::vector<Tensor>& out) const {
    auto conv_out = [&](const Conv<T>& c) {
      add_gemm_to_storage(c, g[c.w_index].data(), out[c.w_index].values);
      for (int i = 0; i < c.cout; ++i) out[c.b_index].values[i] += static_cast<double>(g[c.b_index][i]);
    };
    conv_out(stem);
    for (const Block& b : blocks) {
      conv_out(b.conv1);
      conv_out(b.conv2);
      if (b.has_proj) conv_out(b.proj);
    }
    for (std::size_t i = 0; i < g[head_w_index].size(); ++i)
      out[head_w_index].values[i] += static_cast<double>(g[head_w_index][i]);
    for (int i = 0; i < 2; ++i) out[head_w_index + 1].values[i] += static_cast<double>(g[head_w_index + 1][i]);
  }
};

template <class T>
std::vector<Logits> forward_impl(const ModelParams& params, std::span<const PlanarImage> batch, int workers) {
  const Net<T> net(params);
  std::vector<Logits> out(batch.size());
  parallel_for(batch.size(), workers, [&](std::size_t i) {
    const auto l = net.run(batch[i], nullptr);
    out[i] = {static_cast<double>(l(0)), static_cast<double>(l(1))};
  });
  return out;
}

template <class T>
LossAndGrad loss_and_grad_impl(const ModelParams& params, std::span<const PlanarImage> batch,
                               std::span<const Label> labels, double weight_decay, int workers) {
  require(!batch.empty(), ErrorKind::kInvalidInput, "empty batch");
  require(batch.size() == labels.size(), ErrorKind::kInvalidInput, "batch and label counts differ");
  const Net<T> net(params);
  const std::size_t n = batch.size();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<typename Net<T>::Grads> per_sample(n);
  std::vector<double> sample_loss(n);
  std::vector<Logits> sample_logits(n);
  parallel_for(n, workers, [&](std::size_t i) {
    typename Net<T>::Trace trace;
    const auto l = net.run(batch[i], &trace);
    const Logits logits{static_cast<double>(l(0)), static_cast<double>(l(1))};
    sample_logits[i] = logits;
    const ProbPair p = softmax(logits);
    const int y = static_cast<int>(labels[i]);
    // log-sum-exp form stays finite for confident wrong predictions
    const double m = std::max(logits[0], logits[1]);
    sample_loss[i] = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m)) - logits[y];
    Eigen::Matrix<T, 2, 1> dlogits;
    dlogits << static_cast<T>((p.p_real - (y == 0 ? 1.0 : 0.0)) * inv_n),
        static_cast<T>((p.p_fake - (y == 1 ? 1.0 : 0.0)) * inv_n);
    per_sample[i] = net.zero_grads(params);
    net.backward(trace, dlogits, per_sample[i]);
  });

  LossAndGrad result;
  result.grads.reserve(params.tensors.size());
  for (const auto& t : params.tensors) result.grads.push_back(Tensor{t.tensor.shape, std::vector<double>(t.tensor.numel(), 0.0)});
  // Sample-ordered reduction keeps the sum independent of scheduling.
  for (std::size_t i = 0; i < n; ++i) {
    net.add_to_storage(per_sample[i], result.grads);
    result.data_loss += sample_loss[i];
  }
  result.data_loss *= inv_n;
  result.logits = std::move(sample_logits);

  double penalty = 0.0;
  for (std::size_t k = 0; k < params.tensors.size(); ++k) {
    if (!is_decayed(params.tensors[k].name)) continue;
    const auto& w = params.tensors[k].tensor.values;
    auto& g = result.grads[k].values;
    for (std::size_t j = 0; j < w.size(); ++j) {
      penalty += w[j] * w[j];
      g[j] += weight_decay * w[j];
    }
  }
  result.loss = result.data_loss + 0.5 * weight_decay * penalty;
  return result;
}

}  // namespace

std::vector<Logits> forward(const ModelParams& params, std::span<const PlanarImage> batch,
                            Precision precision, int workers) {
  return precision == Precision::kFloat64 ? forward_impl<double>(params, batch, workers)
                                          : forward_impl<float>(params, batch, workers);
}

LossAndGrad loss_and_grad(const ModelParams& params, std::span<const PlanarImage> batch,
                          std::span<const Label> labels, double weight_decay, Precision precision,
                          int workers) {
  return precision == Precision::kFloat64
             ? loss_and_grad_impl<double>(params, batch, labels, weight_decay, workers)
             : loss_and_grad_impl<float>(params, batch, labels, weight_decay, workers);
}

PlanarImage prepare_input(const ModelParams& params, const PlanarImage& rgb) {
  require(rgb.channels() == 3, ErrorKind::kInvalidInput, "expected an RGB image");
  if (params.kind == StreamKind::kSpatial) return rgb;
  PlanarImage cube = assemble_frequency_cube(rgb, params.transform).data;
  if (!params.normalizer.empty()) apply_normalizer_in_place(cube, params.normalizer);
  return cube;
}

ProbPair predict_proba(const ModelParams& params, const PlanarImage& rgb, Precision precision) {
  const PlanarImage input = prepare_input(params, rgb);
  return softmax(forward(params, std::span<const PlanarImage>(&input, 1), precision).front());
}

std::vector<ProbPair> predict_prepared(const ModelParams& params, std::span<const PlanarImage> inputs,
                                       Precision precision, int workers) {
  const auto logits = forward(params, inputs, precision, workers);
  std::vector<ProbPair> out;
  out.reserve(logits.size());
  for (const auto& l : logits) out.push_back(softmax(l));
  return out;
}

}  // namespace fakedet
