#include "fakedet/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fakedet/error.hpp"

namespace fakedet {

std::string BlockSize::to_string() const {
  return is_full() ? std::string("full") : std::to_string(pixels_);
}

BlockSize BlockSize::parse(const std::string& text) {
  if (text == "full") return full();
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(text, &used);
    if (used != text.size()) value = -1;
  } catch (const std::exception&) {
    value = -1;
  }
  require(value > 0, ErrorKind::kInvalidConfig, "block size must be a positive integer or 'full', got '" + text + "'");
  return BlockSize(value);
}

namespace {

struct Tiling {
  int rows;
  int cols;
};

Tiling tiling_for(const PlanarImage& channel, BlockSize block, bool need_even) {
  require(channel.channels() == 1, ErrorKind::kInvalidInput, "expected a single-channel plane");
  require(block.is_full() || block.pixels() > 0, ErrorKind::kInvalidInput, "block size must be positive");
  require(channel.height() > 0 && channel.width() > 0, ErrorKind::kInvalidInput, "empty plane");
  const Tiling t{block.rows_for(channel.height()), block.cols_for(channel.width())};
  if (need_even) {
    require(t.rows % 2 == 0 && t.cols % 2 == 0, ErrorKind::kInvalidInput,
            "Haar tiles need even dimensions, got " + std::to_string(t.rows) + "x" +
                std::to_string(t.cols));
  }
  require(channel.height() % t.rows == 0 && channel.width() % t.cols == 0,
          ErrorKind::kInvalidInput,
          "plane " + std::to_string(channel.height()) + "x" + std::to_string(channel.width()) +
              " is not divisible into " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
              " blocks");
  return t;
}

// cos/sin of -2 pi k / n for k in [0, n); indices are reduced mod n by callers
// so large products never lose precision in the angle.
struct Twiddles {
  explicit Twiddles(int n) : cos(n), sin(n) {
    for (int k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi * k / n;
      cos[k] = std::cos(angle);
      sin[k] = std::sin(angle);
    }
  }
  std::vector<double> cos;
  std::vector<double> sin;
};

// One separable tile transform. `sign` = -1 for forward, +1 for inverse
// (the inverse conjugates the twiddle by flipping the sine).
void transform_tile(const double* in_re, const double* in_im, double* out_re, double* out_im,
                    int stride, int rows, int cols, const Twiddles& tw_cols,
                    const Twiddles& tw_rows, double sign, std::vector<double>& scratch) {
  scratch.assign(static_cast<std::size_t>(rows) * cols * 2, 0.0);
  double* a_re = scratch.data();
  double* a_im = scratch.data() + static_cast<std::size_t>(rows) * cols;
  const double s = -sign;  // tables hold exp(-i...), so forward uses +sin
  for (int y = 0; y < rows; ++y) {
    const double* xr = in_re + static_cast<std::size_t>(y) * stride;
    const double* xi = in_im ? in_im + static_cast<std::size_t>(y) * stride : nullptr;
    for (int u = 0; u < cols; ++u) {
      double acc_re = 0.0, acc_im = 0.0;
      for (int x = 0; x < cols; ++x) {
        const int k = static_cast<int>((static_cast<long long>(u) * x) % cols);
        const double c = tw_cols.cos[k];
        const double sn = tw_cols.sin[k] * s;
        const double vr = xr[x];
        const double vi = xi ? xi[x] : 0.0;
        acc_re += vr * c - vi * sn;
        acc_im += vr * sn + vi * c;
      }
      a_re[y * cols + u] = acc_re;
      a_im[y * cols + u] = acc_im;
    }
  }
  for (int v = 0; v < rows; ++v) {
    double* yr = out_re + static_cast<std::size_t>(v) * stride;
    double* yi = out_im ? out_im + static_cast<std::size_t>(v) * stride : nullptr;
    for (int u = 0; u < cols; ++u) {
      double acc_re = 0.0, acc_im = 0.0;
      for (int y = 0; y < rows; ++y) {
        const int k = static_cast<int>((static_cast<long long>(v) * y) % rows);
        const double c = tw_rows.cos[k];
        const double sn = tw_rows.sin[k] * s;
        const double vr = a_re[y * cols + u];
        const double vi = a_im[y * cols + u];
        acc_re += vr * c - vi * sn;
        acc_im += vr * sn + vi * c;
      }
      yr[u] = acc_re;
      if (yi) yi[u] = acc_im;
    }
  }
}

}  // namespace

DftPlanes blockwise_dft(const PlanarImage& channel, BlockSize block) {
  const Tiling t = tiling_for(channel, block, false);
  const int h = channel.height(), w = channel.width();
  DftPlanes out{PlanarImage(h, w, 1), PlanarImage(h, w, 1)};
  const Twiddles tw_cols(t.cols), tw_rows(t.rows);
  std::vector<double> scratch;
  for (int by = 0; by < h; by += t.rows) {
    for (int bx = 0; bx < w; bx += t.cols) {
      const std::size_t offset = static_cast<std::size_t>(by) * w + bx;
      transform_tile(channel.data().data() + offset, nullptr, out.real.data().data() + offset,
                     out.imag.data().data() + offset, w, t.rows, t.cols, tw_cols, tw_rows, -1.0,
                     scratch);
    }
  }
  return out;
}

PlanarImage blockwise_idft(const PlanarImage& real, const PlanarImage& imag, BlockSize block) {
  require(real.same_shape(imag), ErrorKind::kInvalidInput,
          "real and imaginary planes differ in shape");
  const Tiling t = tiling_for(real, block, false);
  const int h = real.height(), w = real.width();
  PlanarImage out(h, w, 1);
  const Twiddles tw_cols(t.cols), tw_rows(t.rows);
  std::vector<double> scratch;
  for (int by = 0; by < h; by += t.rows) {
    for (int bx = 0; bx < w; bx += t.cols) {
      const std::size_t offset = static_cast<std::size_t>(by) * w + bx;
      transform_tile(real.data().data() + offset, imag.data().data() + offset,
                     out.data().data() + offset, nullptr, w, t.rows, t.cols, tw_cols, tw_rows,
                     1.0, scratch);
    }
  }
  const double scale = 1.0 / (static_cast<double>(t.rows) * t.cols);
  for (double& v : out.data()) v *= scale;
  return out;
}

// A single Haar level only mixes 2x2 windows, and even-sized tiles never split
// a window, so tile boundaries leave the coefficients and their placement
// unchanged. The tiling is still validated so that callers get the same
// divisibility contract as the DFT.
SubbandSet blockwise_haar_dwt(const PlanarImage& channel, BlockSize block) {
  tiling_for(channel, block, true);
  const int h = channel.height(), w = channel.width();
  const int hh = h / 2, hw = w / 2;
  const double r = std::numbers::sqrt2 / 2.0;

  // Rows first: low/high pass along x, downsampled by two.
  PlanarImage low(h, hw, 1), high(h, hw, 1);
  for (int y = 0; y < h; ++y) {
    for (int k = 0; k < hw; ++k) {
      const double a = channel.at(y, 2 * k), b = channel.at(y, 2 * k + 1);
      low.at(y, k) = (a + b) * r;
      high.at(y, k) = (a - b) * r;
    }
  }
  // Then columns on each half.
  SubbandSet out{PlanarImage(hh, hw, 1), PlanarImage(hh, hw, 1), PlanarImage(hh, hw, 1),
                 PlanarImage(hh, hw, 1)};
  for (int j = 0; j < hh; ++j) {
    for (int k = 0; k < hw; ++k) {
      const double l0 = low.at(2 * j, k), l1 = low.at(2 * j + 1, k);
      const double h0 = high.at(2 * j, k), h1 = high.at(2 * j + 1, k);
      out.ll.at(j, k) = (l0 + l1) * r;
      out.lh.at(j, k) = (l0 - l1) * r;
      out.hl.at(j, k) = (h0 + h1) * r;
      out.hh.at(j, k) = (h0 - h1) * r;
    }
  }
  return out;
}

PlanarImage blockwise_haar_idwt(const SubbandSet& s, BlockSize block) {
  require(s.ll.channels() == 1 && s.ll.same_shape(s.hl) && s.ll.same_shape(s.lh) &&
              s.ll.same_shape(s.hh),
          ErrorKind::kInvalidInput, "subband shapes disagree");
  const int hh = s.ll.height(), hw = s.ll.width();
  const int h = hh * 2, w = hw * 2;
  tiling_for(PlanarImage(h, w, 1), block, true);
  const double r = std::numbers::sqrt2 / 2.0;

  PlanarImage low(h, hw, 1), high(h, hw, 1);
  for (int j = 0; j < hh; ++j) {
    for (int k = 0; k < hw; ++k) {
      low.at(2 * j, k) = (s.ll.at(j, k) + s.lh.at(j, k)) * r;
      low.at(2 * j + 1, k) = (s.ll.at(j, k) - s.lh.at(j, k)) * r;
      high.at(2 * j, k) = (s.hl.at(j, k) + s.hh.at(j, k)) * r;
      high.at(2 * j + 1, k) = (s.hl.at(j, k) - s.hh.at(j, k)) * r;
    }
  }
  PlanarImage out(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int k = 0; k < hw; ++k) {
      out.at(y, 2 * k) = (low.at(y, k) + high.at(y, k)) * r;
      out.at(y, 2 * k + 1) = (low.at(y, k) - high.at(y, k)) * r;
    }
  }
  return out;
}

PlanarImage upsample_nearest(const PlanarImage& channel, int factor) {
  require(factor >= 1, ErrorKind::kInvalidInput, "upsample factor must be >= 1");
  const int c = channel.channels();
  PlanarImage out(channel.height() * factor, channel.width() * factor, c);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int k = 0; k < c; ++k) out.at(y, x, k) = channel.at(y / factor, x / factor, k);
    }
  }
  return out;
}

std::string to_string(Colorspace space) {
  return space == Colorspace::kRgb ? "rgb" : "ycbcr";
}

Colorspace parse_colorspace(const std::string& text) {
  if (text == "rgb") return Colorspace::kRgb;
  if (text == "ycbcr") return Colorspace::kYcbcr;
  fail(ErrorKind::kInvalidConfig, "unknown colorspace '" + text + "' (expected rgb or ycbcr)");
}

std::string TransformConfig::transforms_string() const {
  if (use_dft && use_dwt) return "dft,dwt";
  if (use_dft) return "dft";
  if (use_dwt) return "dwt";
  return "";
}

void TransformConfig::set_transforms(const std::string& list) {
  bool dft = false, dwt = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "dft") {
      dft = true;
    } else if (item == "dwt") {
      dwt = true;
    } else {
      fail(ErrorKind::kInvalidConfig, "unknown transform '" + item + "' (expected dft or dwt)");
    }
  }
  require(dft || dwt, ErrorKind::kInvalidConfig, "transform set is empty");
  use_dft = dft;
  use_dwt = dwt;
}

std::vector<std::string> cube_channel_order(const TransformConfig& config) {
  static const std::array<const char*, 3> kYcc{"Y", "Cb", "Cr"};
  static const std::array<const char*, 3> kRgb{"R", "G", "B"};
  const auto& names = config.colorspace == Colorspace::kYcbcr ? kYcc : kRgb;
  std::vector<std::string> order;
  if (config.use_dft) {
    for (const char* n : names) {
      order.push_back(std::string(n) + ".dft.re");
      order.push_back(std::string(n) + ".dft.im");
    }
  }
  if (config.use_dwt) {
    for (const char* n : names) {
      for (const char* band : {"ll", "hl", "lh", "hh"}) order.push_back(std::string(n) + "." + band);
    }
  }
  return order;
}

FrequencyCube assemble_frequency_cube(const PlanarImage& img, const TransformConfig& config) {
  require(config.use_dft || config.use_dwt, ErrorKind::kInvalidConfig, "transform set is empty");
  require(img.channels() == 3, ErrorKind::kInvalidInput,
          "frequency cube needs a 3-channel image, got " + std::to_string(img.channels()));
  const PlanarImage color = config.colorspace == Colorspace::kYcbcr
                                ? rgb_to_ycbcr(img, ColorCoefficients::itu601(), config.chroma)
                                : img;
  std::vector<PlanarImage> planes;
  planes.reserve(static_cast<std::size_t>(config.output_channels()));
  std::array<PlanarImage, 3> channels{color.channel(0), color.channel(1), color.channel(2)};
  if (config.use_dft) {
    for (const auto& ch : channels) {
      DftPlanes spec = blockwise_dft(ch, config.block);
      planes.push_back(std::move(spec.real));
      planes.push_back(std::move(spec.imag));
    }
  }
  if (config.use_dwt) {
    for (const auto& ch : channels) {
      SubbandSet bands = blockwise_haar_dwt(ch, config.block);
      planes.push_back(upsample_nearest(bands.ll, 2));
      planes.push_back(upsample_nearest(bands.hl, 2));
      planes.push_back(upsample_nearest(bands.lh, 2));
      planes.push_back(upsample_nearest(bands.hh, 2));
    }
  }
  return FrequencyCube{concat_channels(planes), cube_channel_order(config)};
}

void NormalizerAccumulator::add(const PlanarImage& cube) {
  const int c = cube.channels();
  const std::size_t n = static_cast<std::size_t>(cube.height()) * cube.width();
  require(n > 0 && c > 0, ErrorKind::kInvalidInput, "cannot fit a normalizer on an empty cube");
  if (count_ == 0) {
    mean_.assign(c, 0.0);
    m2_.assign(c, 0.0);
  }
  require(static_cast<int>(mean_.size()) == c, ErrorKind::kInvalidInput,
          "cube channel count " + std::to_string(c) + " differs from earlier cubes (" +
              std::to_string(mean_.size()) + ")");
  auto data = cube.data();
  std::vector<double> m(c, 0.0), q(c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < c; ++k) m[k] += data[i * c + k];
  }
  for (int k = 0; k < c; ++k) m[k] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < c; ++k) {
      const double d = data[i * c + k] - m[k];
      q[k] += d * d;
    }
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(n);
  const double total = na + nb;
  for (int k = 0; k < c; ++k) {
    const double delta = m[k] - mean_[k];
    mean_[k] += delta * nb / total;
    m2_[k] += q[k] + delta * delta * na * nb / total;
  }
  count_ += n;
}

ChannelNormalizer NormalizerAccumulator::finish() const {
  require(count_ > 0, ErrorKind::kInvalidInput, "normalizer fit needs at least one cube");
  ChannelNormalizer norm;
  norm.mean = mean_;
  norm.std.resize(m2_.size());
  for (std::size_t k = 0; k < m2_.size(); ++k) {
    norm.std[k] = std::max(std::sqrt(m2_[k] / static_cast<double>(count_)), ChannelNormalizer::kMinStd);
  }
  return norm;
}

ChannelNormalizer fit_channel_normalizer(std::span<const FrequencyCube> cubes) {
  require(!cubes.empty(), ErrorKind::kInvalidInput, "normalizer fit needs at least one cube");
  NormalizerAccumulator acc;
  for (const auto& cube : cubes) acc.add(cube);
  return acc.finish();
}

namespace {

void check_normalizer(const PlanarImage& cube, const ChannelNormalizer& norm) {
  require(cube.channels() == norm.channels() && norm.std.size() == norm.mean.size(),
          ErrorKind::kInvalidInput,
          "normalizer has " + std::to_string(norm.channels()) + " channels, cube has " +
              std::to_string(cube.channels()));
}

}  // namespace

void apply_normalizer_in_place(PlanarImage& cube, const ChannelNormalizer& norm) {
  check_normalizer(cube, norm);
  const int c = cube.channels();
  auto data = cube.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int k = static_cast<int>(i % c);
    data[i] = (data[i] - norm.mean[k]) / norm.std[k];
  }
}

FrequencyCube apply_normalizer(FrequencyCube cube, const ChannelNormalizer& norm) {
  apply_normalizer_in_place(cube.data, norm);
  return cube;
}

FrequencyCube unapply_normalizer(FrequencyCube cube, const ChannelNormalizer& norm) {
  check_normalizer(cube.data, norm);
  const int c = cube.channels();
  auto data = cube.data.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int k = static_cast<int>(i % c);
    data[i] = data[i] * norm.std[k] + norm.mean[k];
  }
  return cube;
}

}  // namespace fakedet
