#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fakedet/colorspace.hpp"
#include "fakedet/image.hpp"

namespace fakedet {

/// Side length of the square tiles a transform is applied to. A value of
/// zero stands for a single tile spanning the whole image.
class BlockSize {
 public:
  constexpr BlockSize() = default;
  constexpr explicit BlockSize(int pixels) : pixels_(pixels) {}
  static constexpr BlockSize full() { return BlockSize(0); }

  constexpr bool is_full() const noexcept { return pixels_ == 0; }
  constexpr int pixels() const noexcept { return pixels_; }

  /// Tile height for an image of the given height.
  int rows_for(int height) const noexcept { return is_full() ? height : pixels_; }
  int cols_for(int width) const noexcept { return is_full() ? width : pixels_; }

  /// "8", "16", ..., or "full".
  std::string to_string() const;
  static BlockSize parse(const std::string& text);

  friend constexpr bool operator==(BlockSize, BlockSize) = default;

 private:
  int pixels_ = 8;
};

struct DftPlanes {
  PlanarImage real;
  PlanarImage imag;
};

/// Unnormalized forward 2-D DFT of every tile, written back at the tile's
/// position: X[v][u] = sum_{y,x} x[y][x] exp(-2 pi i (u x / N + v y / M)).
DftPlanes blockwise_dft(const PlanarImage& channel, BlockSize block = BlockSize(8));

/// Inverse of blockwise_dft, with the 1/(N M) normalization.
PlanarImage blockwise_idft(const PlanarImage& real, const PlanarImage& imag,
                           BlockSize block = BlockSize(8));

/// Single-level orthonormal Haar subbands, each (H/2) x (W/2). hl holds
/// horizontal detail (high along x, low along y), lh vertical detail.
struct SubbandSet {
  PlanarImage ll;
  PlanarImage hl;
  PlanarImage lh;
  PlanarImage hh;
};

SubbandSet blockwise_haar_dwt(const PlanarImage& channel, BlockSize block = BlockSize(8));
PlanarImage blockwise_haar_idwt(const SubbandSet& subbands, BlockSize block = BlockSize(8));

/// Replicates every value into a factor x factor tile.
PlanarImage upsample_nearest(const PlanarImage& channel, int factor);

enum class Colorspace { kRgb, kYcbcr };

std::string to_string(Colorspace space);
Colorspace parse_colorspace(const std::string& text);

struct TransformConfig {
  Colorspace colorspace = Colorspace::kYcbcr;
  ChromaConvention chroma = ChromaConvention::kBt601;
  bool use_dft = true;
  bool use_dwt = true;
  BlockSize block;

  int output_channels() const noexcept { return 3 * ((use_dft ? 2 : 0) + (use_dwt ? 4 : 0)); }

  /// "dft", "dwt" or "dft,dwt".
  std::string transforms_string() const;
  void set_transforms(const std::string& list);

  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

/// Transform coefficients stacked along channels with a label per channel.
/// For YCbCr with both transforms the order is
/// [Y.dft.re, Y.dft.im, Cb.dft.re, ..., Cr.dft.im, Y.ll, Y.hl, Y.lh, Y.hh, Cb.ll, ..., Cr.hh].
struct FrequencyCube {
  PlanarImage data;
  std::vector<std::string> channel_order;

  int channels() const noexcept { return data.channels(); }
};

std::vector<std::string> cube_channel_order(const TransformConfig& config);

FrequencyCube assemble_frequency_cube(const PlanarImage& img, const TransformConfig& config);

/// Per-channel affine standardization of cube coefficients.
struct ChannelNormalizer {
  static constexpr double kMinStd = 1e-8;

  std::vector<double> mean;
  std::vector<double> std;

  int channels() const noexcept { return static_cast<int>(mean.size()); }
  bool empty() const noexcept { return mean.empty(); }

  friend bool operator==(const ChannelNormalizer&, const ChannelNormalizer&) = default;
};

/// Streaming fit: feed cubes one at a time, then call finish(). Per-cube
/// statistics are merged pairwise, so the result does not drift with the
/// number of cubes.
class NormalizerAccumulator {
 public:
  void add(const PlanarImage& cube);
  void add(const FrequencyCube& cube) { add(cube.data); }
  std::size_t count() const noexcept { return count_; }
  ChannelNormalizer finish() const;

 private:
  std::size_t count_ = 0;  // samples per channel so far
  std::vector<double> mean_;
  std::vector<double> m2_;
};

ChannelNormalizer fit_channel_normalizer(std::span<const FrequencyCube> cubes);

FrequencyCube apply_normalizer(FrequencyCube cube, const ChannelNormalizer& norm);
FrequencyCube unapply_normalizer(FrequencyCube cube, const ChannelNormalizer& norm);
void apply_normalizer_in_place(PlanarImage& cube, const ChannelNormalizer& norm);

}  // namespace fakedet
