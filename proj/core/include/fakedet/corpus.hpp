#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "fakedet/image.hpp"

namespace fakedet {

enum class Label : int { kReal = 0, kFake = 1 };
enum class Split { kTrain, kVal, kTest };

std::string to_string(Split split);

/// Image sources are either files on disk or images already in memory.
struct Sample {
  std::variant<std::filesystem::path, PlanarImage> source;
  Label label = Label::kReal;
};

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct LabeledDataset {
  std::vector<Sample> items;
  Split split = Split::kTrain;
  /// Files that were listed but could not be decoded.
  std::vector<SkippedFile> skipped;

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
  std::size_t count(Label label) const;
};

/// Decodes a file-backed sample or returns the in-memory image.
PlanarImage load_sample(const Sample& sample);

struct SynthConfig {
  int size = 64;
  double base_smoothness = 2.0;
  double artifact_amplitude = 0.02;
  int upsample_factor = 2;
  std::uint64_t seed = 0;

  /// `block` is the transform tile the corpus must stay compatible with.
  void validate(int block = 8) const;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

/// Smooth Gaussian random field plus a random linear ramp, rescaled per
/// channel into [0.1, 0.9]. Pure function of (cfg, index).
PlanarImage synth_real(const SynthConfig& cfg, std::uint64_t index);

/// synth_real(cfg, index) average-pooled and nearest-upsampled by
/// cfg.upsample_factor, plus a +/- artifact_amplitude pixel-pitch checkerboard.
PlanarImage synth_fake(const SynthConfig& cfg, std::uint64_t index);

/// Balanced in-memory split with `per_class` images of each label. Every
/// (split, label) pair draws from a disjoint index range so no base field is
/// shared between classes or splits.
LabeledDataset make_synth_split(const SynthConfig& cfg, Split split, std::size_t per_class);

struct SynthCounts {
  std::size_t train = 500;
  std::size_t val = 100;
  std::size_t test = 100;
};

/// Writes <out>/<split>/{real,fake}/NNNNNN.png and <out>/manifest.json.
void write_synth_corpus(const std::filesystem::path& out, const SynthConfig& cfg,
                        const SynthCounts& counts);

/// Lists <root>/real then <root>/fake (each sorted by filename). Undecodable
/// files are skipped and recorded in `skipped`; a missing subdirectory is a
/// kIngestion error.
LabeledDataset load_image_dir(const std::filesystem::path& root, Split split = Split::kTest);

/// Center-crops to the shorter edge, then bilinear-resizes to target x target.
PlanarImage preprocess_crop_resize(const PlanarImage& img, int target);

}  // namespace fakedet
