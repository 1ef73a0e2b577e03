#include "fakedet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <nlohmann/json.hpp>

#include "fakedet/augmentation.hpp"
#include "fakedet/error.hpp"
#include "fakedet/image_io.hpp"
#include "fakedet/rng.hpp"
#include "fakedet/serialization.hpp"

namespace fakedet {

namespace fs = std::filesystem;

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

std::size_t LabeledDataset::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(
      items.begin(), items.end(), [label](const Sample& s) { return s.label == label; }));
}

PlanarImage load_sample(const Sample& sample) {
  if (const auto* img = std::get_if<PlanarImage>(&sample.source)) return *img;
  return read_image(std::get<fs::path>(sample.source));
}

void SynthConfig::validate(int block) const {
  require(size > 0 && base_smoothness > 0.0 && artifact_amplitude >= 0.0 && upsample_factor >= 1,
          ErrorKind::kInvalidConfig, "synthetic corpus parameters out of range");
  require(block > 0 && size % (2 * block) == 0, ErrorKind::kInvalidConfig,
          "synthetic image size " + std::to_string(size) + " must be divisible by " +
              std::to_string(2 * block));
  require(size % upsample_factor == 0, ErrorKind::kInvalidConfig,
          "synthetic image size must be divisible by the upsample factor");
}

PlanarImage synth_real(const SynthConfig& cfg, std::uint64_t index) {
  cfg.validate(1);
  Rng rng = derive_rng(cfg.seed, {0x5EA1ull, index});
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = cfg.size;
  PlanarImage noise(n, n, 3);
  for (double& v : noise.data()) v = normal(rng);
  PlanarImage field = gaussian_filter(noise, cfg.base_smoothness);

  for (int c = 0; c < 3; ++c) {
    // Ramp amplitude is relative to the field's spread so neither term dominates.
    double lo = field.at(0, 0, c), hi = lo;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        lo = std::min(lo, field.at(y, x, c));
        hi = std::max(hi, field.at(y, x, c));
      }
    const double spread = hi - lo;
    const double gx = uniform(rng, -1.0, 1.0) * spread;
    const double gy = uniform(rng, -1.0, 1.0) * spread;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        field.at(y, x, c) += gx * (x / static_cast<double>(n) - 0.5) +
                             gy * (y / static_cast<double>(n) - 0.5);
      }
    lo = field.at(0, 0, c);
    hi = lo;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        lo = std::min(lo, field.at(y, x, c));
        hi = std::max(hi, field.at(y, x, c));
      }
    const double scale = hi > lo ? 0.8 / (hi - lo) : 0.0;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double& v = field.at(y, x, c);
        v = std::clamp(0.1 + (v - lo) * scale, 0.1, 0.9);
      }
  }
  return field;
}

PlanarImage synth_fake(const SynthConfig& cfg, std::uint64_t index) {
  PlanarImage img = synth_real(cfg, index);
  const int n = cfg.size, f = cfg.upsample_factor;
  if (f > 1) {
    const double inv = 1.0 / (f * f);
    for (int ty = 0; ty < n; ty += f) {
      for (int tx = 0; tx < n; tx += f) {
        for (int c = 0; c < 3; ++c) {
          double sum = 0.0;
          for (int y = 0; y < f; ++y)
            for (int x = 0; x < f; ++x) sum += img.at(ty + y, tx + x, c);
          const double mean = sum * inv;
          for (int y = 0; y < f; ++y)
            for (int x = 0; x < f; ++x) img.at(ty + y, tx + x, c) = mean;
        }
      }
    }
  }
  if (cfg.artifact_amplitude > 0.0) {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double delta = ((x + y) % 2 == 0) ? cfg.artifact_amplitude : -cfg.artifact_amplitude;
        for (int c = 0; c < 3; ++c) img.at(y, x, c) += delta;
      }
  }
  return clamp_unit(std::move(img));
}

namespace {

// Index ranges are spaced far apart so any realistic count stays disjoint.
std::uint64_t base_index(Split split, Label label) {
  const std::uint64_t s = static_cast<std::uint64_t>(split);
  const std::uint64_t l = static_cast<std::uint64_t>(label);
  return (s * 2 + l) << 32;
}

}  // namespace

LabeledDataset make_synth_split(const SynthConfig& cfg, Split split, std::size_t per_class) {
  cfg.validate(1);
  LabeledDataset ds;
  ds.split = split;
  ds.items.reserve(per_class * 2);
  for (Label label : {Label::kReal, Label::kFake}) {
    const std::uint64_t base = base_index(split, label);
    for (std::size_t i = 0; i < per_class; ++i) {
      PlanarImage img = label == Label::kReal ? synth_real(cfg, base + i) : synth_fake(cfg, base + i);
      ds.items.push_back(Sample{std::move(img), label});
    }
  }
  return ds;
}

void write_synth_corpus(const fs::path& out, const SynthConfig& cfg, const SynthCounts& counts) {
  cfg.validate(1);
  const std::pair<Split, std::size_t> plan[] = {
      {Split::kTrain, counts.train}, {Split::kVal, counts.val}, {Split::kTest, counts.test}};
  std::error_code ec;
  for (const auto& [split, per_class] : plan) {
    for (const char* cls : {"real", "fake"}) {
      const fs::path dir = out / to_string(split) / cls;
      fs::create_directories(dir, ec);
      require(!ec, ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
    }
    for (Label label : {Label::kReal, Label::kFake}) {
      const std::uint64_t base = base_index(split, label);
      const fs::path dir = out / to_string(split) / (label == Label::kReal ? "real" : "fake");
      for (std::size_t i = 0; i < per_class; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.png", i);
        write_png(dir / name, label == Label::kReal ? synth_real(cfg, base + i)
                                                    : synth_fake(cfg, base + i));
      }
    }
  }
  nlohmann::json manifest;
  manifest["synth_config"] = cfg;
  manifest["counts_per_class"] = {{"train", counts.train}, {"val", counts.val}, {"test", counts.test}};
  manifest["total_images"] = 2 * (counts.train + counts.val + counts.test);
  manifest["layout"] = "<split>/<real|fake>/<index>.png";
  std::ofstream f(out / "manifest.json");
  require(static_cast<bool>(f), ErrorKind::kIo, "cannot write " + (out / "manifest.json").string());
  f << manifest.dump(2) << '\n';
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

LabeledDataset load_image_dir(const fs::path& root, Split split) {
  LabeledDataset ds;
  ds.split = split;
  for (const auto& [name, label] : {std::pair{"real", Label::kReal}, std::pair{"fake", Label::kFake}}) {
    const fs::path dir = root / name;
    require(fs::is_directory(dir), ErrorKind::kIngestion, "missing subdirectory " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      try {
        (void)read_image(file);
        ds.items.push_back(Sample{file, label});
      } catch (const Error& e) {
        std::cerr << "warning: skipping " << file.string() << ": " << e.what() << '\n';
        ds.skipped.push_back(SkippedFile{file, e.what()});
      }
    }
  }
  return ds;
}

PlanarImage preprocess_crop_resize(const PlanarImage& img, int target) {
  require(target > 0, ErrorKind::kInvalidInput, "target size must be positive");
  require(img.height() >= 2 && img.width() >= 2, ErrorKind::kIngestion,
          "degenerate image " + std::to_string(img.height()) + "x" + std::to_string(img.width()));
  const int side = std::min(img.height(), img.width());
  const int oy = (img.height() - side) / 2;
  const int ox = (img.width() - side) / 2;
  const int c = img.channels();
  PlanarImage crop(side, side, c);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x)
      for (int k = 0; k < c; ++k) crop.at(y, x, k) = img.at(oy + y, ox + x, k);
  if (side == target) return crop;

  // Pixel-center aligned bilinear sampling with edge clamping.
  PlanarImage out(target, target, c);
  const double scale = static_cast<double>(side) / target;
  for (int y = 0; y < target; ++y) {
    const double sy = std::clamp((y + 0.5) * scale - 0.5, 0.0, side - 1.0);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, side - 1);
    const double fy = sy - y0;
    for (int x = 0; x < target; ++x) {
      const double sx = std::clamp((x + 0.5) * scale - 0.5, 0.0, side - 1.0);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, side - 1);
      const double fx = sx - x0;
      for (int k = 0; k < c; ++k) {
        const double top = crop.at(y0, x0, k) + (crop.at(y0, x1, k) - crop.at(y0, x0, k)) * fx;
        const double bot = crop.at(y1, x0, k) + (crop.at(y1, x1, k) - crop.at(y1, x0, k)) * fx;
        out.at(y, x, k) = top + (bot - top) * fy;
      }
    }
  }
  return out;
}

}  // namespace fakedet
