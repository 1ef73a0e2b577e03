#include "fakedet/corpus.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "fakedet/error.hpp"
#include "fakedet/image_io.hpp"
#include "fakedet/transforms.hpp"
#include "oracles.hpp"

namespace fakedet {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("fakedet_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// Mean energy of 8x8 DFT coefficients whose horizontal or vertical frequency
// magnitude is at least 4. Index k stands for frequency min(k, 8 - k): indices
// 5..7 are the negative low frequencies.
double high_frequency_energy(const PlanarImage& img) {
  double e = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto planes = blockwise_dft(img.channel(c));
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        if (std::min(y % 8, 8 - y % 8) >= 4 || std::min(x % 8, 8 - x % 8) >= 4)
          e += planes.real.at(y, x) * planes.real.at(y, x) + planes.imag.at(y, x) * planes.imag.at(y, x);
  }
  return e / static_cast<double>(img.size());
}

TEST(SynthTest, RealIsDeterministicDistinctAndInRange) {
  const SynthConfig cfg;
  EXPECT_EQ(synth_real(cfg, 3), synth_real(cfg, 3));
  for (std::uint64_t i = 0; i < 100; ++i) {
    const PlanarImage a = synth_real(cfg, i), b = synth_real(cfg, i + 1000);
    std::size_t differ = 0;
    for (std::size_t k = 0; k < a.size(); ++k) differ += a.data()[k] != b.data()[k];
    ASSERT_GE(differ, a.size() / 100);
    for (double v : a.data()) {
      ASSERT_GE(v, 0.1);
      ASSERT_LE(v, 0.9);
    }
  }
  SynthConfig other = cfg;
  other.seed = 1;
  EXPECT_NE(synth_real(cfg, 0), synth_real(other, 0));
}

TEST(SynthTest, DegenerateFakeEqualsReal) {
  SynthConfig cfg;
  cfg.artifact_amplitude = 0.0;
  cfg.upsample_factor = 1;
  EXPECT_EQ(synth_fake(cfg, 11), synth_real(cfg, 11));
}

TEST(SynthTest, FakeTilesAreConstantBeforeCheckerboard) {
  SynthConfig cfg;
  cfg.artifact_amplitude = 0.0;
  const PlanarImage img = synth_fake(cfg, 5);
  for (int y = 0; y < cfg.size; y += 2)
    for (int x = 0; x < cfg.size; x += 2)
      for (int c = 0; c < 3; ++c) {
        ASSERT_EQ(img.at(y, x + 1, c), img.at(y, x, c));
        ASSERT_EQ(img.at(y + 1, x, c), img.at(y, x, c));
        ASSERT_EQ(img.at(y + 1, x + 1, c), img.at(y, x, c));
      }
}

TEST(SynthTest, FakeHasMoreHighFrequencyEnergy) {
  const SynthConfig cfg;
  double real = 0.0, fake = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    real += high_frequency_energy(synth_real(cfg, i));
    fake += high_frequency_energy(synth_fake(cfg, i));
  }
  EXPECT_GT(fake, real);
}

TEST(SynthTest, ThresholdOnHighFrequencyEnergySeparatesClasses) {
  SynthConfig cfg;
  cfg.seed = 7;
  const auto train = make_synth_split(cfg, Split::kTrain, 100);
  const auto test = make_synth_split(cfg, Split::kTest, 100);
  std::vector<std::pair<double, Label>> scored;
  for (const auto& s : train.items) scored.emplace_back(high_frequency_energy(load_sample(s)), s.label);
  std::sort(scored.begin(), scored.end());
  double best_t = 0.0;
  std::size_t best = 0;
  for (std::size_t k = 0; k + 1 < scored.size(); ++k) {
    const double t = 0.5 * (scored[k].first + scored[k + 1].first);
    std::size_t correct = 0;
    for (const auto& [e, l] : scored) correct += (e > t) == (l == Label::kFake);
    if (correct > best) {
      best = correct;
      best_t = t;
    }
  }
  std::size_t correct = 0;
  for (const auto& s : test.items)
    correct += (high_frequency_energy(load_sample(s)) > best_t) == (s.label == Label::kFake);
  EXPECT_GE(static_cast<double>(correct) / test.size(), 0.9);
}

TEST(SynthTest, SplitsAreBalancedDisjointAndDeterministic) {
  SynthConfig cfg;
  cfg.size = 16;
  const auto train = make_synth_split(cfg, Split::kTrain, 6);
  const auto val = make_synth_split(cfg, Split::kVal, 6);
  EXPECT_EQ(train.count(Label::kReal), 6u);
  EXPECT_EQ(train.count(Label::kFake), 6u);
  EXPECT_EQ(train.split, Split::kTrain);
  for (std::size_t i = 0; i < train.size(); ++i) {
    EXPECT_EQ(load_sample(train.items[i]), load_sample(make_synth_split(cfg, Split::kTrain, 6).items[i]));
    EXPECT_NE(load_sample(train.items[i]), load_sample(val.items[i]));
  }
  // No real image shares its base field with a fake one.
  for (std::size_t i = 0; i < 6; ++i) {
    SynthConfig plain = cfg;
    plain.artifact_amplitude = 0.0;
    plain.upsample_factor = 1;
    const auto degenerate = make_synth_split(plain, Split::kTrain, 6);
    EXPECT_NE(load_sample(degenerate.items[i]), load_sample(degenerate.items[6 + i]));
  }
}

TEST(SynthConfigTest, Validation) {
  SynthConfig cfg;
  EXPECT_NO_THROW(cfg.validate(8));
  cfg.size = 40;
  EXPECT_THROW(cfg.validate(8), Error);
  cfg.size = 64;
  cfg.upsample_factor = 0;
  EXPECT_THROW(cfg.validate(8), Error);
  cfg.upsample_factor = 3;
  EXPECT_THROW(cfg.validate(8), Error);
}

TEST(CorpusOnDiskTest, WriteThenLoad) {
  TempDir dir("corpus");
  SynthConfig cfg;
  cfg.size = 16;
  cfg.seed = 3;
  write_synth_corpus(dir.path(), cfg, SynthCounts{3, 2, 1});
  std::size_t pngs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) pngs += e.path().extension() == ".png";
  EXPECT_EQ(pngs, 2u * (3 + 2 + 1));
  std::ifstream mf(dir.path() / "manifest.json");
  const auto manifest = nlohmann::json::parse(mf);
  EXPECT_EQ(manifest["synth_config"]["seed"], 3);
  EXPECT_EQ(manifest["total_images"], 12);

  const auto train = load_image_dir(dir.path() / "train", Split::kTrain);
  ASSERT_EQ(train.size(), 6u);
  const std::vector<Label> labels{Label::kReal, Label::kReal, Label::kReal, Label::kFake, Label::kFake, Label::kFake};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(train.items[i].label, labels[i]);
  // PNG stores 8-bit values.
  const auto mem = make_synth_split(cfg, Split::kTrain, 3);
  const PlanarImage disk = load_sample(train.items[1]);
  const PlanarImage orig = load_sample(mem.items[1]);
  for (std::size_t k = 0; k < disk.size(); ++k) ASSERT_NEAR(disk.data()[k], orig.data()[k], 0.5 / 255 + 1e-12);
}

TEST(CorpusOnDiskTest, ListingOrderSkipsAndErrors) {
  TempDir dir("listing");
  fs::create_directories(dir.path() / "real");
  fs::create_directories(dir.path() / "fake");
  const PlanarImage img(8, 8, 3, 0.5);
  for (const char* n : {"c.png", "a.png", "b.png"}) write_png(dir.path() / "real" / n, img);
  for (const char* n : {"z.png", "y.png"}) write_png(dir.path() / "fake" / n, img);
  std::ofstream(dir.path() / "fake" / "broken.png") << "not an image";
  std::ofstream(dir.path() / "real" / "notes.txt") << "ignored";

  const auto ds = load_image_dir(dir.path());
  ASSERT_EQ(ds.size(), 5u);
  EXPECT_EQ(std::get<fs::path>(ds.items[0].source).filename(), "a.png");
  EXPECT_EQ(std::get<fs::path>(ds.items[2].source).filename(), "c.png");
  EXPECT_EQ(std::get<fs::path>(ds.items[3].source).filename(), "y.png");
  const std::vector<Label> labels{Label::kReal, Label::kReal, Label::kReal, Label::kFake, Label::kFake};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(ds.items[i].label, labels[i]);
  ASSERT_EQ(ds.skipped.size(), 1u);
  EXPECT_EQ(ds.skipped[0].path.filename(), "broken.png");

  const auto again = load_image_dir(dir.path());
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_EQ(std::get<fs::path>(again.items[i].source), std::get<fs::path>(ds.items[i].source));

  for (const auto& e : fs::directory_iterator(dir.path() / "fake")) fs::remove(e.path());
  const auto no_fake = load_image_dir(dir.path());
  EXPECT_EQ(no_fake.size(), 3u);
  EXPECT_EQ(no_fake.count(Label::kFake), 0u);

  fs::remove_all(dir.path() / "fake");
  try {
    load_image_dir(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIngestion);
  }
}

TEST(PreprocessTest, CropResizeCases) {
  std::mt19937_64 rng(31);
  const PlanarImage tall = oracle::random_image(rng, 512, 256, 3);
  const PlanarImage crop = preprocess_crop_resize(tall, 256);
  ASSERT_EQ(crop.height(), 256);
  ASSERT_EQ(crop.width(), 256);
  for (int y = 0; y < 256; y += 17)
    for (int x = 0; x < 256; x += 13) EXPECT_EQ(crop.at(y, x, 1), tall.at(128 + y, x, 1));

  const PlanarImage sq = oracle::random_image(rng, 300, 300, 3);
  const PlanarImage down = preprocess_crop_resize(sq, 256);
  EXPECT_EQ(down.height(), 256);
  EXPECT_EQ(down.width(), 256);
  EXPECT_TRUE(in_unit_range(down));

  for (auto [h, w] : {std::pair{30, 50}, std::pair{7, 3}, std::pair{100, 100}}) {
    const PlanarImage out = preprocess_crop_resize(PlanarImage(h, w, 3, 0.42), 64);
    for (double v : out.data()) ASSERT_NEAR(v, 0.42, 1e-15);
  }
  try {
    preprocess_crop_resize(PlanarImage(1, 10, 3), 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIngestion);
  }
}

}  // namespace
}  // namespace fakedet
