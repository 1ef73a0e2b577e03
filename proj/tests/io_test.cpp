#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fakedet/error.hpp"
#include "fakedet/image_io.hpp"
#include "fakedet/model_io.hpp"
#include "fakedet/report.hpp"
#include "fakedet/serialization.hpp"
#include "oracles.hpp"

namespace fakedet {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fakedet_io_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(ImageIoTest, QuantizeRoundsAndClamps) {
  const PlanarImage img(1, 2, 2, std::vector<double>{-0.5, 0.5, 1.7, 0.2});
  const auto bytes = quantize_8bit(img);
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0, 128, 255, 51}));
  const PlanarImage back = dequantize_8bit(bytes, 1, 2, 2);
  EXPECT_EQ(back.at(0, 0, 1), 128.0 / 255.0);
}

TEST(ImageIoTest, PngRoundTripIsExactOn8BitValues) {
  std::mt19937_64 rng(71);
  PlanarImage img(12, 20, 3);
  for (double& v : img.data()) v = static_cast<double>(rng() % 256) / 255.0;
  const fs::path p = scratch("rt.png");
  write_png(p, img);
  EXPECT_EQ(read_image(p), img);
}

TEST(ImageIoTest, ReadsJpegAndRejectsGarbage) {
  const PlanarImage img(16, 16, 3, 0.5);
  const auto bytes = encode_jpeg(img, 90);
  const fs::path p = scratch("x.jpg");
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                            static_cast<std::streamsize>(bytes.size()));
  const PlanarImage back = read_image(p);
  EXPECT_TRUE(back.same_shape(img));
  EXPECT_EQ(decode_jpeg(bytes), back);

  const fs::path bad = scratch("bad.png");
  std::ofstream(bad) << "garbage";
  try {
    read_image(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIngestion);
  }
  EXPECT_THROW(read_image(scratch("missing.png")), Error);
  const std::vector<std::uint8_t> junk{0xFF, 0xD8, 0x00, 0x01};
  EXPECT_THROW(decode_jpeg(junk), Error);
}

ModelParams sample_model() {
  NetworkSpec spec;
  spec.input_channels = 6;
  spec.stem_width = 4;
  spec.block_widths = {4, 8};
  ModelParams p = init_params(spec, 12);
  p.kind = StreamKind::kFrequency;
  p.transform.set_transforms("dft");
  p.transform.block = BlockSize(16);
  p.augment.probability = 0.25;
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int c = 0; c < 6; ++c) {
    p.normalizer.mean.push_back(u(rng));
    p.normalizer.std.push_back(std::abs(u(rng)) * 1e-17 + 1e-8);
  }
  p.tensor("head.bias").values = {0.1 + 0.2, -5e-324};
  p.metadata = {{"best_epoch", 3}, {"note", "x"}};
  return p;
}

TEST(ModelIoTest, RoundTripIsBitExact) {
  const ModelParams p = sample_model();
  std::stringstream buf;
  write_model(buf, p);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "FDMD");
  const ModelParams q = read_model(buf);
  EXPECT_EQ(q, p);
  std::stringstream again;
  write_model(again, q);
  EXPECT_EQ(again.str(), bytes);

  const fs::path path = scratch("m.model");
  save_model(path, p);
  EXPECT_EQ(load_model(path), p);
}

TEST(ModelIoTest, RejectsCorruptFiles) {
  std::stringstream buf;
  write_model(buf, sample_model());
  const std::string bytes = buf.str();
  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  std::stringstream a(wrong_magic);
  EXPECT_THROW(read_model(a), Error);
  std::string wrong_version = bytes;
  wrong_version[4] = 9;
  std::stringstream b(wrong_version);
  EXPECT_THROW(read_model(b), Error);
  std::stringstream c(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_model(c), Error);
  try {
    load_model(scratch("nope.model"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(SerializationTest, ConfigsRoundTripAndAcceptPartialObjects) {
  TrainConfig t;
  t.learning_rate = 0.003;
  t.epochs = 7;
  t.precision = Precision::kFloat32;
  t.network.block_widths = {8, 16};
  EXPECT_EQ(nlohmann::json(t).get<TrainConfig>(), t);

  TransformConfig x;
  x.colorspace = Colorspace::kRgb;
  x.chroma = ChromaConvention::kSwapped;
  x.block = BlockSize::full();
  x.set_transforms("dwt");
  EXPECT_EQ(nlohmann::json(x).get<TransformConfig>(), x);

  AugmentConfig a;
  a.blur_sigma_range = {1.0, 2.0};
  a.jpeg_quality_range = {60, 80};
  EXPECT_EQ(nlohmann::json(a).get<AugmentConfig>(), a);

  SynthConfig s;
  s.seed = 0xFFFFFFFFFFFFull;
  EXPECT_EQ(nlohmann::json(s).get<SynthConfig>(), s);

  RobustnessConfig r{{1.5}, {10, 20}};
  EXPECT_EQ(nlohmann::json(r).get<RobustnessConfig>(), r);

  const auto partial = nlohmann::json{{"epochs", 3}}.get<TrainConfig>();
  EXPECT_EQ(partial.epochs, 3);
  EXPECT_EQ(partial.batch_size, 24);
  EXPECT_EQ(partial.weight_decay, 5e-4);
  EXPECT_EQ(partial.learning_rate, 1e-4);
}

TEST(ReportTest, CsvRoundTripSvgAndMarkdown) {
  std::vector<SweepRow> rows;
  MetricsReport m;
  m.accuracy = 0.75;
  m.f1_fake = {0.8, false};
  m.f1_real = {0.0, true};
  m.n = 40;
  rows.push_back({PerturbationKind::kNone, 0, "fused", m});
  rows.push_back({PerturbationKind::kBlur, 3, "spatial", m});
  rows.push_back({PerturbationKind::kBlur, 5, "spatial", m});
  rows.push_back({PerturbationKind::kJpeg, 85, "frequency", m});
  const fs::path p = scratch("sweep.csv");
  write_sweep_csv(p, rows);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("perturbation_kind,perturbation_value,model,accuracy,f1_fake,f1_real,n", 0), 0u);
  const auto back = read_sweep_csv(p);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(back[1].kind, PerturbationKind::kBlur);
  EXPECT_EQ(back[1].value, 3);
  EXPECT_EQ(back[3].model, "frequency");
  EXPECT_EQ(back[0].report.accuracy, 0.75);
  EXPECT_TRUE(back[0].report.f1_real.degenerate);
  EXPECT_EQ(back[0].report.n, 40);

  const std::string svg = render_accuracy_svg(rows, PerturbationKind::kBlur, "blur");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find("spatial"), std::string::npos);
  EXPECT_EQ(svg.find("frequency"), std::string::npos);
  const std::string md = render_markdown_table(rows);
  EXPECT_NE(md.find("| blur"), std::string::npos);
}

}  // namespace
}  // namespace fakedet
