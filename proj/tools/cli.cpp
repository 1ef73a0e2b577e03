#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fakedet/corpus.hpp"
#include "fakedet/cube_io.hpp"
#include "fakedet/error.hpp"
#include "fakedet/evaluation.hpp"
#include "fakedet/image_io.hpp"
#include "fakedet/model_io.hpp"
#include "fakedet/report.hpp"
#include "fakedet/serialization.hpp"
#include "fakedet/trainer.hpp"
#include "fakedet/transforms.hpp"

namespace fakedet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Everything a run can be configured with. A --config file supplies any
// subset; flags given on the command line win.
struct RunConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  SynthConfig synth;
  SynthCounts counts;
  TransformConfig transform;
  AugmentConfig augment;
  TrainConfig train;
  RobustnessConfig robustness;
  std::string stream = "frequency";
  double threshold = 0.5;
  json paths = json::object();
};

json to_json(const RunConfig& c) {
  return json{{"seed", c.seed},
              {"workers", c.workers},
              {"synth", c.synth},
              {"counts", {{"train", c.counts.train}, {"val", c.counts.val}, {"test", c.counts.test}}},
              {"transform", c.transform},
              {"augment", c.augment},
              {"train", c.train},
              {"robustness", c.robustness},
              {"stream", c.stream},
              {"threshold", c.threshold},
              {"paths", c.paths}};
}

void merge_json(const json& j, RunConfig& c) {
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("synth")) j.at("synth").get_to(c.synth);
    if (j.contains("counts")) {
      const auto& k = j.at("counts");
      c.counts.train = k.value("train", c.counts.train);
      c.counts.val = k.value("val", c.counts.val);
      c.counts.test = k.value("test", c.counts.test);
    }
    if (j.contains("transform")) j.at("transform").get_to(c.transform);
    if (j.contains("augment")) j.at("augment").get_to(c.augment);
    if (j.contains("train")) j.at("train").get_to(c.train);
    if (j.contains("robustness")) j.at("robustness").get_to(c.robustness);
    if (j.contains("stream")) c.stream = j.at("stream").get<std::string>();
    if (j.contains("threshold")) c.threshold = j.at("threshold").get<double>();
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidConfig, std::string("bad config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  RunConfig c;
  if (path.empty()) return c;
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidConfig, "cannot parse config " + path + ": " + e.what());
  }
  merge_json(j, c);
  return c;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  out << text;
}

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto sep = text.find_first_of(",:");
  require(sep != std::string::npos, ErrorKind::kInvalidConfig,
          std::string(what) + " must look like LO,HI (got '" + text + "')");
  try {
    return {std::stod(text.substr(0, sep)), std::stod(text.substr(sep + 1))};
  } catch (const std::logic_error&) {
    fail(ErrorKind::kInvalidConfig, std::string(what) + " must look like LO,HI (got '" + text + "')");
  }
}

template <class T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<T>(std::stod(item)));
    } catch (const std::logic_error&) {
      fail(ErrorKind::kInvalidConfig, "bad list entry '" + item + "'");
    }
  }
  return out;
}

// Options shared between subcommands; each one is only applied when given.
struct CommonFlags {
  std::string config;
  std::uint64_t seed = 0;
  int workers = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run config; flags override its values")->check(CLI::ExistingFile);
    seed_opt = app->add_option("--seed", seed, "Seed for all randomness");
    workers_opt = app->add_option("--workers", workers, "Parallel workers (results do not depend on it)")
                      ->check(CLI::PositiveNumber);
  }

  RunConfig resolve() const {
    RunConfig c = load_config(config);
    if (seed_opt->count()) c.seed = seed;
    if (workers_opt->count()) c.workers = workers;
    return c;
  }
};

struct TransformFlags {
  std::string colorspace, transforms, block_size;
  bool chroma_swap = false;

  void attach(CLI::App* app) {
    app->add_option("--colorspace", colorspace, "rgb or ycbcr")->check(CLI::IsMember({"rgb", "ycbcr"}));
    app->add_option("--transforms", transforms, "dft, dwt or dft,dwt")
        ->check(CLI::IsMember({"dft", "dwt", "dft,dwt", "dwt,dft"}));
    app->add_option("--block-size", block_size, "8, 16, 32 or full")
        ->check(CLI::IsMember({"8", "16", "32", "full"}));
    app->add_flag("--chroma-swap", chroma_swap, "Unscaled Cb = R - Y, Cr = B - Y");
  }

  void apply(TransformConfig& t) const {
    if (!colorspace.empty()) t.colorspace = parse_colorspace(colorspace);
    if (!transforms.empty()) t.set_transforms(transforms);
    if (!block_size.empty()) t.block = BlockSize::parse(block_size);
    if (chroma_swap) t.chroma = ChromaConvention::kSwapped;
  }
};

struct AugmentFlags {
  std::optional<double> prob;
  std::string blur_range, jpeg_range;

  void attach(CLI::App* app) {
    app->add_option("--aug-prob", prob, "Probability of each training perturbation")->check(CLI::Range(0.0, 1.0));
    app->add_option("--aug-blur-range", blur_range, "Blur sigma range LO,HI");
    app->add_option("--aug-jpeg-range", jpeg_range, "JPEG quality range LO,HI");
  }

  void apply(AugmentConfig& a) const {
    if (prob) a.probability = *prob;
    if (!blur_range.empty()) a.blur_sigma_range = parse_range(blur_range, "--aug-blur-range");
    if (!jpeg_range.empty()) {
      const auto [lo, hi] = parse_range(jpeg_range, "--aug-jpeg-range");
      a.jpeg_quality_range = {static_cast<int>(lo), static_cast<int>(hi)};
    }
  }
};

std::vector<ModelParams> load_models(const std::string& model, const std::string& a, const std::string& b) {
  std::vector<ModelParams> models;
  if (!model.empty()) models.push_back(load_model(model));
  if (!a.empty()) models.push_back(load_model(a));
  if (!b.empty()) models.push_back(load_model(b));
  require(models.size() == 1 || models.size() == 2, ErrorKind::kInvalidConfig,
          "give --model, or --model-a and --model-b");
  return models;
}

json model_paths(const std::string& model, const std::string& a, const std::string& b) {
  json j = json::object();
  if (!model.empty()) j["model"] = model;
  if (!a.empty()) j["model_a"] = a;
  if (!b.empty()) j["model_b"] = b;
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stream fake image detector: frequency (DFT + Haar DWT) and spatial streams"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the synthetic real/fake corpus");
  CommonFlags synth_common;
  synth_common.attach(synth);
  std::string synth_out;
  std::optional<std::size_t> n_train, n_val, n_test;
  std::optional<int> size, upsample;
  std::optional<double> smoothness, amplitude;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--n-train", n_train, "Training images per class");
  synth->add_option("--n-val", n_val, "Validation images per class");
  synth->add_option("--n-test", n_test, "Test images per class");
  synth->add_option("--size", size, "Image side in pixels");
  synth->add_option("--smoothness", smoothness, "Random field blur sigma");
  synth->add_option("--artifact-amplitude", amplitude, "Checkerboard amplitude of fake images");
  synth->add_option("--upsample-factor", upsample, "Pooling/upsampling factor of fake images");

  // transform
  auto* transform = app.add_subcommand("transform", "Write the frequency cube of one image (FQC1)");
  CommonFlags transform_common;
  transform_common.attach(transform);
  TransformFlags transform_flags;
  transform_flags.attach(transform);
  std::string transform_in, transform_out;
  transform->add_option("--in", transform_in, "Input PNG or JPEG")->required()->check(CLI::ExistingFile);
  transform->add_option("--out", transform_out, "Output cube file")->required();

  // train
  auto* train = app.add_subcommand("train", "Train one stream");
  CommonFlags train_common;
  train_common.attach(train);
  TransformFlags train_transform;
  train_transform.attach(train);
  AugmentFlags train_aug;
  train_aug.attach(train);
  std::string train_data, train_out, stream, precision;
  std::optional<int> epochs, batch_size;
  std::optional<double> lr, wd;
  train->add_option("--stream", stream, "spatial or frequency")->check(CLI::IsMember({"spatial", "frequency"}));
  train->add_option("--data", train_data, "Corpus root with train/ and val/")->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", train_out, "Model file to write")->required();
  train->add_option("--epochs", epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  train->add_option("--batch-size", batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  train->add_option("--lr", lr, "Adam learning rate");
  train->add_option("--weight-decay", wd, "L2 weight decay");
  train->add_option("--precision", precision, "f64 or f32 arithmetic")->check(CLI::IsMember({"f64", "f32"}));

  // eval
  auto* eval = app.add_subcommand("eval", "Score one model, or two models and their fusion");
  CommonFlags eval_common;
  eval_common.attach(eval);
  std::string eval_model, eval_a, eval_b, eval_data, eval_out;
  std::optional<double> threshold;
  eval->add_option("--model", eval_model, "Single model file")->check(CLI::ExistingFile);
  eval->add_option("--model-a", eval_a, "First stream model")->check(CLI::ExistingFile);
  eval->add_option("--model-b", eval_b, "Second stream model")->check(CLI::ExistingFile);
  eval->add_option("--data", eval_data, "Directory with real/ and fake/")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--out", eval_out, "CSV output (default: print to stdout)");
  eval->add_option("--threshold", threshold, "Decide fake when p_fake exceeds this");

  // robustness
  auto* robust = app.add_subcommand("robustness", "Blur and JPEG sweep over test images");
  CommonFlags robust_common;
  robust_common.attach(robust);
  std::string rob_model, rob_a, rob_b, rob_data, rob_out, sigmas, qualities;
  robust->add_option("--model", rob_model, "Single model file")->check(CLI::ExistingFile);
  robust->add_option("--model-a", rob_a, "First stream model")->check(CLI::ExistingFile);
  robust->add_option("--model-b", rob_b, "Second stream model")->check(CLI::ExistingFile);
  robust->add_option("--data", rob_data, "Test directory with real/ and fake/")->required()->check(CLI::ExistingDirectory);
  robust->add_option("--out", rob_out, "Output directory")->required();
  robust->add_option("--blur-sigmas", sigmas, "Comma-separated sigmas (empty for none)");
  robust->add_option("--jpeg-qualities", qualities, "Comma-separated qualities (empty for none)");

  // report
  auto* report = app.add_subcommand("report", "Render tables and charts from sweep CSVs");
  std::vector<std::string> report_in;
  std::string report_out;
  report->add_option("--in", report_in, "Sweep CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) {
      RunConfig c = synth_common.resolve();
      c.synth.seed = c.seed;
      if (n_train) c.counts.train = *n_train;
      if (n_val) c.counts.val = *n_val;
      if (n_test) c.counts.test = *n_test;
      if (size) c.synth.size = *size;
      if (smoothness) c.synth.base_smoothness = *smoothness;
      if (amplitude) c.synth.artifact_amplitude = *amplitude;
      if (upsample) c.synth.upsample_factor = *upsample;
      c.synth.validate(c.transform.block.is_full() ? 1 : c.transform.block.pixels());
      c.paths = {{"out", synth_out}};
      write_synth_corpus(synth_out, c.synth, c.counts);
      write_json(fs::path(synth_out) / "run_config.json", to_json(c));
      out << "wrote " << 2 * (c.counts.train + c.counts.val + c.counts.test) << " images to " << synth_out << '\n';
    } else if (*transform) {
      RunConfig c = transform_common.resolve();
      transform_flags.apply(c.transform);
      c.paths = {{"in", transform_in}, {"out", transform_out}};
      const auto cube = assemble_frequency_cube(read_image(transform_in), c.transform);
      write_cube_file(transform_out, cube.data);
      write_json(transform_out + ".config.json", to_json(c));
      out << "wrote " << cube.data.height() << "x" << cube.data.width() << "x" << cube.channels() << " cube to "
          << transform_out << '\n';
    } else if (*train) {
      RunConfig c = train_common.resolve();
      train_transform.apply(c.transform);
      train_aug.apply(c.augment);
      if (!stream.empty()) c.stream = stream;
      if (epochs) c.train.epochs = *epochs;
      if (batch_size) c.train.batch_size = *batch_size;
      if (lr) c.train.learning_rate = *lr;
      if (wd) c.train.weight_decay = *wd;
      if (!precision.empty()) c.train.precision = precision == "f32" ? Precision::kFloat32 : Precision::kFloat64;
      c.train.seed = c.seed;
      c.augment.seed = c.seed;
      c.train.workers = c.workers;
      c.paths = {{"data", train_data}, {"out", train_out}};
      const StreamKind kind = parse_stream_kind(c.stream);
      const auto train_set = load_image_dir(fs::path(train_data) / "train", Split::kTrain);
      const auto val_set = load_image_dir(fs::path(train_data) / "val", Split::kVal);
      const auto result = train_stream(kind, train_set, val_set, c.train, c.transform, c.augment,
                                       [&](const EpochRecord& r) {
                                         out << "epoch " << r.epoch << " loss " << r.train_loss << " train_acc "
                                             << r.train_accuracy << " val_acc " << r.val_accuracy << '\n';
                                       });
      ModelParams params = result.params;
      params.metadata["run_config"] = to_json(c);
      save_model(train_out, params);
      write_json(train_out + ".config.json", to_json(c));
      out << "best epoch " << result.best_epoch << ", model written to " << train_out << '\n';
    } else if (*eval) {
      RunConfig c = eval_common.resolve();
      if (threshold) c.threshold = *threshold;
      c.paths = model_paths(eval_model, eval_a, eval_b);
      c.paths["data"] = eval_data;
      if (!eval_out.empty()) c.paths["out"] = eval_out;
      const auto models = load_models(eval_model, eval_a, eval_b);
      const auto data = load_image_dir(eval_data, Split::kTest);
      std::vector<SweepRow> rows;
      for (auto& nr : evaluate_dataset(models, data, c.threshold, c.workers))
        rows.push_back({PerturbationKind::kNone, 0.0, nr.model, nr.report});
      if (eval_out.empty()) {
        write_sweep_csv(out, rows);
      } else {
        write_sweep_csv(fs::path(eval_out), rows);
        write_json(eval_out + ".config.json", to_json(c));
        out << render_markdown_table(rows);
      }
    } else if (*robust) {
      RunConfig c = robust_common.resolve();
      if (robust->count("--blur-sigmas")) c.robustness.blur_sigmas = parse_list<double>(sigmas);
      if (robust->count("--jpeg-qualities")) c.robustness.jpeg_qualities = parse_list<int>(qualities);
      c.paths = model_paths(rob_model, rob_a, rob_b);
      c.paths["data"] = rob_data;
      c.paths["out"] = rob_out;
      const auto models = load_models(rob_model, rob_a, rob_b);
      const auto data = load_image_dir(rob_data, Split::kTest);
      const auto rows = robustness_sweep(models, data, c.robustness, c.threshold, c.workers);
      const fs::path dir(rob_out);
      fs::create_directories(dir);
      write_sweep_csv(dir / "sweep.csv", rows);
      write_text(dir / "blur.svg", render_accuracy_svg(rows, PerturbationKind::kBlur, "Accuracy under Gaussian blur"));
      write_text(dir / "jpeg.svg", render_accuracy_svg(rows, PerturbationKind::kJpeg, "Accuracy under JPEG compression"));
      write_json(dir / "run_config.json", to_json(c));
      out << render_markdown_table(rows);
    } else if (*report) {
      std::vector<SweepRow> rows;
      for (const auto& p : report_in) {
        auto part = read_sweep_csv(p);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const fs::path dir(report_out);
      fs::create_directories(dir);
      const std::string table = render_markdown_table(rows);
      write_text(dir / "report.md", "# Detection results\n\n" + table);
      const bool has_blur = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.kind == PerturbationKind::kBlur; });
      const bool has_jpeg = std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.kind == PerturbationKind::kJpeg; });
      if (has_blur)
        write_text(dir / "blur.svg", render_accuracy_svg(rows, PerturbationKind::kBlur, "Accuracy under Gaussian blur"));
      if (has_jpeg)
        write_text(dir / "jpeg.svg", render_accuracy_svg(rows, PerturbationKind::kJpeg, "Accuracy under JPEG compression"));
      write_json(dir / "run_config.json", json{{"inputs", report_in}, {"out", report_out}});
      out << table;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kInvalidConfig ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace fakedet::cli
