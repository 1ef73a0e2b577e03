#include "fakedet/model_io.hpp"

#include <fstream>
#include <string>

#include "fakedet/binary_io.hpp"
#include "fakedet/error.hpp"
#include "fakedet/serialization.hpp"

namespace fakedet {

namespace {
constexpr char kMagic[4] = {'F', 'D', 'M', 'D'};
}

void write_model(std::ostream& out, const ModelParams& params) {
  params.check_shapes();
  nlohmann::json header;
  header["format_version"] = kModelFormatVersion;
  header["kind"] = to_string(params.kind);
  header["spec"] = params.spec;
  header["transform"] = params.transform;
  header["augment"] = params.augment;
  header["normalizer"] = params.normalizer;
  header["metadata"] = params.metadata;
  auto& table = header["tensors"] = nlohmann::json::array();
  for (const auto& t : params.tensors) table.push_back({{"name", t.name}, {"shape", t.tensor.shape}});
  const std::string text = header.dump();

  out.write(kMagic, 4);
  detail::write_le<std::uint32_t>(out, kModelFormatVersion);
  detail::write_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : params.tensors)
    for (double v : t.tensor.values) detail::write_le<double>(out, v);
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing model");
}

ModelParams read_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  require(in.gcount() == 4 && std::equal(magic, magic + 4, kMagic), ErrorKind::kIo,
          "not a model file (bad magic)");
  const auto version = detail::read_le<std::uint32_t>(in);
  require(version == kModelFormatVersion, ErrorKind::kIo,
          "unsupported model format version " + std::to_string(version));
  const auto header_bytes = detail::read_le<std::uint64_t>(in);
  require(header_bytes < (1ull << 32), ErrorKind::kIo, "model header is implausibly large");
  std::string text(header_bytes, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_bytes));
  require(static_cast<std::uint64_t>(in.gcount()) == header_bytes, ErrorKind::kIo, "truncated model header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("malformed model header: ") + e.what());
  }
  ModelParams params;
  try {
    params.kind = parse_stream_kind(header.at("kind").get<std::string>());
    header.at("spec").get_to(params.spec);
    header.at("transform").get_to(params.transform);
    header.at("augment").get_to(params.augment);
    header.at("normalizer").get_to(params.normalizer);
    params.metadata = header.value("metadata", nlohmann::json::object());
    for (const auto& entry : header.at("tensors")) {
      NamedTensor t;
      t.name = entry.at("name").get<std::string>();
      t.tensor.shape = entry.at("shape").get<std::vector<int>>();
      std::size_t n = 1;
      for (int d : t.tensor.shape) {
        require(d > 0, ErrorKind::kIo, "non-positive tensor dimension in " + t.name);
        n *= static_cast<std::size_t>(d);
      }
      t.tensor.values.resize(n);
      params.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kIo, std::string("malformed model header: ") + e.what());
  }
  for (auto& t : params.tensors)
    for (double& v : t.tensor.values) v = detail::read_le<double>(in);
  params.check_shapes();
  return params;
}

void save_model(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  write_model(out, params);
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  try {
    return read_model(in);
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace fakedet
