#include "afe/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "afe/binary.hpp"
#include "afe/error.hpp"
#include "afe/json_io.hpp"

namespace afe {
namespace {

constexpr std::string_view kMagic = "AFEN1";

std::string encode(const std::string& kind, const nlohmann::json& spec, const ParamSet& params) {
  nlohmann::json manifest;
  manifest["kind"] = kind;
  manifest["spec"] = spec;
  manifest["tensors"] = nlohmann::json::array();
  for (const auto& p : params) {
    manifest["tensors"].push_back({{"name", p.name}, {"shape", p.value.shape()}});
  }
  const std::string text = manifest.dump();
  std::string out(kMagic);
  binary::put_u64(out, text.size());
  out += text;
  for (const auto& p : params) {
    for (double v : p.value.data()) binary::put_f64(out, v);
  }
  return out;
}

struct Decoded {
  nlohmann::json spec;
  ParamSet params;
};

Decoded decode(const std::string& bytes, const std::string& kind) {
  binary::Reader in(bytes, "model file");
  if (in.take(kMagic.size()) != kMagic) throw InputError("model file: bad magic (expected AFEN1)");
  const std::uint64_t len = in.u64();
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in.take(len));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model file: manifest is not valid JSON: ") + e.what());
  }
  if (manifest.value("kind", std::string()) != kind) {
    throw InputError("model file: expected a " + kind + " model, found '" +
                     manifest.value("kind", std::string("?")) + "'");
  }
  Decoded d;
  d.spec = manifest.at("spec");
  for (const auto& t : manifest.at("tensors")) {
    Shape shape = t.at("shape").get<Shape>();
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = in.f64();
    d.params.push_back({t.at("name").get<std::string>(), Tensor(std::move(shape), std::move(values))});
  }
  if (!in.done()) throw InputError("model file: trailing bytes after tensor data");
  return d;
}

}  // namespace

std::string encode_model(const CnnModel& model) { return encode("cnn", model.spec(), model.params()); }
std::string encode_model(const RnnModel& model) { return encode("rnn", model.spec(), model.params()); }

CnnModel decode_cnn(const std::string& bytes) {
  auto d = decode(bytes, "cnn");
  return CnnModel(d.spec.get<CnnSpec>(), std::move(d.params));
}

RnnModel decode_rnn(const std::string& bytes) {
  auto d = decode(bytes, "rnn");
  return RnnModel(d.spec.get<RnnSpec>(), std::move(d.params));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

void save_model(const std::filesystem::path& path, const CnnModel& model) { write_file(path, encode_model(model)); }
void save_model(const std::filesystem::path& path, const RnnModel& model) { write_file(path, encode_model(model)); }
CnnModel load_cnn(const std::filesystem::path& path) { return decode_cnn(read_file(path)); }
RnnModel load_rnn(const std::filesystem::path& path) { return decode_rnn(read_file(path)); }

}  // namespace afe
