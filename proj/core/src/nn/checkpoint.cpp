#include "hyperorder/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "hyperorder/error.hpp"
#include "json.hpp"

namespace hyperorder::nn {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "hyperorder-model";

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from(const json& j, const std::string& what) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != rows * cols) {
    throw FormatError(what + ": data length " + std::to_string(data.size()) + " != " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.values().begin());
  return m;
}

}  // namespace

std::string serialize_model(const Model& model) {
  json j;
  j["format"] = kFormatTag;
  j["version"] = kCheckpointVersion;
  j["h"] = model.h;
  j["d_feat"] = model.d_feat;
  json vocab = json::array();
  for (const auto& k : model.vocab.keys()) vocab.push_back(k.str());
  j["vocab"] = vocab;
  json layers = json::array();
  for (const auto& layer : model.layers) {
    json messages = json::array();
    for (const auto& m : layer.messages) messages.push_back(matrix_json(m));
    const auto& g = layer.gru;
    layers.push_back({{"timesteps", layer.timesteps},
                      {"residual_sources", layer.residual_sources},
                      {"messages", messages},
                      {"gru",
                       {{"wz", matrix_json(g.wz)},
                        {"uz", matrix_json(g.uz)},
                        {"bz", g.bz},
                        {"wr", matrix_json(g.wr)},
                        {"ur", matrix_json(g.ur)},
                        {"br", g.br},
                        {"wh", matrix_json(g.wh)},
                        {"uh", matrix_json(g.uh)},
                        {"bh", g.bh}}}});
  }
  j["layers"] = layers;
  j["readout"] = {{"w1", matrix_json(model.readout.w1)},
                  {"b1", model.readout.b1},
                  {"w2", matrix_json(model.readout.w2)},
                  {"b2", model.readout.b2}};
  return j.dump(1) + "\n";
}

Model deserialize_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatTag) throw FormatError("not a model checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw FormatError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                        std::to_string(kCheckpointVersion) + ")");
    }
    Model m;
    m.h = j.at("h").get<std::uint32_t>();
    m.d_feat = j.at("d_feat").get<std::uint32_t>();
    std::vector<SignTriple> keys;
    for (const auto& k : j.at("vocab")) keys.push_back(SignTriple::parse(k.get<std::string>()));
    m.vocab = Vocabulary(keys);
    if (m.vocab.keys() != keys) throw FormatError("vocabulary is not sorted and unique");
    for (const auto& lj : j.at("layers")) {
      Layer layer;
      layer.timesteps = lj.at("timesteps").get<int>();
      layer.residual_sources = lj.at("residual_sources").get<std::vector<int>>();
      for (const auto& mj : lj.at("messages")) layer.messages.push_back(matrix_from(mj, "message"));
      const auto& gj = lj.at("gru");
      auto& g = layer.gru;
      g.wz = matrix_from(gj.at("wz"), "gru.wz");
      g.uz = matrix_from(gj.at("uz"), "gru.uz");
      g.bz = gj.at("bz").get<std::vector<double>>();
      g.wr = matrix_from(gj.at("wr"), "gru.wr");
      g.ur = matrix_from(gj.at("ur"), "gru.ur");
      g.br = gj.at("br").get<std::vector<double>>();
      g.wh = matrix_from(gj.at("wh"), "gru.wh");
      g.uh = matrix_from(gj.at("uh"), "gru.uh");
      g.bh = gj.at("bh").get<std::vector<double>>();
      m.layers.push_back(std::move(layer));
    }
    const auto& rj = j.at("readout");
    m.readout.w1 = matrix_from(rj.at("w1"), "readout.w1");
    m.readout.b1 = rj.at("b1").get<std::vector<double>>();
    m.readout.w2 = matrix_from(rj.at("w2"), "readout.w2");
    m.readout.b2 = rj.at("b2").get<std::vector<double>>();
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << serialize_model(model);
  if (!out) throw Error("write failed for " + path);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace hyperorder::nn
