// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "atlbp/model/checkpoint.hpp"

#include <fstream>

#include "atlbp/error.hpp"

namespace atlbp::model {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json config_to_json(const ModelConfig& c) {
  ordered_json j;
  j["dim_psi"] = c.dim_psi;
  j["dim_rho"] = c.dim_rho;
  j["dim_xi"] = c.dim_xi;
  j["dim_ca"] = c.dim_ca;
  j["dim_cv"] = c.dim_cv;
  j["hidden_units"] = c.hidden_units;
  j["num_classes"] = c.num_classes;
  j["num_layers"] = c.num_layers;
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["personalize_epochs"] = c.personalize_epochs;
  j["batch_size"] = c.batch_size;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  j["clip_norm"] = c.clip_norm;
  j["seed"] = c.seed;
  j["embedding_mode"] = std::string(to_string(c.embedding_mode));
  j["pooling"] = std::string(to_string(c.pooling));
  j["compress_tanh"] = c.compress_tanh;
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.dim_psi = j.at("dim_psi").get<std::size_t>();
    c.dim_rho = j.at("dim_rho").get<std::size_t>();
    c.dim_xi = j.at("dim_xi").get<std::size_t>();
    c.dim_ca = j.at("dim_ca").get<std::size_t>();
    c.dim_cv = j.at("dim_cv").get<std::size_t>();
    c.hidden_units = j.at("hidden_units").get<std::size_t>();
    c.num_classes = j.at("num_classes").get<std::size_t>();
    c.num_layers = j.at("num_layers").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.personalize_epochs = j.at("personalize_epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.beta1 = j.at("beta1").get<double>();
    c.beta2 = j.at("beta2").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.compress_tanh = j.at("compress_tanh").get<bool>();
    const auto mode = parse_embedding_mode(j.at("embedding_mode").get<std::string>());
    const auto pooling = parse_pooling(j.at("pooling").get<std::string>());
    if (!mode) fail(ErrorKind::config, "checkpoint config: unknown embedding_mode");
    if (!pooling) fail(ErrorKind::config, "checkpoint config: unknown pooling");
    c.embedding_mode = *mode;
    c.pooling = *pooling;
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("checkpoint config: ") + e.what());
  }
  c.validate();
  return c;
}

ordered_json checkpoint_to_json(const Checkpoint& cp) {
  ordered_json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["config"] = config_to_json(cp.params.config());
  ordered_json params = ordered_json::object();
  const auto& t = cp.params.tensors();
  for (std::size_t i = 0; i < t.size(); ++i) {
    ordered_json entry;
    entry["shape"] = {t.at(i).rows(), t.at(i).cols()};
    entry["data"] = t.at(i).values();
    params[t.name(i)] = std::move(entry);
  }
  j["params"] = std::move(params);
  if (cp.normalizer) {
    j["normalizer"] = {{"mean", cp.normalizer->mean.values()},
                       {"stddev", cp.normalizer->stddev.values()}};
  }
  if (cp.target_fps) j["target_fps"] = *cp.target_fps;
  return j;
}

Checkpoint checkpoint_from_json(const json& j) {
  if (!j.is_object() || j.value("format_version", 0) != kCheckpointFormatVersion) {
    fail(ErrorKind::config, "unsupported checkpoint format_version");
  }
  const ModelConfig config = config_from_json(j.at("config"));
  const ModelParams shape = ModelParams::zeros(config);
  numgrad::ParameterSet tensors;
  try {
    const json& params = j.at("params");
    const auto& expected = shape.tensors();
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const std::string& name = expected.name(i);
      if (!params.contains(name)) fail(ErrorKind::config, "checkpoint lacks tensor '" + name + "'");
      const json& entry = params[name];
      const auto dims = entry.at("shape").get<std::vector<std::size_t>>();
      if (dims.size() != 2) fail(ErrorKind::config, "tensor '" + name + "' shape must have 2 dims");
      tensors.add(name, numgrad::Matrix(dims[0], dims[1], entry.at("data").get<std::vector<double>>()));
    }
    if (params.size() != expected.size()) {
      fail(ErrorKind::config, "checkpoint has tensors the config does not define");
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::config, std::string("checkpoint params: ") + e.what());
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    numgrad::require_finite(tensors.at(i).span(), "checkpoint tensor '" + tensors.name(i) + "'");
  }

  Checkpoint cp{ModelParams::from_tensors(config, std::move(tensors)), std::nullopt, std::nullopt};
  if (j.contains("normalizer")) {
    const json& n = j["normalizer"];
    cp.normalizer = data::Normalizer{numgrad::Vector(n.at("mean").get<std::vector<double>>()),
                                     numgrad::Vector(n.at("stddev").get<std::vector<double>>())};
    if (cp.normalizer->mean.size() != config.dim_psi || cp.normalizer->stddev.size() != config.dim_psi) {
      fail(ErrorKind::config, "checkpoint normalizer length does not match dim_psi");
    }
  }
  if (j.contains("target_fps")) cp.target_fps = j["target_fps"].get<double>();
  return cp;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  out << checkpoint_to_json(checkpoint).dump() << '\n';
  if (!out) fail(ErrorKind::data, "write error in " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::data, path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace atlbp::model
