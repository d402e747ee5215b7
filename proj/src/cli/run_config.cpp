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

#include "atlbp/cli/run_config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "atlbp/cli/pipeline.hpp"
#include "atlbp/error.hpp"

namespace atlbp::cli {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;  // "" means "derived" (no fixed default)
};

// Resolution order of resolved_text(); also the set of accepted keys.
constexpr std::array kKeys = {
    // model
    KeyDefault{"embedding_mode", "both"},
    KeyDefault{"dim_ca", ""},
    KeyDefault{"dim_cv", ""},
    KeyDefault{"hidden_units", "200"},
    KeyDefault{"num_layers", "2"},
    KeyDefault{"learning_rate", "3e-05"},
    KeyDefault{"epochs", "30"},
    KeyDefault{"personalize_epochs", "30"},
    KeyDefault{"beta1", "0.9"},
    KeyDefault{"beta2", "0.999"},
    KeyDefault{"epsilon", "1e-08"},
    KeyDefault{"clip_norm", "0"},
    KeyDefault{"pooling", "last"},
    KeyDefault{"compress_tanh", "false"},
    KeyDefault{"seed", "0"},
    // protocol
    KeyDefault{"mode", "random"},
    KeyDefault{"k", "5"},
    KeyDefault{"fraction", "0.2"},
    KeyDefault{"target_fps", "3"},
    KeyDefault{"mean_pool_baseline", "false"},
    // paths
    KeyDefault{"manifest", ""},
    KeyDefault{"plan", ""},
    KeyDefault{"checkpoint", ""},
    KeyDefault{"out", ""},
    // synthetic generator
    KeyDefault{"n_users", "54"},
    KeyDefault{"max_sessions_per_user", "2"},
    KeyDefault{"two_session_fraction", "0.25925925925925924"},
    KeyDefault{"problems_min", "30"},
    KeyDefault{"problems_max", "51"},
    KeyDefault{"target_segments", "2749"},
    KeyDefault{"frames_min", "6"},
    KeyDefault{"frames_max", "15"},
    KeyDefault{"fps", "3"},
    KeyDefault{"label_distribution", "0.07,0.05,0.05,0.08,0.09,0.10,0.56"},
    KeyDefault{"signal_strength", "1"},
    KeyDefault{"baseline_scale", "0.5"},
    KeyDefault{"noise_scale", "1"},
    KeyDefault{"dim_psi", "49"},
    KeyDefault{"dim_rho", "256"},
    KeyDefault{"dim_xi", "128"},
};

bool is_path_key(std::string_view key) {
  return key == "manifest" || key == "plan" || key == "checkpoint" || key == "out";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  fail(ErrorKind::config, "config key '" + key + "': '" + value + "' is not " + expected);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a nonnegative integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) bad_value(key, v, "a number");
    return out;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a number");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

data::SplitKind to_mode(const std::string& v) {
  if (v == "random") return data::SplitKind::random_kfold;
  if (v == "leave-users-out") return data::SplitKind::leave_users_out;
  if (v == "leave-users-out-personalized") return data::SplitKind::personalized;
  bad_value("mode", v, "one of random | leave-users-out | leave-users-out-personalized");
}

}  // namespace

bool is_known_key(const std::string& key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return true;
  }
  return false;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::config, source + ":" + std::to_string(n) + ": expected 'key = value'");
    }
    try {
      cfg.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.kind(), source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot open config " + path.string());
  return parse(in, path.string());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) fail(ErrorKind::config, "unknown config key '" + key + "'");
  values_[key] = value;
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  for (const auto& k : kKeys) {
    if (key == k.key && k.value[0] != '\0') return std::string(k.value);
  }
  return std::nullopt;
}

model::ModelConfig RunConfig::model_config(const data::DatasetHeader& header) const {
  const std::string mode_name = *get("embedding_mode");
  const auto mode = model::parse_embedding_mode(mode_name);
  if (!mode) bad_value("embedding_mode", mode_name, "one of none | affect | identity | both");
  model::ModelConfig c = model::ModelConfig::for_mode(*mode);

  auto check_dim = [&](const char* key, std::size_t from_header) {
    if (const auto v = values_.find(key); v != values_.end() && to_size(key, v->second) != from_header) {
      fail(ErrorKind::config, std::string("config ") + key + " = " + v->second +
                                  " contradicts the dataset header value " + std::to_string(from_header));
    }
    return from_header;
  };
  c.dim_psi = check_dim("dim_psi", header.dim_psi);
  c.dim_rho = check_dim("dim_rho", header.dim_rho);
  c.dim_xi = check_dim("dim_xi", header.dim_xi);
  if (has("dim_ca")) c.dim_ca = to_size("dim_ca", *get("dim_ca"));
  if (has("dim_cv")) c.dim_cv = to_size("dim_cv", *get("dim_cv"));
  c.hidden_units = to_size("hidden_units", *get("hidden_units"));
  c.num_layers = to_size("num_layers", *get("num_layers"));
  c.learning_rate = to_double("learning_rate", *get("learning_rate"));
  c.epochs = to_size("epochs", *get("epochs"));
  c.personalize_epochs = to_size("personalize_epochs", *get("personalize_epochs"));
  c.beta1 = to_double("beta1", *get("beta1"));
  c.beta2 = to_double("beta2", *get("beta2"));
  c.epsilon = to_double("epsilon", *get("epsilon"));
  c.clip_norm = to_double("clip_norm", *get("clip_norm"));
  c.seed = to_u64("seed", *get("seed"));
  c.compress_tanh = to_bool("compress_tanh", *get("compress_tanh"));
  const std::string pooling = *get("pooling");
  const auto p = model::parse_pooling(pooling);
  if (!p) bad_value("pooling", pooling, "one of last | mean");
  c.pooling = *p;
  if (c.uses_affect() && header.dim_rho == 0) {
    fail(ErrorKind::config, "embedding_mode '" + mode_name + "' needs affect embeddings, dataset has none");
  }
  if (c.uses_identity() && header.dim_xi == 0) {
    fail(ErrorKind::config, "embedding_mode '" + mode_name + "' needs identity embeddings, dataset has none");
  }
  c.validate();
  return c;
}

ProtocolOptions RunConfig::protocol() const {
  ProtocolOptions p;
  p.mode = to_mode(*get("mode"));
  p.k = to_size("k", *get("k"));
  p.fraction = to_double("fraction", *get("fraction"));
  p.target_fps = to_double("target_fps", *get("target_fps"));
  p.mean_pool_baseline = to_bool("mean_pool_baseline", *get("mean_pool_baseline"));
  p.seed = to_u64("seed", *get("seed"));
  if (has("fraction") && p.mode != data::SplitKind::personalized) {
    fail(ErrorKind::usage, "fraction is only meaningful with mode leave-users-out-personalized");
  }
  if (!(p.fraction > 0.0 && p.fraction < 1.0)) fail(ErrorKind::usage, "fraction must lie in (0, 1)");
  if (!(p.target_fps > 0.0)) fail(ErrorKind::usage, "target_fps must be positive");
  return p;
}

synth::SyntheticSpec RunConfig::synthetic_spec() const {
  synth::SyntheticSpec s;
  s.n_users = to_size("n_users", *get("n_users"));
  s.max_sessions_per_user = to_size("max_sessions_per_user", *get("max_sessions_per_user"));
  s.two_session_fraction = to_double("two_session_fraction", *get("two_session_fraction"));
  s.problems_min = to_size("problems_min", *get("problems_min"));
  s.problems_max = to_size("problems_max", *get("problems_max"));
  s.target_segments = to_size("target_segments", *get("target_segments"));
  s.frames_min = to_size("frames_min", *get("frames_min"));
  s.frames_max = to_size("frames_max", *get("frames_max"));
  s.fps = to_double("fps", *get("fps"));
  s.signal_strength = to_double("signal_strength", *get("signal_strength"));
  s.baseline_scale = to_double("baseline_scale", *get("baseline_scale"));
  s.noise_scale = to_double("noise_scale", *get("noise_scale"));
  s.dim_psi = to_size("dim_psi", *get("dim_psi"));
  s.dim_rho = to_size("dim_rho", *get("dim_rho"));
  s.dim_xi = to_size("dim_xi", *get("dim_xi"));
  s.seed = to_u64("seed", *get("seed"));

  std::stringstream list(*get("label_distribution"));
  std::string item;
  std::size_t i = 0;
  while (std::getline(list, item, ',')) {
    if (i >= s.label_distribution.size()) bad_value("label_distribution", *get("label_distribution"), "7 numbers");
    s.label_distribution[i++] = to_double("label_distribution", trim(item));
  }
  if (i != s.label_distribution.size()) bad_value("label_distribution", *get("label_distribution"), "7 numbers");
  s.validate();
  return s;
}

std::string RunConfig::resolved_text() const {
  std::string out;
  for (const auto& k : kKeys) {
    if (is_path_key(k.key)) continue;
    const auto v = get(k.key);
    out += std::string(k.key) + " = " + (v ? *v : std::string("auto")) + "\n";
  }
  return out;
}

std::string RunConfig::input_paths_text() const {
  std::string out;
  for (const char* key : {"manifest", "plan", "checkpoint"}) {
    if (const auto v = get(key); v && !v->empty()) out += std::string(key) + " = " + *v + "\n";
  }
  return out;
}

std::string RunConfig::hash() const { return fnv1a_hex(resolved_text()); }

}  // namespace atlbp::cli
