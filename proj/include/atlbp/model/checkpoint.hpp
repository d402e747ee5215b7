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

#pragma once

#include <filesystem>
#include <optional>

#include "atlbp/data/preprocess.hpp"
#include "atlbp/model/params.hpp"
#include "json.hpp"

namespace atlbp::model {

inline constexpr int kCheckpointFormatVersion = 1;

/// A trained model plus the preprocessing its inputs must go through.
struct Checkpoint {
  ModelParams params;
  std::optional<data::Normalizer> normalizer;
  std::optional<double> target_fps;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

nlohmann::ordered_json config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const nlohmann::json& j);

/// {format_version, config, params: {name: {shape, data}}, normalizer?, target_fps?}
/// Doubles are written in shortest round-trip decimal form, so loading
/// restores every value bit-exactly.
nlohmann::ordered_json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace atlbp::model
