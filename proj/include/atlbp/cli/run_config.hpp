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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "atlbp/cli/pipeline.hpp"
#include "atlbp/data/dataset.hpp"
#include "atlbp/model/config.hpp"
#include "atlbp/synth/generator.hpp"

namespace atlbp::cli {

/// Flat `key = value` settings shared by every subcommand. Lines starting
/// with '#' are comments. Unknown keys are rejected.
class RunConfig {
 public:
  static RunConfig parse(std::istream& in, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  /// Sets one key; config error for unknown keys.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;

  /// Model settings; dims come from the dataset header.
  model::ModelConfig model_config(const data::DatasetHeader& header) const;
  ProtocolOptions protocol() const;
  synth::SyntheticSpec synthetic_spec() const;

  /// Every non-path key with its effective value, one per line, in a fixed
  /// order. File paths are left out so the text identifies settings only.
  std::string resolved_text() const;
  /// manifest/plan/checkpoint lines for the keys that are set.
  std::string input_paths_text() const;
  /// FNV-1a of resolved_text(), as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

bool is_known_key(const std::string& key);

}  // namespace atlbp::cli
