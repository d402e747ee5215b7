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

#include <optional>
#include <random>
#include <vector>

#include "atlbp/model/config.hpp"
#include "atlbp/numgrad/parameters.hpp"

namespace atlbp::model {

using numgrad::ParamId;

struct CompressionLayer {
  ParamId weight;  // [dim_c x dim_embedding]
  ParamId bias;    // [dim_c x 1]
};

/// Gate rows are stacked in the order input, forget, candidate, output.
struct LstmLayer {
  ParamId input_weight;      // [4H x Din]
  ParamId recurrent_weight;  // [4H x H]
  ParamId bias;              // [4H x 1]
};

/// All trainable weights of the network, together with the config that
/// shaped them.
class ModelParams {
 public:
  /// All-zero weights.
  static ModelParams zeros(const ModelConfig& config);
  /// U(-k, k) with k = 1/sqrt(fan_in); forget-gate bias 1, other biases 0.
  static ModelParams initialize(const ModelConfig& config, std::mt19937_64& rng);
  /// Adopts tensors loaded from disk after checking names and shapes.
  static ModelParams from_tensors(const ModelConfig& config, numgrad::ParameterSet tensors);

  const ModelConfig& config() const noexcept { return config_; }
  numgrad::ParameterSet& tensors() noexcept { return tensors_; }
  const numgrad::ParameterSet& tensors() const noexcept { return tensors_; }

  const std::optional<CompressionLayer>& affect() const noexcept { return affect_; }
  const std::optional<CompressionLayer>& identity() const noexcept { return identity_; }
  const std::vector<LstmLayer>& layers() const noexcept { return layers_; }
  ParamId head_weight() const noexcept { return head_weight_; }
  ParamId head_bias() const noexcept { return head_bias_; }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.config_ == b.config_ && a.tensors_ == b.tensors_;
  }

 private:
  explicit ModelParams(const ModelConfig& config);

  ModelConfig config_;
  numgrad::ParameterSet tensors_;
  std::optional<CompressionLayer> affect_;
  std::optional<CompressionLayer> identity_;
  std::vector<LstmLayer> layers_;
  ParamId head_weight_;
  ParamId head_bias_;
};

}  // namespace atlbp::model
