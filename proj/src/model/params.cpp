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

#include "atlbp/model/params.hpp"

#include <cmath>
#include <string>

#include "atlbp/error.hpp"

namespace atlbp::model {

using numgrad::Matrix;

ModelParams::ModelParams(const ModelConfig& config) : config_(config) {
  config_.validate();
  auto& t = tensors_;
  if (config_.uses_affect()) {
    affect_ = CompressionLayer{t.add("compress_affect.weight", Matrix(config_.dim_ca, config_.dim_rho)),
                               t.add("compress_affect.bias", Matrix(config_.dim_ca, 1))};
  }
  if (config_.uses_identity()) {
    identity_ = CompressionLayer{t.add("compress_identity.weight", Matrix(config_.dim_cv, config_.dim_xi)),
                                 t.add("compress_identity.bias", Matrix(config_.dim_cv, 1))};
  }
  const std::size_t h = config_.hidden_units;
  std::size_t input = config_.fused_dim();
  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    const std::string prefix = "lstm" + std::to_string(l) + ".";
    layers_.push_back(LstmLayer{t.add(prefix + "input_weight", Matrix(4 * h, input)),
                                t.add(prefix + "recurrent_weight", Matrix(4 * h, h)),
                                t.add(prefix + "bias", Matrix(4 * h, 1))});
    input = h;
  }
  head_weight_ = t.add("head.weight", Matrix(config_.num_classes, h));
  head_bias_ = t.add("head.bias", Matrix(config_.num_classes, 1));
}

ModelParams ModelParams::zeros(const ModelConfig& config) { return ModelParams(config); }

ModelParams ModelParams::initialize(const ModelConfig& config, std::mt19937_64& rng) {
  ModelParams p(config);
  auto fill_uniform = [&rng](Matrix& m, std::size_t fan_in) {
    const double k = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-k, k);
    for (double& v : m.span()) v = dist(rng);
  };
  auto& t = p.tensors_;
  if (p.affect_) fill_uniform(t[p.affect_->weight], config.dim_rho);
  if (p.identity_) fill_uniform(t[p.identity_->weight], config.dim_xi);
  const std::size_t h = config.hidden_units;
  for (std::size_t l = 0; l < p.layers_.size(); ++l) {
    const LstmLayer& layer = p.layers_[l];
    fill_uniform(t[layer.input_weight], t[layer.input_weight].cols());
    fill_uniform(t[layer.recurrent_weight], h);
    auto bias = t[layer.bias].span();
    for (std::size_t i = h; i < 2 * h; ++i) bias[i] = 1.0;
  }
  fill_uniform(t[p.head_weight_], h);
  return p;
}

ModelParams ModelParams::from_tensors(const ModelConfig& config, numgrad::ParameterSet tensors) {
  ModelParams p(config);
  if (!p.tensors_.same_shape(tensors)) {
    // Report the first offending tensor for a useful message.
    for (std::size_t i = 0; i < p.tensors_.size(); ++i) {
      const auto id = tensors.find(p.tensors_.name(i));
      if (!id) fail(ErrorKind::config, "checkpoint lacks tensor '" + p.tensors_.name(i) + "'");
      const Matrix& got = tensors[*id];
      const Matrix& want = p.tensors_.at(i);
      if (got.rows() != want.rows() || got.cols() != want.cols()) {
        fail(ErrorKind::config, "tensor '" + p.tensors_.name(i) + "' is " +
                                    std::to_string(got.rows()) + "x" + std::to_string(got.cols()) +
                                    ", config requires " + std::to_string(want.rows()) + "x" +
                                    std::to_string(want.cols()));
      }
    }
    fail(ErrorKind::config, "checkpoint tensors do not match the model config");
  }
  p.tensors_ = std::move(tensors);
  return p;
}

}  // namespace atlbp::model
