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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "atlbp/data/dataset.hpp"
#include "atlbp/model/config.hpp"
#include "atlbp/numgrad/parameters.hpp"

namespace atlbp::metrics {

/// Constant predictor emitting the most frequent training label; ties go to
/// the lowest label code.
class PredominantLabelBaseline {
 public:
  static PredominantLabelBaseline fit(std::span<const std::size_t> train_labels);

  std::size_t label() const noexcept { return label_; }
  std::size_t predict() const noexcept { return label_; }

 private:
  explicit PredominantLabelBaseline(std::size_t label) : label_(label) {}
  std::size_t label_;
};

/// Non-temporal classifier: averages the fused per-frame features over time
/// and applies one affine + softmax layer. The compression layers are shared
/// with the LSTM path's definition and trained jointly.
class MeanPoolClassifier {
 public:
  /// Uses config dims, learning rate, Adam settings, epochs and seed. The head
  /// starts at zero, so an untrained classifier predicts the uniform distribution.
  static MeanPoolClassifier train(const model::ModelConfig& config,
                                  std::span<const data::Segment> segments);

  /// Mean of fused frame vectors (ψ ⊕ c_a(ρ) ⊕ c_v(ξ)) of a segment.
  std::vector<double> pooled_features(const data::Segment& segment) const;
  std::vector<double> probabilities(const data::Segment& segment) const;
  std::size_t predict(const data::Segment& segment) const;

  const model::ModelConfig& config() const noexcept { return config_; }
  const numgrad::ParameterSet& params() const noexcept { return params_; }
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }

 private:
  MeanPoolClassifier(const model::ModelConfig& config, numgrad::ParameterSet params)
      : config_(config), params_(std::move(params)) {}

  model::ModelConfig config_;
  numgrad::ParameterSet params_;
  std::vector<double> epoch_losses_;
};

}  // namespace atlbp::metrics
