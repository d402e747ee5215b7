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
#include <string_view>
#include <utility>
#include <vector>

#include "atlbp/data/dataset.hpp"
#include "atlbp/model/params.hpp"
#include "atlbp/numgrad/tape.hpp"

namespace atlbp::model {

using numgrad::Vector;

struct CompressedEmbeddings {
  std::optional<Vector> affect;    // c_a(ρ), present iff the mode uses affect
  std::optional<Vector> identity;  // c_v(ξ), present iff the mode uses identity
};

/// Applies the learned compression layers. `where` names the segment/frame in
/// the data error raised when a required embedding is missing.
CompressedEmbeddings compress_embeddings(const ModelParams& params, const std::optional<Vector>& rho,
                                         const std::optional<Vector>& xi,
                                         std::string_view where = "frame");

/// ψ ⊕ c_a ⊕ c_v, skipping absent parts.
Vector fuse_features(std::span<const double> psi, const std::optional<Vector>& affect,
                     const std::optional<Vector>& identity);

/// Fused vector for one frame.
Vector fused_frame(const ModelParams& params, const data::FrameFeatures& frame,
                   std::string_view where = "frame");

struct LstmLayerState {
  Vector hidden;
  Vector cell;

  static LstmLayerState zeros(std::size_t hidden_units) {
    return {Vector(hidden_units), Vector(hidden_units)};
  }
};

/// One step of layer `layer`: i, f, o = σ(·), g = tanh(·), c' = f⊙c + i⊙g,
/// h' = o⊙tanh(c').
LstmLayerState lstm_cell_step(const ModelParams& params, std::size_t layer,
                              std::span<const double> x, const LstmLayerState& state);

/// Head logits after running the stacked LSTM over all frames.
Vector sequence_logits(const ModelParams& params, std::span<const data::FrameFeatures> frames);

/// Class probabilities for a frame sequence (T >= 1).
Vector classify_sequence(const ModelParams& params, std::span<const data::FrameFeatures> frames);

struct Prediction {
  std::size_t label = 0;
  Vector probabilities;
};

/// argmax of classify_sequence; ties go to the lowest class index.
Prediction predict(const ModelParams& params, const data::Segment& segment);

/// Records the full forward pass of one segment on `tape` and returns the
/// logits node.
numgrad::NodeId record_logits(numgrad::GradTape& tape, const ModelParams& params,
                              const data::Segment& segment);

/// Cross-entropy of one segment.
double segment_loss(const ModelParams& params, const data::Segment& segment);

/// Loss and its gradient with respect to every parameter.
std::pair<double, numgrad::Gradients> loss_and_gradient(const ModelParams& params,
                                                        const data::Segment& segment);

}  // namespace atlbp::model
