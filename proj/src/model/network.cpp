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

#include "atlbp/model/network.hpp"

#include <cmath>
#include <string>

#include "atlbp/error.hpp"
#include "atlbp/numgrad/ops.hpp"

namespace atlbp::model {

namespace {

using numgrad::GradTape;
using numgrad::NodeId;

void check_length(std::span<const double> v, std::size_t expected, std::string_view what,
                  std::string_view where) {
  if (v.size() != expected) {
    fail(ErrorKind::config, std::string(where) + ": " + std::string(what) + " has length " +
                                std::to_string(v.size()) + " but the model expects " +
                                std::to_string(expected));
  }
}

const Vector& require_embedding(const std::optional<Vector>& v, std::size_t dim, const char* what,
                                std::string_view where) {
  if (!v) {
    fail(ErrorKind::data, std::string(where) + ": " + what +
                              " embedding is required by the embedding mode but missing");
  }
  check_length(*v, dim, what, where);
  return *v;
}

Vector compress(const numgrad::ParameterSet& t, const CompressionLayer& layer,
                std::span<const double> x, bool use_tanh) {
  Vector out = numgrad::apply_affine(t[layer.weight], t[layer.bias].span(), x);
  if (use_tanh) {
    for (double& v : out) v = std::tanh(v);
  }
  return out;
}

std::string frame_label(const data::Segment& segment, std::size_t f) {
  return "segment " + segment.id() + " frame " + std::to_string(f);
}

}  // namespace

CompressedEmbeddings compress_embeddings(const ModelParams& params, const std::optional<Vector>& rho,
                                         const std::optional<Vector>& xi, std::string_view where) {
  const ModelConfig& c = params.config();
  const auto& t = params.tensors();
  CompressedEmbeddings out;
  if (params.affect()) {
    const Vector& r = require_embedding(rho, c.dim_rho, "affect", where);
    out.affect = compress(t, *params.affect(), r, c.compress_tanh);
  }
  if (params.identity()) {
    const Vector& x = require_embedding(xi, c.dim_xi, "identity", where);
    out.identity = compress(t, *params.identity(), x, c.compress_tanh);
  }
  return out;
}

Vector fuse_features(std::span<const double> psi, const std::optional<Vector>& affect,
                     const std::optional<Vector>& identity) {
  std::vector<double> out(psi.begin(), psi.end());
  if (affect) out.insert(out.end(), affect->begin(), affect->end());
  if (identity) out.insert(out.end(), identity->begin(), identity->end());
  return Vector(std::move(out));
}

Vector fused_frame(const ModelParams& params, const data::FrameFeatures& frame,
                   std::string_view where) {
  check_length(frame.psi, params.config().dim_psi, "psi", where);
  const CompressedEmbeddings ce = compress_embeddings(params, frame.rho, frame.xi, where);
  return fuse_features(frame.psi, ce.affect, ce.identity);
}

LstmLayerState lstm_cell_step(const ModelParams& params, std::size_t layer,
                              std::span<const double> x, const LstmLayerState& state) {
  if (layer >= params.layers().size()) {
    fail(ErrorKind::usage, "lstm_cell_step: layer " + std::to_string(layer) + " does not exist");
  }
  const std::size_t h = params.config().hidden_units;
  if (state.hidden.size() != h || state.cell.size() != h) {
    fail(ErrorKind::dimension, "lstm_cell_step: state length does not match hidden_units");
  }
  if (!numgrad::all_finite(state.hidden) || !numgrad::all_finite(state.cell)) {
    fail(ErrorKind::numeric, "lstm_cell_step: non-finite state entering layer " + std::to_string(layer));
  }
  const auto& t = params.tensors();
  const LstmLayer& p = params.layers()[layer];
  Vector gates = numgrad::apply_affine(t[p.input_weight], t[p.bias].span(), x);
  const Vector recurrent = numgrad::apply_affine(t[p.recurrent_weight], {}, state.hidden);
  for (std::size_t i = 0; i < gates.size(); ++i) gates[i] += recurrent[i];

  LstmLayerState next = LstmLayerState::zeros(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double in = numgrad::sigmoid(gates[j]);
    const double forget = numgrad::sigmoid(gates[h + j]);
    const double candidate = std::tanh(gates[2 * h + j]);
    const double out = numgrad::sigmoid(gates[3 * h + j]);
    next.cell[j] = forget * state.cell[j] + in * candidate;
    next.hidden[j] = out * std::tanh(next.cell[j]);
  }
  return next;
}

Vector sequence_logits(const ModelParams& params, std::span<const data::FrameFeatures> frames) {
  if (frames.empty()) fail(ErrorKind::data, "classify_sequence: empty segment");
  const ModelConfig& c = params.config();
  std::vector<LstmLayerState> state(c.num_layers, LstmLayerState::zeros(c.hidden_units));
  Vector pooled(c.hidden_units);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    Vector x = fused_frame(params, frames[f], "frame " + std::to_string(f));
    for (std::size_t l = 0; l < c.num_layers; ++l) {
      state[l] = lstm_cell_step(params, l, l == 0 ? x.span() : state[l - 1].hidden.span(), state[l]);
    }
    const Vector& top = state.back().hidden;
    if (!numgrad::all_finite(top)) {
      fail(ErrorKind::numeric, "non-finite hidden state at timestep " + std::to_string(f));
    }
    if (c.pooling == Pooling::mean) {
      for (std::size_t j = 0; j < top.size(); ++j) pooled[j] += top[j];
    }
  }
  if (c.pooling == Pooling::mean) {
    for (double& v : pooled) v /= static_cast<double>(frames.size());
  } else {
    pooled = state.back().hidden;
  }
  const auto& t = params.tensors();
  return numgrad::apply_affine(t[params.head_weight()], t[params.head_bias()].span(), pooled);
}

Vector classify_sequence(const ModelParams& params, std::span<const data::FrameFeatures> frames) {
  return numgrad::softmax(sequence_logits(params, frames));
}

Prediction predict(const ModelParams& params, const data::Segment& segment) {
  if (segment.frames.empty()) fail(ErrorKind::data, "segment " + segment.id() + " has no frames");
  Prediction p;
  p.probabilities = classify_sequence(params, segment.frames);
  p.label = numgrad::argmax(p.probabilities);
  return p;
}

NodeId record_logits(GradTape& tape, const ModelParams& params, const data::Segment& segment) {
  if (segment.frames.empty()) fail(ErrorKind::data, "segment " + segment.id() + " has no frames");
  const ModelConfig& c = params.config();
  const std::size_t h = c.hidden_units;

  struct TapeState {
    NodeId hidden;
    NodeId cell;
  };
  std::vector<std::optional<TapeState>> state(c.num_layers);
  std::vector<NodeId> top_hidden;
  top_hidden.reserve(segment.frames.size());

  for (std::size_t f = 0; f < segment.frames.size(); ++f) {
    const data::FrameFeatures& frame = segment.frames[f];
    const std::string where = frame_label(segment, f);
    check_length(frame.psi, c.dim_psi, "psi", where);

    std::vector<NodeId> parts{tape.constant(frame.psi)};
    auto compressed = [&](const CompressionLayer& layer, const std::optional<Vector>& raw,
                          std::size_t dim, const char* what) {
      const Vector& v = require_embedding(raw, dim, what, where);
      NodeId z = tape.affine(layer.weight, layer.bias, tape.constant(v));
      return c.compress_tanh ? tape.tanh(z) : z;
    };
    if (params.affect()) parts.push_back(compressed(*params.affect(), frame.rho, c.dim_rho, "affect"));
    if (params.identity()) parts.push_back(compressed(*params.identity(), frame.xi, c.dim_xi, "identity"));
    NodeId x = parts.size() == 1 ? parts.front() : tape.concat(parts);

    for (std::size_t l = 0; l < c.num_layers; ++l) {
      const LstmLayer& p = params.layers()[l];
      NodeId gates = tape.affine(p.input_weight, p.bias, x);
      // The initial state is zero, so the recurrent term and f⊙c vanish at t = 0.
      if (state[l]) gates = tape.add(gates, tape.affine(p.recurrent_weight, std::nullopt, state[l]->hidden));
      const NodeId in = tape.sigmoid(tape.slice(gates, 0, h));
      const NodeId candidate = tape.tanh(tape.slice(gates, 2 * h, h));
      const NodeId out = tape.sigmoid(tape.slice(gates, 3 * h, h));
      NodeId cell = tape.mul(in, candidate);
      if (state[l]) {
        const NodeId forget = tape.sigmoid(tape.slice(gates, h, h));
        cell = tape.add(tape.mul(forget, state[l]->cell), cell);
      }
      const NodeId hidden = tape.mul(out, tape.tanh(cell));
      state[l] = TapeState{hidden, cell};
      x = hidden;
    }
    top_hidden.push_back(x);
  }
  const NodeId pooled = c.pooling == Pooling::mean ? tape.mean(top_hidden) : top_hidden.back();
  return tape.affine(params.head_weight(), params.head_bias(), pooled);
}

namespace {

void check_label(const ModelParams& params, const data::Segment& segment) {
  if (data::class_index(segment.label) >= params.config().num_classes) {
    fail(ErrorKind::label, "segment " + segment.id() + " label is outside 0.." +
                               std::to_string(params.config().num_classes - 1));
  }
}

}  // namespace

double segment_loss(const ModelParams& params, const data::Segment& segment) {
  check_label(params, segment);
  return numgrad::cross_entropy(classify_sequence(params, segment.frames),
                                data::class_index(segment.label));
}

std::pair<double, numgrad::Gradients> loss_and_gradient(const ModelParams& params,
                                                        const data::Segment& segment) {
  check_label(params, segment);
  GradTape tape(params.tensors());
  const NodeId logits = record_logits(tape, params, segment);
  const NodeId loss = tape.softmax_cross_entropy(logits, data::class_index(segment.label));
  const double value = tape.value(loss)[0];
  if (!std::isfinite(value)) fail(ErrorKind::numeric, "non-finite loss on segment " + segment.id());
  return {value, tape.backward(loss)};
}

}  // namespace atlbp::model
