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

#include "atlbp/metrics/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "atlbp/error.hpp"
#include "atlbp/numgrad/adam.hpp"
#include "atlbp/numgrad/ops.hpp"
#include "atlbp/numgrad/tape.hpp"

namespace atlbp::metrics {

namespace {

using numgrad::GradTape;
using numgrad::Matrix;
using numgrad::NodeId;
using numgrad::ParameterSet;

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

// Parameter order: [affect weight, affect bias]? [identity weight, identity bias]? head weight, head bias.
ParameterSet make_params(const model::ModelConfig& c, std::mt19937_64& rng) {
  ParameterSet p;
  auto uniform = [&rng](std::size_t rows, std::size_t cols) {
    const double k = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> dist(-k, k);
    Matrix m(rows, cols);
    for (double& v : m.span()) v = dist(rng);
    return m;
  };
  if (c.uses_affect()) {
    p.add("compress_affect.weight", uniform(c.dim_ca, c.dim_rho));
    p.add("compress_affect.bias", Matrix(c.dim_ca, 1));
  }
  if (c.uses_identity()) {
    p.add("compress_identity.weight", uniform(c.dim_cv, c.dim_xi));
    p.add("compress_identity.bias", Matrix(c.dim_cv, 1));
  }
  p.add("head.weight", Matrix(c.num_classes, c.fused_dim()));
  p.add("head.bias", Matrix(c.num_classes, 1));
  return p;
}

NodeId record_pooled(GradTape& tape, const model::ModelConfig& c, const ParameterSet& p,
                     const data::Segment& s) {
  if (s.frames.empty()) fail(ErrorKind::data, "segment " + s.id() + " has no frames");
  std::vector<NodeId> fused;
  fused.reserve(s.frames.size());
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const data::FrameFeatures& frame = s.frames[f];
    const std::string where = "segment " + s.id() + " frame " + std::to_string(f);
    if (frame.psi.size() != c.dim_psi) fail(ErrorKind::config, where + ": psi length mismatch");
    std::vector<NodeId> parts{tape.constant(frame.psi)};
    auto compress = [&](const char* name, const std::optional<numgrad::Vector>& raw, std::size_t dim) {
      if (!raw) fail(ErrorKind::data, where + ": " + name + " embedding is required but missing");
      if (raw->size() != dim) fail(ErrorKind::config, where + ": " + name + " length mismatch");
      const std::string prefix = std::string("compress_") + name;
      NodeId z = tape.affine(*p.find(prefix + ".weight"), *p.find(prefix + ".bias"), tape.constant(*raw));
      parts.push_back(c.compress_tanh ? tape.tanh(z) : z);
    };
    if (c.uses_affect()) compress("affect", frame.rho, c.dim_rho);
    if (c.uses_identity()) compress("identity", frame.xi, c.dim_xi);
    fused.push_back(parts.size() == 1 ? parts.front() : tape.concat(parts));
  }
  return tape.mean(fused);
}

}  // namespace

PredominantLabelBaseline PredominantLabelBaseline::fit(std::span<const std::size_t> train_labels) {
  if (train_labels.empty()) fail(ErrorKind::usage, "predominant label baseline needs training labels");
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t y : train_labels) ++counts[y];
  std::size_t best = counts.begin()->first;
  for (const auto& [label, n] : counts) {
    if (n > counts[best]) best = label;
  }
  return PredominantLabelBaseline(best);
}

MeanPoolClassifier MeanPoolClassifier::train(const model::ModelConfig& config,
                                             std::span<const data::Segment> segments) {
  config.validate();
  if (segments.empty()) fail(ErrorKind::usage, "mean-pool baseline: empty training set");
  for (const data::Segment& s : segments) {
    if (data::class_index(s.label) >= config.num_classes) {
      fail(ErrorKind::data, "segment " + s.id() + " label is out of range");
    }
  }
  std::mt19937_64 init_rng(config.seed);
  MeanPoolClassifier clf(config, make_params(config, init_rng));
  if (config.epochs == 0) return clf;

  const auto head_w = *clf.params_.find("head.weight");
  const auto head_b = *clf.params_.find("head.bias");
  numgrad::AdamState adam(clf.params_, config.adam());
  std::mt19937_64 rng(config.seed ^ kShuffleStream);
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      GradTape tape(clf.params_);
      const NodeId pooled = record_pooled(tape, config, clf.params_, segments[idx]);
      const NodeId logits = tape.affine(head_w, head_b, pooled);
      const NodeId loss = tape.softmax_cross_entropy(logits, data::class_index(segments[idx].label));
      total += tape.value(loss)[0];
      numgrad::Gradients grads = tape.backward(loss);
      if (config.clip_norm > 0.0) numgrad::clip_global_norm(grads, config.clip_norm);
      adam.step(clf.params_, grads);
    }
    clf.epoch_losses_.push_back(total / static_cast<double>(segments.size()));
  }
  return clf;
}

std::vector<double> MeanPoolClassifier::pooled_features(const data::Segment& segment) const {
  GradTape tape(params_);
  return tape.value(record_pooled(tape, config_, params_, segment)).values();
}

std::vector<double> MeanPoolClassifier::probabilities(const data::Segment& segment) const {
  const std::vector<double> pooled = pooled_features(segment);
  const auto& w = params_[*params_.find("head.weight")];
  const auto& b = params_[*params_.find("head.bias")];
  return numgrad::softmax(numgrad::apply_affine(w, b.span(), pooled)).values();
}

std::size_t MeanPoolClassifier::predict(const data::Segment& segment) const {
  return numgrad::argmax(probabilities(segment));
}

}  // namespace atlbp::metrics
