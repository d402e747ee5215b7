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

#include "atlbp/numgrad/parameters.hpp"
#include "atlbp/numgrad/tensor.hpp"

namespace atlbp::numgrad {

struct NodeId {
  std::size_t index = 0;
};

/// Records vector-valued primitive operations during a forward pass and
/// replays them in reverse to accumulate parameter gradients.
///
/// The tape borrows the ParameterSet it was built against; parameters must
/// stay alive and unmodified until backward() returns. One tape per thread.
class GradTape {
 public:
  explicit GradTape(const ParameterSet& params);

  /// Leaf that receives no adjoint.
  NodeId constant(std::span<const double> values);
  /// Leaf whose adjoint is kept and can be read back after backward().
  NodeId variable(std::span<const double> values);

  /// weight * x + bias. Records a dimension error on shape mismatch.
  NodeId affine(ParamId weight, std::optional<ParamId> bias, NodeId x);
  NodeId concat(std::span<const NodeId> parts);
  NodeId slice(NodeId x, std::size_t offset, std::size_t length);
  NodeId sigmoid(NodeId x);
  NodeId tanh(NodeId x);
  NodeId mul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId scale(NodeId x, double factor);
  /// Elementwise average of equally sized nodes.
  NodeId mean(std::span<const NodeId> parts);
  /// Scalar node: cross_entropy(softmax(logits), label). The backward rule is
  /// the fused p - onehot(label).
  NodeId softmax_cross_entropy(NodeId logits, std::size_t label);

  const Vector& value(NodeId id) const;
  /// Softmax probabilities stored by a softmax_cross_entropy node.
  const Vector& probabilities(NodeId loss) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  void clear() noexcept;

  /// Reverse sweep from a scalar node. Returns gradients for every parameter
  /// of the bound ParameterSet; unused parameters get exact zeros.
  Gradients backward(NodeId loss);

  /// Adjoint of a node after backward(); zeros if it did not influence loss.
  Vector adjoint(NodeId id) const;

 private:
  enum class Op { constant, variable, affine, concat, slice, sigmoid, tanh, mul, add, scale, mean, softmax_xent };

  struct Node {
    Op op = Op::constant;
    Vector value;
    std::vector<std::size_t> inputs;
    bool needs_grad = false;
    ParamId weight{};
    std::optional<ParamId> bias;
    std::size_t offset = 0;
    std::size_t label = 0;
    double factor = 1.0;
    Vector aux;
  };

  NodeId push(Node node);
  const Node& node(NodeId id) const;
  bool inputs_need_grad(const std::vector<std::size_t>& inputs) const;

  const ParameterSet* params_;
  std::vector<Node> nodes_;
  std::vector<Vector> adjoints_;
};

}  // namespace atlbp::numgrad
