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
#include <string>
#include <string_view>
#include <vector>

#include "atlbp/numgrad/tensor.hpp"

namespace atlbp::numgrad {

struct ParamId {
  std::size_t index = 0;
  friend bool operator==(ParamId, ParamId) = default;
};

/// Ordered collection of named trainable tensors. Gradient and optimizer
/// moment buffers are ParameterSets with identical names and shapes.
class ParameterSet {
 public:
  ParamId add(std::string name, Matrix value);

  std::size_t size() const noexcept { return tensors_.size(); }
  std::size_t scalar_count() const noexcept;

  Matrix& operator[](ParamId id) { return tensors_[id.index]; }
  const Matrix& operator[](ParamId id) const { return tensors_[id.index]; }
  Matrix& at(std::size_t i) { return tensors_.at(i); }
  const Matrix& at(std::size_t i) const { return tensors_.at(i); }

  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<ParamId> find(std::string_view name) const;

  /// Same names and shapes, all entries zero.
  ParameterSet zeros_like() const;
  bool same_shape(const ParameterSet& other) const noexcept;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> tensors_;
};

using Gradients = ParameterSet;

double global_norm(const Gradients& grads) noexcept;

/// Rescales `grads` so their global L2 norm is at most `max_norm`.
void clip_global_norm(Gradients& grads, double max_norm);

}  // namespace atlbp::numgrad
