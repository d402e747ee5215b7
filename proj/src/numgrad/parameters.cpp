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

#include "atlbp/numgrad/parameters.hpp"

#include <cmath>

#include "atlbp/error.hpp"

namespace atlbp::numgrad {

ParamId ParameterSet::add(std::string name, Matrix value) {
  if (find(name)) fail(ErrorKind::usage, "duplicate parameter name '" + name + "'");
  if (value.size() == 0) fail(ErrorKind::dimension, "parameter '" + name + "' is empty");
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
  return ParamId{tensors_.size() - 1};
}

std::size_t ParameterSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

std::optional<ParamId> ParameterSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return ParamId{i};
  }
  return std::nullopt;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  out.names_ = names_;
  out.tensors_.reserve(tensors_.size());
  for (const auto& t : tensors_) out.tensors_.emplace_back(t.rows(), t.cols(), 0.0);
  return out;
}

bool ParameterSet::same_shape(const ParameterSet& other) const noexcept {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].rows() != other.tensors_[i].rows() ||
        tensors_[i].cols() != other.tensors_[i].cols()) {
      return false;
    }
  }
  return true;
}

double global_norm(const Gradients& grads) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    for (double g : grads.at(i).span()) sum += g * g;
  }
  return std::sqrt(sum);
}

void clip_global_norm(Gradients& grads, double max_norm) {
  if (!(max_norm > 0.0)) fail(ErrorKind::usage, "clip_global_norm: max_norm must be positive");
  const double norm = global_norm(grads);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    for (double& g : grads.at(i).span()) g *= scale;
  }
}

}  // namespace atlbp::numgrad
