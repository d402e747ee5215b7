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
#include <span>

#include "atlbp/numgrad/tensor.hpp"

namespace atlbp::numgrad {

/// Probability floor applied before taking the log in cross_entropy.
inline constexpr double kProbabilityFloor = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Returns Wx + b. An empty `bias` means no bias term.
Vector apply_affine(const Matrix& weight, std::span<const double> bias, std::span<const double> x);

double sigmoid(double z) noexcept;

/// Max-shifted softmax; the result lies on the probability simplex.
Vector softmax(std::span<const double> logits);

/// -log(max(p[label], 1e-12)).
double cross_entropy(std::span<const double> probabilities, std::size_t label);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace atlbp::numgrad
