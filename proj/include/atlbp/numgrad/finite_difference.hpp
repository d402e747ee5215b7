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

#include <functional>

#include "atlbp/numgrad/parameters.hpp"

namespace atlbp::numgrad {

using ScalarObjective = std::function<double(const ParameterSet&)>;

/// Central differences (f(θ+eps·e_i) − f(θ−eps·e_i)) / (2·eps) for every
/// scalar of every parameter. `objective` must be deterministic.
Gradients finite_difference_gradient(const ScalarObjective& objective, ParameterSet params,
                                     double eps);

/// |a − b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor = 1e-4) noexcept;

/// Largest relative_error over all matching entries.
double max_relative_error(const Gradients& a, const Gradients& b, double floor = 1e-4);

}  // namespace atlbp::numgrad
