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

#include "atlbp/numgrad/finite_difference.hpp"

#include <algorithm>
#include <cmath>

#include "atlbp/error.hpp"

namespace atlbp::numgrad {

Gradients finite_difference_gradient(const ScalarObjective& objective, ParameterSet params,
                                     double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::usage, "finite_difference_gradient: eps must be positive");
  Gradients grads = params.zeros_like();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const std::size_t n = params.at(k).size();
    for (std::size_t i = 0; i < n; ++i) {
      double& theta = params.at(k).span()[i];
      const double saved = theta;
      theta = saved + eps;
      const double up = objective(params);
      theta = saved - eps;
      const double down = objective(params);
      theta = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        fail(ErrorKind::numeric, "finite_difference_gradient: objective is not finite near '" +
                                     params.name(k) + "'[" + std::to_string(i) + "]");
      }
      grads.at(k).span()[i] = (up - down) / (2.0 * eps);
    }
  }
  return grads;
}

double relative_error(double a, double b, double floor) noexcept {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

double max_relative_error(const Gradients& a, const Gradients& b, double floor) {
  if (!a.same_shape(b)) fail(ErrorKind::dimension, "max_relative_error: gradient shapes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto av = a.at(k).span();
    const auto bv = b.at(k).span();
    for (std::size_t i = 0; i < av.size(); ++i) {
      worst = std::max(worst, relative_error(av[i], bv[i], floor));
    }
  }
  return worst;
}

}  // namespace atlbp::numgrad
