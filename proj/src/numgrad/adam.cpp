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

#include "atlbp/numgrad/adam.hpp"

#include <cmath>

#include "atlbp/error.hpp"

namespace atlbp::numgrad {

AdamState::AdamState(const ParameterSet& like, AdamOptions options)
    : options_(options), m_(like.zeros_like()), v_(like.zeros_like()) {
  if (!(options.learning_rate >= 0.0) || !(options.beta1 >= 0.0 && options.beta1 < 1.0) ||
      !(options.beta2 >= 0.0 && options.beta2 < 1.0) || !(options.epsilon > 0.0)) {
    fail(ErrorKind::config, "invalid Adam hyperparameters");
  }
}

void AdamState::step(ParameterSet& params, const Gradients& grads) {
  if (!params.same_shape(m_) || !grads.same_shape(m_)) {
    fail(ErrorKind::dimension, "adam_step: parameter/gradient shapes do not match optimizer state");
  }
  ++step_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(b1, t);
  const double correction2 = 1.0 - std::pow(b2, t);
  const double lr = options_.learning_rate;
  const double eps = options_.epsilon;

  for (std::size_t k = 0; k < params.size(); ++k) {
    double* theta = params.at(k).span().data();
    const double* g = grads.at(k).span().data();
    double* m = m_.at(k).span().data();
    double* v = v_.at(k).span().data();
    const std::size_t n = params.at(k).size();
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

}  // namespace atlbp::numgrad
