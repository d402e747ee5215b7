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

#include <cstdint>

#include "atlbp/numgrad/parameters.hpp"

namespace atlbp::numgrad {

struct AdamOptions {
  double learning_rate = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment buffers shaped like the parameters they update.
class AdamState {
 public:
  AdamState(const ParameterSet& like, AdamOptions options);

  const AdamOptions& options() const noexcept { return options_; }
  std::uint64_t step_count() const noexcept { return step_; }
  const ParameterSet& first_moment() const noexcept { return m_; }
  const ParameterSet& second_moment() const noexcept { return v_; }

  /// One bias-corrected Adam update of `params` in place.
  void step(ParameterSet& params, const Gradients& grads);

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  ParameterSet m_;
  ParameterSet v_;
};

inline void adam_step(AdamState& state, ParameterSet& params, const Gradients& grads) {
  state.step(params, grads);
}

}  // namespace atlbp::numgrad
