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

#include <span>

#include "atlbp/data/dataset.hpp"

namespace atlbp::data {

/// Keeps every round(fps / target_fps)-th frame starting at frame 0.
Segment downsample(const Segment& segment, double target_fps);

/// Per-dimension z-score statistics of ψ, fitted on training frames only.
/// ρ and ξ pass through unchanged.
struct Normalizer {
  static constexpr double kStdFloor = 1e-8;

  Vector mean;
  Vector stddev;

  Segment apply(const Segment& segment) const;
  friend bool operator==(const Normalizer&, const Normalizer&) = default;
};

Normalizer fit_normalizer(std::span<const Segment> train_segments);

}  // namespace atlbp::data
