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

#include <array>
#include <cstddef>
#include <cstdint>

#include "atlbp/data/dataset.hpp"
#include "json.hpp"

namespace atlbp::synth {

/// Number of leading ψ dimensions that carry the class signatures, one
/// channel per outcome class.
inline constexpr std::size_t kSignalDims = data::kNumOutcomes;

/// Size of the latent code that ρ and ξ expand: class channels plus a
/// per-user identity code.
inline constexpr std::size_t kIdentityDims = 4;

struct SyntheticSpec {
  std::size_t n_users = 54;
  std::size_t max_sessions_per_user = 2;   // 1 or 2
  double two_session_fraction = 14.0 / 54.0;
  std::size_t problems_min = 30;
  std::size_t problems_max = 51;
  /// When nonzero, problems are spread over sessions to total exactly this.
  std::size_t target_segments = 2749;
  std::size_t frames_min = 6;
  std::size_t frames_max = 15;
  double fps = 3.0;
  /// Outcome probabilities in label-code order (ATT .. SOF).
  std::array<double, data::kNumOutcomes> label_distribution = {0.07, 0.05, 0.05, 0.08,
                                                               0.09, 0.10, 0.56};
  double signal_strength = 1.0;  // α
  double baseline_scale = 0.5;   // β
  double noise_scale = 1.0;
  std::size_t dim_psi = 49;
  std::size_t dim_rho = 256;  // 0 omits ρ from every frame
  std::size_t dim_xi = 128;   // 0 omits ξ from every frame
  std::uint64_t seed = 0;

  /// Throws a config error naming the first violated constraint.
  void validate() const;
};

/// Temporal signature of class `label` at relative time u in [0, 1]: ramp up,
/// ramp down, mid pulse, constant offset, oscillation, late pulse, zero.
double signature(data::OutcomeLabel label, double u) noexcept;

/// Frame ψ = b_user + α·s_label(t/T)·e_label + noise; ρ and ξ are fixed random
/// linear expansions of [α·s_label + user signal offset, user identity code].
data::Dataset generate(const SyntheticSpec& spec);

struct DatasetSummary {
  std::size_t users = 0;
  std::size_t sessions = 0;
  std::size_t segments = 0;
  std::array<std::size_t, data::kNumOutcomes> label_histogram{};
  std::size_t frames_total = 0;
  std::size_t frames_min = 0;
  std::size_t frames_max = 0;
  double frames_mean = 0.0;
};

DatasetSummary describe(const data::Dataset& dataset);
nlohmann::ordered_json to_json(const DatasetSummary& summary);

}  // namespace atlbp::synth
