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
#include <span>
#include <vector>

#include "atlbp/data/dataset.hpp"
#include "atlbp/model/params.hpp"

namespace atlbp::model {

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;  // mean cross-entropy per epoch
  std::uint64_t adam_steps = 0;
};

/// Seeds the PRNG from config.seed, initializes weights, then runs
/// config.epochs epochs of per-segment Adam steps over a reshuffled order.
TrainResult train(const ModelConfig& config, std::span<const data::Segment> segments);

/// Continues training `start` for `epochs` epochs with a fresh optimizer.
/// The shuffle PRNG is seeded with `shuffle_seed`.
TrainResult fit(ModelParams start, std::span<const data::Segment> segments, std::size_t epochs,
                std::uint64_t shuffle_seed);

enum class PersonalizeStatus { ok, empty_set };

struct PersonalizeResult {
  ModelParams params;
  PersonalizeStatus status = PersonalizeStatus::ok;
  std::vector<double> epoch_losses;
};

/// Fine-tunes a copy of `base` on one user's earliest segments for
/// config.personalize_epochs epochs. `base` is never modified. An empty set
/// returns an unchanged copy with status empty_set.
PersonalizeResult personalize(const ModelParams& base, std::span<const data::Segment> segments);

}  // namespace atlbp::model
