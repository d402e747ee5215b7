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

#include "atlbp/model/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "atlbp/error.hpp"
#include "atlbp/model/network.hpp"
#include "atlbp/numgrad/adam.hpp"

namespace atlbp::model {

namespace {

// Distinguishes the shuffle stream from the initialization stream.
constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

void check_labels(const ModelConfig& config, std::span<const data::Segment> segments) {
  for (const data::Segment& s : segments) {
    if (data::class_index(s.label) >= config.num_classes) {
      fail(ErrorKind::data, "segment " + s.id() + " label is outside 0.." +
                                std::to_string(config.num_classes - 1));
    }
  }
}

}  // namespace

TrainResult fit(ModelParams start, std::span<const data::Segment> segments, std::size_t epochs,
                std::uint64_t shuffle_seed) {
  const ModelConfig& config = start.config();
  check_labels(config, segments);
  TrainResult result{std::move(start), {}, 0};
  if (segments.empty() || epochs == 0) return result;

  numgrad::AdamState adam(result.params.tensors(), config.adam());
  std::mt19937_64 rng(shuffle_seed);
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      auto [loss, grads] = loss_and_gradient(result.params, segments[idx]);
      if (config.clip_norm > 0.0) numgrad::clip_global_norm(grads, config.clip_norm);
      adam.step(result.params.tensors(), grads);
      total += loss;
    }
    result.epoch_losses.push_back(total / static_cast<double>(segments.size()));
  }
  result.adam_steps = adam.step_count();
  return result;
}

TrainResult train(const ModelConfig& config, std::span<const data::Segment> segments) {
  config.validate();
  if (segments.empty()) fail(ErrorKind::usage, "train: empty training set");
  check_labels(config, segments);
  std::mt19937_64 init_rng(config.seed);
  ModelParams params = ModelParams::initialize(config, init_rng);
  return fit(std::move(params), segments, config.epochs, config.seed ^ kShuffleStream);
}

PersonalizeResult personalize(const ModelParams& base, std::span<const data::Segment> segments) {
  if (segments.empty()) return {base, PersonalizeStatus::empty_set, {}};
  const ModelConfig& config = base.config();
  TrainResult tuned = fit(base, segments, config.personalize_epochs, config.seed ^ kShuffleStream);
  return {std::move(tuned.params), PersonalizeStatus::ok, std::move(tuned.epoch_losses)};
}

}  // namespace atlbp::model
