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

#include <gtest/gtest.h>

#include <random>

#include "atlbp/metrics/baselines.hpp"
#include "atlbp/model/network.hpp"
#include "atlbp/model/trainer.hpp"
#include "test_util.hpp"

namespace atlbp::model {
namespace {

using atlbp::testing::random_segment;
using atlbp::testing::tiny_config;

// Label is the index of the ψ channel that carries a +2 offset.
std::vector<data::Segment> offset_task(const ModelConfig& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<data::Segment> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % c.num_classes;
    auto s = random_segment(c, 3 + i % 3, label, rng, "u" + std::to_string(i % 4), i);
    for (auto& f : s.frames) f.psi[label] += 2.0;
    out.push_back(std::move(s));
  }
  return out;
}

TEST(Trainer, OneAdamStepPerSegmentPerEpoch) {
  ModelConfig c = tiny_config();
  c.epochs = 30;
  const auto segs = offset_task(c, 40, 1);
  const TrainResult r = train(c, segs);
  EXPECT_EQ(r.adam_steps, 1200u);
  EXPECT_EQ(r.epoch_losses.size(), 30u);
}

TEST(Trainer, SameSeedIsBitIdentical) {
  ModelConfig c = tiny_config();
  c.epochs = 3;
  c.seed = 42;
  const auto segs = offset_task(c, 12, 2);
  const TrainResult a = train(c, segs);
  const TrainResult b = train(c, segs);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
  c.seed = 43;
  EXPECT_FALSE(train(c, segs).params == a.params);
}

TEST(Trainer, LossAtLeastHalvesOnLearnableTask) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelConfig c = tiny_config();
    c.epochs = 20;
    c.learning_rate = 1e-2;
    c.seed = seed;
    const auto segs = offset_task(c, 30, 100 + seed);
    const TrainResult r = train(c, segs);
    EXPECT_LT(r.epoch_losses.back(), 0.5 * r.epoch_losses.front()) << "seed " << seed;
  }
}

TEST(Trainer, RejectsEmptyTrainingSetAndBadLabels) {
  const ModelConfig c = tiny_config();
  EXPECT_ATLBP_ERROR(train(c, std::vector<data::Segment>{}), ErrorKind::usage);
  auto segs = offset_task(c, 3, 1);
  segs[1].label = data::OutcomeLabel::SKIP;
  EXPECT_ATLBP_ERROR(train(c, segs), ErrorKind::data);
}

TEST(Personalize, LeavesBaseUntouchedAndChangesCopy) {
  ModelConfig c = tiny_config();
  c.epochs = 2;
  c.personalize_epochs = 3;
  const auto segs = offset_task(c, 9, 3);
  const ModelParams base = train(c, segs).params;
  const ModelParams snapshot = base;
  const PersonalizeResult r = personalize(base, std::span(segs).subspan(0, 3));
  EXPECT_EQ(base, snapshot);
  EXPECT_EQ(r.status, PersonalizeStatus::ok);
  EXPECT_EQ(r.epoch_losses.size(), 3u);
  EXPECT_FALSE(r.params == base);
}

TEST(Personalize, ZeroEpochsAndEmptySetReturnBase) {
  ModelConfig c = tiny_config();
  c.epochs = 1;
  const auto segs = offset_task(c, 6, 4);
  ModelParams base = train(c, segs).params;

  const PersonalizeResult empty = personalize(base, {});
  EXPECT_EQ(empty.status, PersonalizeStatus::empty_set);
  EXPECT_EQ(empty.params, base);

  ModelConfig zero = c;
  zero.personalize_epochs = 0;
  const ModelParams base0 = ModelParams::from_tensors(zero, base.tensors());
  const PersonalizeResult none = personalize(base0, segs);
  EXPECT_EQ(none.status, PersonalizeStatus::ok);
  EXPECT_EQ(none.params, base0);
}

}  // namespace
}  // namespace atlbp::model

namespace atlbp::metrics {
namespace {

TEST(Baselines, PredominantLabelPicksMostFrequentLowestOnTie) {
  const std::vector<std::size_t> a{6, 6, 1, 6, 2};
  EXPECT_EQ(PredominantLabelBaseline::fit(a).predict(), 6u);
  const std::vector<std::size_t> tie{3, 1, 3, 1};
  EXPECT_EQ(PredominantLabelBaseline::fit(tie).predict(), 1u);
  EXPECT_ATLBP_ERROR(PredominantLabelBaseline::fit(std::vector<std::size_t>{}), ErrorKind::usage);
}

TEST(Baselines, UntrainedMeanPoolIsUniform) {
  model::ModelConfig c = atlbp::testing::tiny_config();
  c.epochs = 0;
  std::mt19937_64 rng(1);
  std::vector<data::Segment> segs{atlbp::testing::random_segment(c, 4, 2, rng)};
  const auto clf = MeanPoolClassifier::train(c, segs);
  for (double p : clf.probabilities(segs[0])) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(clf.pooled_features(segs[0]).size(), c.fused_dim());
}

TEST(Baselines, MeanPoolPooledFeaturesAverageFusedFrames) {
  model::ModelConfig c = atlbp::testing::tiny_config();
  c.embedding_mode = model::EmbeddingMode::none;
  c.epochs = 0;
  std::mt19937_64 rng(2);
  std::vector<data::Segment> segs{atlbp::testing::random_segment(c, 3, 0, rng)};
  const auto clf = MeanPoolClassifier::train(c, segs);
  const auto pooled = clf.pooled_features(segs[0]);
  for (std::size_t d = 0; d < c.dim_psi; ++d) {
    const double m = (segs[0].frames[0].psi[d] + segs[0].frames[1].psi[d] + segs[0].frames[2].psi[d]) / 3.0;
    EXPECT_NEAR(pooled[d], m, 1e-15);
  }
}

}  // namespace
}  // namespace atlbp::metrics
