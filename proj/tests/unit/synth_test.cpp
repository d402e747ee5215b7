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

#include <cmath>
#include <set>
#include <sstream>

#include "atlbp/synth/generator.hpp"
#include "test_util.hpp"

namespace atlbp::synth {
namespace {

using data::OutcomeLabel;

SyntheticSpec small_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.n_users = 8;
  s.target_segments = 200;
  s.dim_rho = 16;
  s.dim_xi = 8;
  s.seed = seed;
  return s;
}

std::string serialize(const data::Dataset& d) {
  std::ostringstream out;
  data::write_dataset(d, out);
  return out.str();
}

TEST(Synth, SignatureShapes) {
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::ATT, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::ATT, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::GIVEUP, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::GUESS, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::NOTR, 0.3), 1.0);
  EXPECT_NEAR(signature(OutcomeLabel::SHINT, 0.125), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::SKIP, 0.85), 1.0);
  EXPECT_DOUBLE_EQ(signature(OutcomeLabel::SOF, 0.7), 0.0);
}

TEST(Synth, SameSeedIsByteIdentical) {
  const std::string a = serialize(generate(small_spec(3)));
  EXPECT_EQ(a, serialize(generate(small_spec(3))));
  EXPECT_NE(a, serialize(generate(small_spec(4))));
}

TEST(Synth, DefaultCorpusShape) {
  SyntheticSpec spec;
  spec.dim_rho = 4;  // corpus shape does not depend on embedding width
  spec.dim_xi = 4;
  const data::Dataset d = generate(spec);
  const DatasetSummary s = describe(d);
  EXPECT_EQ(s.users, 54u);
  EXPECT_EQ(s.sessions, 68u);
  EXPECT_EQ(s.segments, 2749u);
  EXPECT_GE(s.frames_min, 6u);
  EXPECT_LE(s.frames_max, 15u);
  const double sof = static_cast<double>(s.label_histogram[6]) / 2749.0;
  EXPECT_NEAR(sof, 0.56, 0.04);
  EXPECT_NO_THROW(data::validate(d));
  EXPECT_EQ(d.header.dim_psi, 49u);
}

TEST(Synth, ProblemIndicesAreChronologicalPerSession) {
  const data::Dataset d = generate(small_spec(1));
  std::set<std::string> ids;
  for (const auto& s : d.segments) EXPECT_TRUE(ids.insert(s.id()).second);
}

// Mean of the label's own channel, averaged over segments of that label.
double own_channel_mean(const data::Dataset& d, OutcomeLabel label) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : d.segments) {
    if (s.label != label) continue;
    for (const auto& f : s.frames) {
      sum += f.psi[data::class_index(label)];
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

TEST(Synth, SignalStrengthControlsLabelInformation) {
  SyntheticSpec spec = small_spec(5);
  spec.target_segments = 600;
  spec.baseline_scale = 0.0;
  spec.signal_strength = 3.0;
  EXPECT_GT(own_channel_mean(generate(spec), OutcomeLabel::NOTR), 2.0);
  spec.signal_strength = 0.0;
  EXPECT_LT(std::abs(own_channel_mean(generate(spec), OutcomeLabel::NOTR)), 0.3);
}

TEST(Synth, EmbeddingsCanBeOmitted) {
  SyntheticSpec spec = small_spec(2);
  spec.dim_rho = 0;
  const data::Dataset d = generate(spec);
  EXPECT_EQ(d.header.dim_rho, 0u);
  EXPECT_FALSE(d.segments[0].frames[0].rho);
  EXPECT_TRUE(d.segments[0].frames[0].xi);
}

TEST(Synth, ValidateRejectsBadSpecs) {
  SyntheticSpec spec = small_spec(0);
  spec.dim_psi = 6;
  EXPECT_ATLBP_ERROR(generate(spec), ErrorKind::config);
  spec = small_spec(0);
  spec.frames_min = 9;
  spec.frames_max = 3;
  EXPECT_ATLBP_ERROR(generate(spec), ErrorKind::config);
  spec = small_spec(0);
  spec.label_distribution = {1, 0, 0, 0, 0, 0, 0.5};
  EXPECT_ATLBP_ERROR(generate(spec), ErrorKind::config);
}

}  // namespace
}  // namespace atlbp::synth
