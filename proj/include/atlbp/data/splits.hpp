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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "atlbp/data/dataset.hpp"
#include "json.hpp"

namespace atlbp::data {

enum class SplitKind { random_kfold, leave_users_out, personalized };

const char* to_string(SplitKind kind) noexcept;

/// Segment indices refer to positions in the dataset the plan was built from.
struct Fold {
  std::vector<std::size_t> train;
  /// Evaluation set. In a personalized plan the fine-tune segments are removed.
  std::vector<std::size_t> test;
  /// user_id -> that user's fine-tune segments, earliest problems first.
  std::map<std::string, std::vector<std::size_t>> personalize;
  /// "user/session" keys whose every problem went to personalization.
  std::vector<std::string> unevaluated_sessions;

  friend bool operator==(const Fold&, const Fold&) = default;
};

struct SplitPlan {
  SplitKind kind = SplitKind::random_kfold;
  std::size_t k = 5;
  std::uint64_t seed = 0;
  double fraction = 0.0;  // personalization share, 0 when not personalized
  std::vector<Fold> folds;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

/// Seeded shuffle of segments; fold i tests the i-th contiguous chunk.
SplitPlan random_kfold(std::span<const Segment> segments, std::size_t k, std::uint64_t seed);

/// Seeded shuffle of user ids partitioned into k groups; fold i tests all
/// segments of group i and trains on everything else.
SplitPlan leave_users_out(std::span<const Segment> segments, std::size_t k, std::uint64_t seed);

/// Moves the first ceil(fraction * n) problems of every test session into the
/// user's personalization set. `plan` must be leave-users-out.
SplitPlan personalization_split(const SplitPlan& plan, std::span<const Segment> segments,
                                double fraction);

/// Plans serialize with segment ids so they can be re-resolved against the
/// same dataset later.
nlohmann::ordered_json plan_to_json(const SplitPlan& plan, std::span<const Segment> segments);
SplitPlan plan_from_json(const nlohmann::json& j, std::span<const Segment> segments);

}  // namespace atlbp::data
