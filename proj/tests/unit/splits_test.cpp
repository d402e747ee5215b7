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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "atlbp/data/splits.hpp"
#include "test_util.hpp"

namespace atlbp::data {
namespace {

// Users with one or two sessions of varying length; problem indices shuffled
// within each session so "earliest" has to come from problem_index.
std::vector<Segment> corpus(std::uint64_t seed, std::size_t users = 12) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(1, 13);
  std::vector<Segment> out;
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t sessions = 1 + u % 2;
    for (std::size_t s = 0; s < sessions; ++s) {
      std::vector<std::size_t> problems(len(rng));
      std::iota(problems.begin(), problems.end(), 0);
      std::shuffle(problems.begin(), problems.end(), rng);
      for (std::size_t p : problems) {
        Segment seg;
        seg.user_id = "u" + std::to_string(u);
        seg.session_id = "s" + std::to_string(s);
        seg.problem_index = p;
        seg.frames.push_back({numgrad::Vector{0.0}, {}, {}});
        out.push_back(std::move(seg));
      }
    }
  }
  return out;
}

TEST(Splits, RandomKFoldPartitionsWithBalancedShares) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto segs = corpus(seed);
    const std::size_t n = segs.size();
    const SplitPlan plan = random_kfold(segs, 5, seed);
    ASSERT_EQ(plan.folds.size(), 5u);
    std::vector<int> seen(n, 0);
    for (const Fold& f : plan.folds) {
      EXPECT_EQ(f.train.size() + f.test.size(), n);
      EXPECT_LE(std::abs(static_cast<double>(f.test.size()) - 0.2 * static_cast<double>(n)), 1.0);
      std::set<std::size_t> train(f.train.begin(), f.train.end());
      for (std::size_t i : f.test) {
        EXPECT_FALSE(train.contains(i));
        ++seen[i];
      }
    }
    for (int c : seen) EXPECT_EQ(c, 1);
  }
}

TEST(Splits, SameSeedSamePlanDifferentSeedDifferentPlan) {
  const auto segs = corpus(1);
  EXPECT_EQ(random_kfold(segs, 5, 3), random_kfold(segs, 5, 3));
  EXPECT_NE(random_kfold(segs, 5, 3), random_kfold(segs, 5, 4));
  EXPECT_EQ(leave_users_out(segs, 4, 3), leave_users_out(segs, 4, 3));
}

TEST(Splits, LeaveUsersOutHasNoUserOverlap) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto segs = corpus(seed);
    const SplitPlan plan = leave_users_out(segs, 5, seed);
    std::map<std::string, int> test_count;
    for (const Fold& f : plan.folds) {
      std::set<std::string> train_users, test_users;
      for (std::size_t i : f.train) train_users.insert(segs[i].user_id);
      for (std::size_t i : f.test) test_users.insert(segs[i].user_id);
      for (const auto& u : test_users) {
        EXPECT_FALSE(train_users.contains(u));
        ++test_count[u];
      }
      EXPECT_EQ(f.train.size() + f.test.size(), segs.size());
    }
    EXPECT_EQ(test_count.size(), 12u);
    for (const auto& [u, c] : test_count) EXPECT_EQ(c, 1) << u;
  }
}

TEST(Splits, TooFewUsersOrSegmentsIsUsageError) {
  const auto segs = corpus(0, 3);
  EXPECT_ATLBP_ERROR(leave_users_out(segs, 5, 0), ErrorKind::usage);
  EXPECT_ATLBP_ERROR(random_kfold(std::span(segs).subspan(0, 2), 5, 0), ErrorKind::usage);
  EXPECT_ATLBP_ERROR(random_kfold(segs, 1, 0), ErrorKind::usage);
}

TEST(Splits, PersonalizationTakesEarliestCeilFractionPerSession) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto segs = corpus(seed);
    const SplitPlan base = leave_users_out(segs, 4, seed);
    const SplitPlan plan = personalization_split(base, segs, 0.2);
    EXPECT_EQ(plan.kind, SplitKind::personalized);
    for (std::size_t fi = 0; fi < plan.folds.size(); ++fi) {
      const Fold& f = plan.folds[fi];
      EXPECT_EQ(f.train, base.folds[fi].train);
      std::set<std::size_t> test(f.test.begin(), f.test.end());
      std::set<std::size_t> personal;
      for (const auto& [user, idx] : f.personalize) {
        for (std::size_t i : idx) {
          EXPECT_EQ(segs[i].user_id, user);
          personal.insert(i);
        }
      }
      // Disjoint, and together exactly the original held-out users.
      for (std::size_t i : personal) EXPECT_FALSE(test.contains(i));
      EXPECT_EQ(personal.size() + test.size(), base.folds[fi].test.size());

      std::map<std::string, std::vector<std::size_t>> by_session;
      for (std::size_t i : base.folds[fi].test) {
        by_session[segs[i].user_id + "/" + segs[i].session_id].push_back(segs[i].problem_index);
      }
      for (const auto& [key, problems] : by_session) {
        const std::size_t n = problems.size();
        const std::size_t want = (n * 2 + 9) / 10;  // ceil(0.2 n) in integers
        std::size_t got = 0, max_personal = 0, min_test = n;
        for (std::size_t i : base.folds[fi].test) {
          if (segs[i].user_id + "/" + segs[i].session_id != key) continue;
          if (personal.contains(i)) {
            ++got;
            max_personal = std::max(max_personal, segs[i].problem_index);
          } else {
            min_test = std::min(min_test, segs[i].problem_index);
          }
        }
        EXPECT_EQ(got, want) << key;
        if (got > 0 && got < n) {
          EXPECT_LT(max_personal, min_test) << key;
        }
        const bool unevaluated = std::count(f.unevaluated_sessions.begin(),
                                            f.unevaluated_sessions.end(), key) == 1;
        EXPECT_EQ(unevaluated, got == n) << key;
      }
    }
  }
}

TEST(Splits, PersonalizationNeedsLeaveUsersOutAndValidFraction) {
  const auto segs = corpus(2);
  EXPECT_ATLBP_ERROR(personalization_split(random_kfold(segs, 5, 0), segs, 0.2), ErrorKind::usage);
  const SplitPlan luo = leave_users_out(segs, 5, 0);
  EXPECT_ATLBP_ERROR(personalization_split(luo, segs, 0.0), ErrorKind::usage);
  EXPECT_ATLBP_ERROR(personalization_split(luo, segs, 1.0), ErrorKind::usage);
}

TEST(Splits, JsonRoundTripBySegmentId) {
  const auto segs = corpus(5);
  const SplitPlan plan = personalization_split(leave_users_out(segs, 3, 5), segs, 0.25);
  const auto j = nlohmann::json::parse(plan_to_json(plan, segs).dump());
  EXPECT_EQ(plan_from_json(j, segs), plan);

  auto broken = j;
  broken["folds"][0]["test"][0] = "nobody/s0/0";
  EXPECT_ATLBP_ERROR(plan_from_json(broken, segs), ErrorKind::data);
}

}  // namespace
}  // namespace atlbp::data
