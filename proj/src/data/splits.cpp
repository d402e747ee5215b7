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

#include "atlbp/data/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "atlbp/error.hpp"

namespace atlbp::data {

namespace {

// Chunk boundaries floor(i*n/k) give sizes that differ by at most one.
std::size_t chunk_begin(std::size_t i, std::size_t n, std::size_t k) { return i * n / k; }

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(items.begin(), items.end(), rng);
}

SplitKind parse_kind(const std::string& name) {
  if (name == "random") return SplitKind::random_kfold;
  if (name == "leave-users-out") return SplitKind::leave_users_out;
  if (name == "leave-users-out-personalized") return SplitKind::personalized;
  fail(ErrorKind::data, "unknown split kind '" + name + "'");
}

}  // namespace

const char* to_string(SplitKind kind) noexcept {
  switch (kind) {
    case SplitKind::random_kfold: return "random";
    case SplitKind::leave_users_out: return "leave-users-out";
    case SplitKind::personalized: return "leave-users-out-personalized";
  }
  return "?";
}

SplitPlan random_kfold(std::span<const Segment> segments, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::usage, "random_kfold: k must be at least 2");
  if (segments.size() < k) {
    fail(ErrorKind::usage, "random_kfold: " + std::to_string(segments.size()) +
                               " segments cannot fill " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  seeded_shuffle(order, seed);

  SplitPlan plan{SplitKind::random_kfold, k, seed, 0.0, {}};
  const std::size_t n = order.size();
  for (std::size_t i = 0; i < k; ++i) {
    Fold fold;
    const std::size_t lo = chunk_begin(i, n, k);
    const std::size_t hi = chunk_begin(i + 1, n, k);
    for (std::size_t j = 0; j < n; ++j) {
      (j >= lo && j < hi ? fold.test : fold.train).push_back(order[j]);
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.test.begin(), fold.test.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

SplitPlan leave_users_out(std::span<const Segment> segments, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail(ErrorKind::usage, "leave_users_out: k must be at least 2");
  std::set<std::string> unique_users;
  for (const Segment& s : segments) unique_users.insert(s.user_id);
  if (unique_users.size() < k) {
    fail(ErrorKind::usage, "leave_users_out: " + std::to_string(unique_users.size()) +
                               " users cannot fill " + std::to_string(k) + " folds");
  }
  std::vector<std::string> users(unique_users.begin(), unique_users.end());
  seeded_shuffle(users, seed);

  std::unordered_map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = chunk_begin(i, users.size(), k); j < chunk_begin(i + 1, users.size(), k); ++j) {
      group_of[users[j]] = i;
    }
  }

  SplitPlan plan{SplitKind::leave_users_out, k, seed, 0.0, std::vector<Fold>(k)};
  for (std::size_t idx = 0; idx < segments.size(); ++idx) {
    const std::size_t g = group_of.at(segments[idx].user_id);
    for (std::size_t i = 0; i < k; ++i) {
      (i == g ? plan.folds[i].test : plan.folds[i].train).push_back(idx);
    }
  }
  return plan;
}

SplitPlan personalization_split(const SplitPlan& plan, std::span<const Segment> segments,
                                double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    fail(ErrorKind::usage, "personalization_split: fraction must lie in (0, 1)");
  }
  if (plan.kind != SplitKind::leave_users_out) {
    fail(ErrorKind::usage, "personalization_split requires a leave-users-out plan");
  }
  SplitPlan out = plan;
  out.kind = SplitKind::personalized;
  out.fraction = fraction;

  for (Fold& fold : out.folds) {
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> sessions;
    for (std::size_t idx : fold.test) {
      if (idx >= segments.size()) fail(ErrorKind::usage, "split plan references a missing segment");
      sessions[{segments[idx].user_id, segments[idx].session_id}].push_back(idx);
    }
    fold.test.clear();
    fold.personalize.clear();
    fold.unevaluated_sessions.clear();
    for (auto& [key, members] : sessions) {
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        return segments[a].problem_index < segments[b].problem_index;
      });
      const auto n_personal = static_cast<std::size_t>(
          std::ceil(fraction * static_cast<double>(members.size()) - 1e-9));
      auto& personal = fold.personalize[key.first];
      personal.insert(personal.end(), members.begin(), members.begin() + n_personal);
      fold.test.insert(fold.test.end(), members.begin() + n_personal, members.end());
      if (n_personal == members.size()) {
        fold.unevaluated_sessions.push_back(key.first + "/" + key.second);
      }
    }
    std::sort(fold.test.begin(), fold.test.end());
  }
  return out;
}

nlohmann::ordered_json plan_to_json(const SplitPlan& plan, std::span<const Segment> segments) {
  auto ids = [&](const std::vector<std::size_t>& indices) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i : indices) arr.push_back(segments[i].id());
    return arr;
  };
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["kind"] = to_string(plan.kind);
  j["k"] = plan.k;
  j["seed"] = plan.seed;
  j["fraction"] = plan.fraction;
  j["folds"] = nlohmann::ordered_json::array();
  for (const Fold& fold : plan.folds) {
    nlohmann::ordered_json f;
    f["train"] = ids(fold.train);
    f["test"] = ids(fold.test);
    nlohmann::ordered_json personal = nlohmann::ordered_json::object();
    for (const auto& [user, indices] : fold.personalize) personal[user] = ids(indices);
    f["personalize"] = std::move(personal);
    f["unevaluated_sessions"] = fold.unevaluated_sessions;
    j["folds"].push_back(std::move(f));
  }
  return j;
}

SplitPlan plan_from_json(const nlohmann::json& j, std::span<const Segment> segments) {
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < segments.size(); ++i) index_of.emplace(segments[i].id(), i);
  auto resolve = [&](const nlohmann::json& arr) {
    std::vector<std::size_t> out;
    for (const auto& id : arr) {
      const auto it = index_of.find(id.get<std::string>());
      if (it == index_of.end()) {
        fail(ErrorKind::data, "split plan references unknown segment " + id.get<std::string>());
      }
      out.push_back(it->second);
    }
    return out;
  };
  SplitPlan plan;
  try {
    plan.kind = parse_kind(j.at("kind").get<std::string>());
    plan.k = j.at("k").get<std::size_t>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.fraction = j.value("fraction", 0.0);
    for (const auto& f : j.at("folds")) {
      Fold fold;
      fold.train = resolve(f.at("train"));
      fold.test = resolve(f.at("test"));
      if (f.contains("personalize")) {
        for (const auto& [user, arr] : f["personalize"].items()) fold.personalize[user] = resolve(arr);
      }
      if (f.contains("unevaluated_sessions")) {
        fold.unevaluated_sessions = f["unevaluated_sessions"].get<std::vector<std::string>>();
      }
      plan.folds.push_back(std::move(fold));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("malformed split plan: ") + e.what());
  }
  return plan;
}

}  // namespace atlbp::data
