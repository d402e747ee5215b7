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
#include <numeric>
#include <random>

#include "atlbp/metrics/eval.hpp"
#include "test_util.hpp"

namespace atlbp::metrics {
namespace {

using Rows = std::vector<std::vector<std::uint64_t>>;

// Counts-based oracle: F_c = 2·tp / (2·tp + fp + fn); classes that never occur
// in truth or prediction are skipped.
double oracle_mean_f(const Rows& m) {
  const std::size_t c = m.size();
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < c; ++k) {
    std::uint64_t tp = m[k][k], fp = 0, fn = 0;
    for (std::size_t j = 0; j < c; ++j) {
      if (j == k) continue;
      fn += m[k][j];
      fp += m[j][k];
    }
    if (tp + fp + fn == 0) continue;
    sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    ++counted;
  }
  return counted ? sum / static_cast<double>(counted) : 0.0;
}

double oracle_accuracy(const Rows& m) {
  std::uint64_t diag = 0, total = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      total += m[i][j];
      if (i == j) diag += m[i][j];
    }
  }
  return static_cast<double>(diag) / static_cast<double>(total);
}

TEST(Metrics, WorkedTwoByTwoExample) {
  const auto cm = ConfusionMatrix::from_rows({{2, 1}, {0, 3}});
  const FScores f = mean_f_score(cm);
  EXPECT_NEAR(f.precision[0], 1.0, 1e-15);
  EXPECT_NEAR(f.recall[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f.per_class[0], 0.8, 1e-15);
  EXPECT_NEAR(f.per_class[1], 6.0 / 7.0, 1e-15);
  EXPECT_NEAR(f.mean, (0.8 + 6.0 / 7.0) / 2.0, 1e-15);
  EXPECT_NEAR(f.mean, 0.8286, 5e-5);
  EXPECT_NEAR(accuracy(cm), 5.0 / 6.0, 1e-15);
}

TEST(Metrics, ConfusionRowsAreTruth) {
  const std::vector<std::size_t> truth{0, 0, 1, 2};
  const std::vector<std::size_t> pred{1, 0, 1, 1};
  const auto cm = confusion_matrix(truth, pred, 3);
  EXPECT_EQ(cm.at(0, 1), 1u);
  EXPECT_EQ(cm.at(2, 1), 1u);
  EXPECT_EQ(cm.at(1, 2), 0u);
  EXPECT_EQ(cm.row_sum(0), 2u);
  EXPECT_EQ(cm.col_sum(1), 3u);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_EQ(cm.trace(), 2u);
}

TEST(Metrics, InputValidation) {
  EXPECT_ATLBP_ERROR(ConfusionMatrix::from_rows({{1, 2}, {3}}), ErrorKind::usage);
  const std::vector<std::size_t> a{0, 1}, b{0};
  EXPECT_ATLBP_ERROR(confusion_matrix(a, b, 2), ErrorKind::usage);
  const std::vector<std::size_t> out_of_range{0, 5};
  EXPECT_ATLBP_ERROR(confusion_matrix(out_of_range, a, 2), ErrorKind::label);
  EXPECT_ATLBP_ERROR(accuracy(ConfusionMatrix(3)), ErrorKind::usage);
}

TEST(Metrics, AbsentClassesAreExcludedByDefault) {
  const auto cm = ConfusionMatrix::from_rows({{2, 0, 0}, {1, 1, 0}, {0, 0, 0}});
  const FScores ex = mean_f_score(cm);
  EXPECT_FALSE(ex.included[2]);
  EXPECT_NEAR(ex.mean, (ex.per_class[0] + ex.per_class[1]) / 2.0, 1e-15);
  const FScores in = mean_f_score(cm, AbsentClassPolicy::include);
  EXPECT_NEAR(in.mean, (in.per_class[0] + in.per_class[1]) / 3.0, 1e-15);
}

TEST(Metrics, PredictedButNeverTrueClassCountsAsZero) {
  const auto cm = ConfusionMatrix::from_rows({{1, 1}, {0, 0}});
  const FScores f = mean_f_score(cm);
  EXPECT_TRUE(f.included[1]);
  EXPECT_EQ(f.per_class[1], 0.0);
  EXPECT_EQ(f.precision[1], 0.0);
  EXPECT_EQ(f.recall[1], 0.0);
}

Rows random_rows(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(2, 9);
  std::uniform_int_distribution<std::uint64_t> count(0, 12);
  std::bernoulli_distribution sparse(0.3);
  const std::size_t c = size(rng);
  Rows m(c, std::vector<std::uint64_t>(c));
  for (auto& row : m) {
    for (auto& v : row) v = sparse(rng) ? 0 : count(rng);
  }
  m[0][0] += 1;  // never empty
  return m;
}

TEST(Metrics, MatchesBruteForceOn200RandomMatrices) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Rows m = random_rows(rng);
    const auto cm = ConfusionMatrix::from_rows(m);
    EXPECT_NEAR(mean_f_score(cm).mean, oracle_mean_f(m), 1e-12) << "trial " << trial;
    EXPECT_NEAR(accuracy(cm), oracle_accuracy(m), 1e-12) << "trial " << trial;
  }
}

TEST(Metrics, InvariantUnderClassRelabeling) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Rows m = random_rows(rng);
    std::vector<std::size_t> perm(m.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Rows p(m.size(), std::vector<std::uint64_t>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) p[perm[i]][perm[j]] = m[i][j];
    }
    const auto a = ConfusionMatrix::from_rows(m), b = ConfusionMatrix::from_rows(p);
    EXPECT_NEAR(mean_f_score(a).mean, mean_f_score(b).mean, 1e-12);
    EXPECT_DOUBLE_EQ(accuracy(a), accuracy(b));
  }
}

TEST(Metrics, EvaluateSplitsByUserAndMergesToOverall) {
  const std::vector<std::size_t> truth{0, 1, 1, 2, 0};
  const std::vector<std::size_t> pred{0, 1, 0, 2, 2};
  const std::vector<std::string> users{"a", "a", "b", "b", "b"};
  const EvalReport r = evaluate(truth, pred, users, 3);
  ASSERT_EQ(r.per_user.size(), 2u);
  EXPECT_EQ(r.per_user.at("a").n_samples, 2u);
  EXPECT_DOUBLE_EQ(r.per_user.at("a").accuracy, 1.0);
  ConfusionMatrix merged(3);
  for (const auto& [u, s] : r.per_user) merged.merge(s.confusion);
  EXPECT_EQ(merged, r.overall.confusion);
  EXPECT_DOUBLE_EQ(r.overall.accuracy, 0.6);
}

TEST(Metrics, ConstantPredictorAccuracyIsClassFrequency) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> label(0, 6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> truth(50 + trial);
    for (auto& t : truth) t = label(rng);
    const std::size_t k = static_cast<std::size_t>(trial) % 7;
    const std::vector<std::size_t> pred(truth.size(), k);
    const double freq = static_cast<double>(std::count(truth.begin(), truth.end(), k)) /
                        static_cast<double>(truth.size());
    EXPECT_DOUBLE_EQ(accuracy(confusion_matrix(truth, pred, 7)), freq);
  }
}

}  // namespace
}  // namespace atlbp::metrics
