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

#include "json.hpp"

namespace atlbp::metrics {

/// Square count matrix; rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  /// Throws a usage error unless `rows` is square.
  static ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const;
  void add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);
  void merge(const ConfusionMatrix& other);

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t col_sum(std::size_t predicted) const;

  std::vector<std::vector<std::uint64_t>> rows() const;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truths,
                                 std::span<const std::size_t> predictions, std::size_t classes);

/// Whether classes with no truth and no prediction enter the macro average.
enum class AbsentClassPolicy { exclude, include };

struct FScores {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> per_class;
  std::vector<bool> included;  // class counted in the mean
  double mean = 0.0;
};

/// Per-class F1 with zero-denominator terms set to 0, then the macro mean.
FScores mean_f_score(const ConfusionMatrix& confusion,
                     AbsentClassPolicy policy = AbsentClassPolicy::exclude);

/// trace / total; usage error on an empty matrix.
double accuracy(const ConfusionMatrix& confusion);

struct Summary {
  ConfusionMatrix confusion{1};
  FScores f;
  double accuracy = 0.0;
  std::uint64_t n_samples = 0;
};

Summary summarize(const ConfusionMatrix& confusion,
                  AbsentClassPolicy policy = AbsentClassPolicy::exclude);

struct EvalReport {
  Summary overall;
  std::map<std::string, Summary> per_user;
};

/// `users[i]` owns sample i. `users` may be empty to skip the breakdown.
EvalReport evaluate(std::span<const std::size_t> truths, std::span<const std::size_t> predictions,
                    std::span<const std::string> users, std::size_t classes,
                    AbsentClassPolicy policy = AbsentClassPolicy::exclude);

nlohmann::ordered_json to_json(const Summary& summary, std::span<const std::string_view> class_names);
nlohmann::ordered_json to_json(const EvalReport& report, std::span<const std::string_view> class_names);

}  // namespace atlbp::metrics
