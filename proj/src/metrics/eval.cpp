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

#include "atlbp/metrics/eval.hpp"

#include "atlbp/error.hpp"

namespace atlbp::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) fail(ErrorKind::usage, "confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows) {
  ConfusionMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) {
      fail(ErrorKind::usage, "confusion matrix must be square: row " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " entries, expected " +
                                 std::to_string(rows.size()));
    }
    for (std::size_t j = 0; j < rows.size(); ++j) m.counts_[i * m.classes_ + j] = rows[i][j];
  }
  return m;
}

std::uint64_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
  if (truth >= classes_ || predicted >= classes_) fail(ErrorKind::usage, "confusion index out of range");
  return counts_[truth * classes_ + predicted];
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t count) {
  if (truth >= classes_ || predicted >= classes_) {
    fail(ErrorKind::label, "label out of range: truth " + std::to_string(truth) + ", predicted " +
                               std::to_string(predicted) + ", classes " + std::to_string(classes_));
  }
  counts_[truth * classes_ + predicted] += count;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) fail(ErrorKind::usage, "cannot merge confusion matrices of different size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < classes_; ++i) n += counts_[i * classes_ + i];
  return n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t n = 0;
  for (std::size_t j = 0; j < classes_; ++j) n += at(truth, j);
  return n;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t predicted) const {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < classes_; ++i) n += at(i, predicted);
  return n;
}

std::vector<std::vector<std::uint64_t>> ConfusionMatrix::rows() const {
  std::vector<std::vector<std::uint64_t>> out(classes_);
  for (std::size_t i = 0; i < classes_; ++i) {
    out[i].assign(counts_.begin() + static_cast<std::ptrdiff_t>(i * classes_),
                  counts_.begin() + static_cast<std::ptrdiff_t>((i + 1) * classes_));
  }
  return out;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> truths,
                                 std::span<const std::size_t> predictions, std::size_t classes) {
  if (truths.size() != predictions.size()) {
    fail(ErrorKind::usage, "confusion_matrix: " + std::to_string(truths.size()) + " truths vs " +
                               std::to_string(predictions.size()) + " predictions");
  }
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < truths.size(); ++i) m.add(truths[i], predictions[i]);
  return m;
}

FScores mean_f_score(const ConfusionMatrix& confusion, AbsentClassPolicy policy) {
  const std::size_t n = confusion.classes();
  FScores out;
  out.precision.assign(n, 0.0);
  out.recall.assign(n, 0.0);
  out.per_class.assign(n, 0.0);
  out.included.assign(n, false);
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const auto tp = static_cast<double>(confusion.at(c, c));
    const auto predicted = static_cast<double>(confusion.col_sum(c));
    const auto support = static_cast<double>(confusion.row_sum(c));
    const double p = predicted > 0 ? tp / predicted : 0.0;
    const double r = support > 0 ? tp / support : 0.0;
    out.precision[c] = p;
    out.recall[c] = r;
    out.per_class[c] = (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    out.included[c] = policy == AbsentClassPolicy::include || predicted > 0 || support > 0;
    if (out.included[c]) {
      sum += out.per_class[c];
      ++counted;
    }
  }
  out.mean = counted > 0 ? sum / static_cast<double>(counted) : 0.0;
  return out;
}

double accuracy(const ConfusionMatrix& confusion) {
  const std::uint64_t total = confusion.total();
  if (total == 0) fail(ErrorKind::usage, "accuracy of an empty confusion matrix is undefined");
  return static_cast<double>(confusion.trace()) / static_cast<double>(total);
}

Summary summarize(const ConfusionMatrix& confusion, AbsentClassPolicy policy) {
  Summary s;
  s.confusion = confusion;
  s.f = mean_f_score(confusion, policy);
  s.n_samples = confusion.total();
  s.accuracy = s.n_samples > 0 ? accuracy(confusion) : 0.0;
  return s;
}

EvalReport evaluate(std::span<const std::size_t> truths, std::span<const std::size_t> predictions,
                    std::span<const std::string> users, std::size_t classes,
                    AbsentClassPolicy policy) {
  if (!users.empty() && users.size() != truths.size()) {
    fail(ErrorKind::usage, "evaluate: user list length does not match the samples");
  }
  EvalReport report;
  report.overall = summarize(confusion_matrix(truths, predictions, classes), policy);
  std::map<std::string, ConfusionMatrix> by_user;
  for (std::size_t i = 0; i < users.size(); ++i) {
    by_user.try_emplace(users[i], classes).first->second.add(truths[i], predictions[i]);
  }
  for (const auto& [user, m] : by_user) report.per_user.emplace(user, summarize(m, policy));
  return report;
}

nlohmann::ordered_json to_json(const Summary& s, std::span<const std::string_view> class_names) {
  nlohmann::ordered_json j;
  j["confusion_orientation"] = "rows=truth, cols=predicted";
  j["confusion"] = s.confusion.rows();
  nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < s.f.per_class.size(); ++c) {
    nlohmann::ordered_json e;
    e["class"] = c < class_names.size() ? std::string(class_names[c]) : std::to_string(c);
    e["precision"] = s.f.precision[c];
    e["recall"] = s.f.recall[c];
    e["f"] = s.f.per_class[c];
    e["included"] = static_cast<bool>(s.f.included[c]);
    per_class.push_back(std::move(e));
  }
  j["per_class"] = std::move(per_class);
  j["mean_f"] = s.f.mean;
  j["accuracy"] = s.accuracy;
  j["n_samples"] = s.n_samples;
  return j;
}

nlohmann::ordered_json to_json(const EvalReport& report, std::span<const std::string_view> class_names) {
  nlohmann::ordered_json j = to_json(report.overall, class_names);
  nlohmann::ordered_json users = nlohmann::ordered_json::object();
  for (const auto& [user, s] : report.per_user) {
    users[user] = {{"mean_f", s.f.mean}, {"accuracy", s.accuracy}, {"n_samples", s.n_samples}};
  }
  j["per_user"] = std::move(users);
  return j;
}

}  // namespace atlbp::metrics
