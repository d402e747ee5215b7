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

#include "atlbp/numgrad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "atlbp/error.hpp"

namespace atlbp::numgrad {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  // Four independent partial sums let the compiler vectorize the loop while
  // keeping the summation order fixed.
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += pa[i] * pb[i];
    s1 += pa[i + 1] * pb[i + 1];
    s2 += pa[i + 2] * pb[i + 2];
    s3 += pa[i + 3] * pb[i + 3];
  }
  for (; i < n; ++i) s0 += pa[i] * pb[i];
  return (s0 + s1) + (s2 + s3);
}

Vector apply_affine(const Matrix& weight, std::span<const double> bias,
                    std::span<const double> x) {
  if (weight.cols() != x.size()) {
    fail(ErrorKind::dimension, "apply_affine: weight is " + std::to_string(weight.rows()) + "x" +
                                   std::to_string(weight.cols()) + " but x has length " +
                                   std::to_string(x.size()));
  }
  if (!bias.empty() && bias.size() != weight.rows()) {
    fail(ErrorKind::dimension, "apply_affine: weight has " + std::to_string(weight.rows()) +
                                   " rows but bias has length " + std::to_string(bias.size()));
  }
  Vector out(weight.rows());
  for (std::size_t r = 0; r < weight.rows(); ++r) {
    out[r] = dot(weight.row(r), x) + (bias.empty() ? 0.0 : bias[r]);
  }
  return out;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector softmax(std::span<const double> logits) {
  if (logits.empty()) fail(ErrorKind::dimension, "softmax: empty input");
  require_finite(logits, "softmax input");
  const double shift = *std::max_element(logits.begin(), logits.end());
  Vector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - shift);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double cross_entropy(std::span<const double> probabilities, std::size_t label) {
  if (label >= probabilities.size()) {
    fail(ErrorKind::label, "cross_entropy: label " + std::to_string(label) +
                               " out of range for " + std::to_string(probabilities.size()) +
                               " classes");
  }
  return -std::log(std::max(probabilities[label], kProbabilityFloor));
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::dimension, "argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace atlbp::numgrad
