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

#include "atlbp/numgrad/tensor.hpp"

#include <cmath>

#include "atlbp/error.hpp"

namespace atlbp::numgrad {

Vector::Vector(std::size_t size, double fill) : values_(size, fill) {}

Vector::Vector(std::initializer_list<double> values) : values_(values) {}

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {}

Vector::Vector(std::span<const double> values)
    : values_(values.begin(), values.end()) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {
  if (rows == 0 || cols == 0) {
    fail(ErrorKind::dimension, "matrix dimensions must be positive, got " +
                                   std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows == 0 || cols == 0) {
    fail(ErrorKind::dimension, "matrix dimensions must be positive, got " +
                                   std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (values_.size() != rows * cols) {
    fail(ErrorKind::dimension, "matrix " + std::to_string(rows) + "x" + std::to_string(cols) +
                                   " given " + std::to_string(values_.size()) + " values");
  }
}

bool all_finite(std::span<const double> values) noexcept {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(std::span<const double> values, std::string_view what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorKind::numeric, std::string(what) + ": non-finite value at index " +
                                   std::to_string(i));
    }
  }
}

void require_size(std::span<const double> values, std::size_t expected, std::string_view what) {
  if (values.size() != expected) {
    fail(ErrorKind::dimension, std::string(what) + " has length " +
                                   std::to_string(values.size()) + ", expected " +
                                   std::to_string(expected));
  }
}

}  // namespace atlbp::numgrad
