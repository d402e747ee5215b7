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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace atlbp::data {

/// Problem outcome logged by the tutor. Integer codes are stable and are the
/// class indices used by the model and metrics.
enum class OutcomeLabel : int {
  ATT = 0,     // solved after one incorrect attempt, no hints
  GIVEUP = 1,  // tried or asked for a hint, then skipped
  GUESS = 2,   // solved after more than one incorrect attempt, no hints
  NOTR = 3,    // first action too fast to have read the problem
  SHINT = 4,   // solved after seeing one or more hints
  SKIP = 5,    // skipped without a hint or an attempt
  SOF = 6,     // solved on the first attempt without hints
};

inline constexpr std::size_t kNumOutcomes = 7;

inline constexpr std::array<std::string_view, kNumOutcomes> kOutcomeNames = {
    "ATT", "GIVEUP", "GUESS", "NOTR", "SHINT", "SKIP", "SOF"};

std::string_view to_string(OutcomeLabel label) noexcept;
std::optional<OutcomeLabel> parse_outcome(std::string_view name) noexcept;
std::optional<OutcomeLabel> outcome_from_code(int code) noexcept;

constexpr std::size_t class_index(OutcomeLabel label) noexcept {
  return static_cast<std::size_t>(label);
}

}  // namespace atlbp::data
