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

#include "atlbp/data/outcome.hpp"

namespace atlbp::data {

std::string_view to_string(OutcomeLabel label) noexcept {
  const auto i = static_cast<std::size_t>(label);
  return i < kNumOutcomes ? kOutcomeNames[i] : std::string_view{"?"};
}

std::optional<OutcomeLabel> parse_outcome(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNumOutcomes; ++i) {
    if (kOutcomeNames[i] == name) return static_cast<OutcomeLabel>(i);
  }
  return std::nullopt;
}

std::optional<OutcomeLabel> outcome_from_code(int code) noexcept {
  if (code < 0 || code >= static_cast<int>(kNumOutcomes)) return std::nullopt;
  return static_cast<OutcomeLabel>(code);
}

}  // namespace atlbp::data
