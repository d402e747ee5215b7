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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atlbp/data/dataset.hpp"
#include "atlbp/data/splits.hpp"
#include "atlbp/metrics/eval.hpp"
#include "atlbp/model/checkpoint.hpp"
#include "json.hpp"

namespace atlbp::cli {

struct ProtocolOptions {
  data::SplitKind mode = data::SplitKind::random_kfold;
  std::size_t k = 5;
  double fraction = 0.2;
  double target_fps = 3.0;
  bool mean_pool_baseline = false;
  std::uint64_t seed = 0;
};

/// Builds the split plan the protocol asks for.
data::SplitPlan make_plan(const data::Dataset& dataset, const ProtocolOptions& options);

/// Downsamples every segment to the protocol frame rate (segments already at
/// or below it are kept as they are).
std::vector<data::Segment> prepare_segments(const data::Dataset& dataset, double target_fps);

struct PreparedFold {
  data::Normalizer normalizer;
  std::vector<data::Segment> train;
  std::vector<data::Segment> test;
  std::map<std::string, std::vector<data::Segment>> personalize;
};

/// Fits the normalizer on the fold's training segments and applies it to
/// every role.
PreparedFold prepare_fold(std::span<const data::Segment> segments, const data::Fold& fold);

struct FoldOutcome {
  model::Checkpoint checkpoint;
  std::vector<double> epoch_losses;
  metrics::EvalReport lstm;
  /// Personalized plans only: the unpersonalized model on the same segments.
  std::optional<metrics::EvalReport> base;
  metrics::Summary predominant_label;
  std::optional<metrics::Summary> mean_pool;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::map<std::string, std::size_t> personalized_users;  // user -> fine-tune segments
};

struct CrossvalResult {
  data::SplitPlan plan;
  std::vector<FoldOutcome> folds;
  nlohmann::ordered_json report;
};

/// Trains and evaluates one fold. Pure function of its inputs.
FoldOutcome run_fold(std::span<const data::Segment> segments, const data::Fold& fold,
                     const model::ModelConfig& config, const ProtocolOptions& options);

/// Runs every fold of `plan` (or of a freshly made plan) and assembles the
/// report. Folds run on up to ATLBP_THREADS threads; the result does not
/// depend on the thread count.
CrossvalResult run_crossval(const data::Dataset& dataset, const model::ModelConfig& config,
                            const ProtocolOptions& options,
                            std::optional<data::SplitPlan> plan = std::nullopt);

/// FNV-1a 64-bit as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// Worker count from ATLBP_THREADS, else the hardware concurrency.
std::size_t thread_budget();

}  // namespace atlbp::cli
