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

#include "atlbp/cli/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "atlbp/data/preprocess.hpp"
#include "atlbp/error.hpp"
#include "atlbp/metrics/baselines.hpp"
#include "atlbp/model/network.hpp"
#include "atlbp/model/trainer.hpp"

namespace atlbp::cli {

namespace {

using nlohmann::ordered_json;

std::vector<std::size_t> labels_of(std::span<const data::Segment> segments) {
  std::vector<std::size_t> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(data::class_index(s.label));
  return out;
}

std::vector<std::string> users_of(std::span<const data::Segment> segments) {
  std::vector<std::string> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.user_id);
  return out;
}

ordered_json mean_of_folds(const std::vector<const metrics::Summary*>& summaries) {
  double f = 0.0;
  double acc = 0.0;
  std::size_t n = 0;
  for (const metrics::Summary* s : summaries) {
    if (s->n_samples == 0) continue;
    f += s->f.mean;
    acc += s->accuracy;
    ++n;
  }
  ordered_json j;
  j["mean_f"] = n > 0 ? f / static_cast<double>(n) : 0.0;
  j["accuracy"] = n > 0 ? acc / static_cast<double>(n) : 0.0;
  j["folds_counted"] = n;
  return j;
}

ordered_json aggregate(const std::vector<const metrics::Summary*>& summaries, std::size_t classes) {
  metrics::ConfusionMatrix pooled(classes);
  for (const metrics::Summary* s : summaries) pooled.merge(s->confusion);
  ordered_json j;
  j["mean_of_folds"] = mean_of_folds(summaries);
  j["pooled"] = metrics::to_json(metrics::summarize(pooled), data::kOutcomeNames);
  return j;
}

}  // namespace

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t thread_budget() {
  if (const char* env = std::getenv("ATLBP_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

data::SplitPlan make_plan(const data::Dataset& dataset, const ProtocolOptions& options) {
  switch (options.mode) {
    case data::SplitKind::random_kfold:
      return data::random_kfold(dataset.segments, options.k, options.seed);
    case data::SplitKind::leave_users_out:
      return data::leave_users_out(dataset.segments, options.k, options.seed);
    case data::SplitKind::personalized:
      return data::personalization_split(data::leave_users_out(dataset.segments, options.k, options.seed),
                                         dataset.segments, options.fraction);
  }
  fail(ErrorKind::usage, "unknown split mode");
}

std::vector<data::Segment> prepare_segments(const data::Dataset& dataset, double target_fps) {
  std::vector<data::Segment> out;
  out.reserve(dataset.segments.size());
  for (const data::Segment& s : dataset.segments) {
    out.push_back(s.fps > target_fps ? data::downsample(s, target_fps) : s);
  }
  return out;
}

PreparedFold prepare_fold(std::span<const data::Segment> segments, const data::Fold& fold) {
  auto gather = [&](const std::vector<std::size_t>& indices) {
    std::vector<data::Segment> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) {
      if (i >= segments.size()) fail(ErrorKind::usage, "split plan references a missing segment");
      out.push_back(segments[i]);
    }
    return out;
  };
  PreparedFold prepared;
  std::vector<data::Segment> raw_train = gather(fold.train);
  prepared.normalizer = data::fit_normalizer(raw_train);
  for (const auto& s : raw_train) prepared.train.push_back(prepared.normalizer.apply(s));
  for (const auto& s : gather(fold.test)) prepared.test.push_back(prepared.normalizer.apply(s));
  for (const auto& [user, indices] : fold.personalize) {
    auto& dst = prepared.personalize[user];
    for (const auto& s : gather(indices)) dst.push_back(prepared.normalizer.apply(s));
  }
  return prepared;
}

FoldOutcome run_fold(std::span<const data::Segment> segments, const data::Fold& fold,
                     const model::ModelConfig& config, const ProtocolOptions& options) {
  PreparedFold prepared = prepare_fold(segments, fold);
  FoldOutcome outcome{model::Checkpoint{model::ModelParams::zeros(config), prepared.normalizer,
                                        options.target_fps},
                      {}, {}, std::nullopt, {}, std::nullopt, prepared.train.size(),
                      prepared.test.size(), {}};

  model::TrainResult trained = model::train(config, prepared.train);
  outcome.epoch_losses = trained.epoch_losses;
  outcome.checkpoint.params = trained.params;

  const std::vector<std::size_t> truths = labels_of(prepared.test);
  const std::vector<std::string> users = users_of(prepared.test);
  const std::size_t classes = config.num_classes;

  std::vector<std::size_t> base_predictions;
  base_predictions.reserve(prepared.test.size());
  for (const auto& s : prepared.test) base_predictions.push_back(model::predict(trained.params, s).label);

  if (options.mode == data::SplitKind::personalized) {
    std::map<std::string, model::ModelParams> tuned;
    for (const auto& [user, personal] : prepared.personalize) {
      outcome.personalized_users[user] = personal.size();
      tuned.emplace(user, model::personalize(trained.params, personal).params);
    }
    std::vector<std::size_t> predictions;
    predictions.reserve(prepared.test.size());
    for (const auto& s : prepared.test) {
      const auto it = tuned.find(s.user_id);
      const model::ModelParams& p = it != tuned.end() ? it->second : trained.params;
      predictions.push_back(model::predict(p, s).label);
    }
    outcome.lstm = metrics::evaluate(truths, predictions, users, classes);
    outcome.base = metrics::evaluate(truths, base_predictions, users, classes);
  } else {
    outcome.lstm = metrics::evaluate(truths, base_predictions, users, classes);
  }

  const auto baseline = metrics::PredominantLabelBaseline::fit(labels_of(prepared.train));
  const std::vector<std::size_t> constant(truths.size(), baseline.predict());
  outcome.predominant_label = metrics::summarize(metrics::confusion_matrix(truths, constant, classes));

  if (options.mean_pool_baseline) {
    const auto pooled = metrics::MeanPoolClassifier::train(config, prepared.train);
    std::vector<std::size_t> predictions;
    for (const auto& s : prepared.test) predictions.push_back(pooled.predict(s));
    outcome.mean_pool = metrics::summarize(metrics::confusion_matrix(truths, predictions, classes));
  }
  return outcome;
}

CrossvalResult run_crossval(const data::Dataset& dataset, const model::ModelConfig& config,
                            const ProtocolOptions& options, std::optional<data::SplitPlan> plan) {
  config.validate();
  CrossvalResult result;
  result.plan = plan ? std::move(*plan) : make_plan(dataset, options);
  if (result.plan.kind != options.mode) {
    fail(ErrorKind::usage, std::string("split plan kind '") + data::to_string(result.plan.kind) +
                               "' contradicts mode '" + data::to_string(options.mode) + "'");
  }
  const std::vector<data::Segment> segments = prepare_segments(dataset, options.target_fps);

  const std::size_t n_folds = result.plan.folds.size();
  std::vector<std::optional<FoldOutcome>> outcomes(n_folds);
  std::vector<std::exception_ptr> errors(n_folds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_folds; i = next++) {
      try {
        outcomes[i] = run_fold(segments, result.plan.folds[i], config, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(thread_budget(), n_folds);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < n_folds; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    result.folds.push_back(std::move(*outcomes[i]));
  }

  const ordered_json plan_json = data::plan_to_json(result.plan, dataset.segments);
  ordered_json protocol;
  protocol["mode"] = data::to_string(options.mode);
  protocol["k"] = options.k;
  protocol["fraction"] = options.mode == data::SplitKind::personalized ? options.fraction : 0.0;
  protocol["target_fps"] = options.target_fps;
  protocol["mean_pool_baseline"] = options.mean_pool_baseline;
  protocol["seed"] = options.seed;
  const ordered_json model_json = model::config_to_json(config);

  ordered_json& r = result.report;
  r["format_version"] = 1;
  r["mode"] = data::to_string(options.mode);
  r["seed"] = options.seed;
  r["settings_hash"] = fnv1a_hex(model_json.dump() + protocol.dump());
  r["plan_hash"] = fnv1a_hex(plan_json.dump());
  r["protocol"] = protocol;
  r["model_config"] = model_json;

  std::vector<const metrics::Summary*> lstm, base, predominant, mean_pool;
  ordered_json folds = ordered_json::array();
  for (std::size_t i = 0; i < n_folds; ++i) {
    const FoldOutcome& f = result.folds[i];
    ordered_json fj;
    fj["fold"] = i;
    fj["train_size"] = f.train_size;
    fj["test_size"] = f.test_size;
    fj["train_share"] = static_cast<double>(result.plan.folds[i].train.size()) /
                        static_cast<double>(dataset.segments.size());
    if (options.mode == data::SplitKind::personalized) {
      fj["personalized_users"] = f.personalized_users;
      fj["unevaluated_sessions"] = result.plan.folds[i].unevaluated_sessions;
    }
    fj["epoch_losses"] = f.epoch_losses;
    fj["lstm"] = metrics::to_json(f.lstm, data::kOutcomeNames);
    lstm.push_back(&f.lstm.overall);
    if (f.base) {
      fj["unpersonalized"] = metrics::to_json(f.base->overall, data::kOutcomeNames);
      base.push_back(&f.base->overall);
    }
    fj["predominant_label"] = metrics::to_json(f.predominant_label, data::kOutcomeNames);
    predominant.push_back(&f.predominant_label);
    if (f.mean_pool) {
      fj["mean_pool"] = metrics::to_json(*f.mean_pool, data::kOutcomeNames);
      mean_pool.push_back(&*f.mean_pool);
    }
    folds.push_back(std::move(fj));
  }
  r["folds"] = std::move(folds);

  ordered_json agg;
  agg["lstm"] = aggregate(lstm, config.num_classes);
  if (!base.empty()) agg["unpersonalized"] = aggregate(base, config.num_classes);
  agg["predominant_label"] = aggregate(predominant, config.num_classes);
  if (!mean_pool.empty()) agg["mean_pool"] = aggregate(mean_pool, config.num_classes);
  r["aggregate"] = std::move(agg);
  return result;
}

}  // namespace atlbp::cli
