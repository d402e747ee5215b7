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

// Command-line entry point: generate, describe, split, train, eval,
// personalize and crossval.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "atlbp/cli/pipeline.hpp"
#include "atlbp/cli/run_config.hpp"
#include "atlbp/data/splits.hpp"
#include "atlbp/error.hpp"
#include "atlbp/model/checkpoint.hpp"
#include "atlbp/model/network.hpp"
#include "atlbp/model/trainer.hpp"
#include "atlbp/synth/generator.hpp"

namespace fs = std::filesystem;
using atlbp::ErrorKind;
using atlbp::fail;
using nlohmann::ordered_json;

namespace {

struct Flags {
  std::string config;
  std::string manifest;
  std::string plan;
  std::string checkpoint;
  std::string out;
  std::string mode;
  std::string embedding_mode;
  std::string user;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<double> fraction;
  std::optional<std::size_t> fold;
  std::vector<std::string> overrides;
};

atlbp::cli::RunConfig resolve(const Flags& f) {
  atlbp::cli::RunConfig cfg;
  if (!f.config.empty()) cfg = atlbp::cli::RunConfig::load(f.config);
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorKind::usage, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  auto apply = [&cfg](const char* key, const std::string& value) {
    if (value.empty()) return;
    if (cfg.has(key) && *cfg.get(key) != value) {
      fail(ErrorKind::usage, std::string("--") + key + " " + value + " contradicts config value " + *cfg.get(key));
    }
    cfg.set(key, value);
  };
  apply("manifest", f.manifest);
  apply("plan", f.plan);
  apply("checkpoint", f.checkpoint);
  apply("out", f.out);
  apply("mode", f.mode);
  apply("embedding_mode", f.embedding_mode);
  if (f.seed) apply("seed", std::to_string(*f.seed));
  if (f.k) apply("k", std::to_string(*f.k));
  if (f.fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *f.fraction);
    apply("fraction", buf);
  }
  return cfg;
}

std::string require(const atlbp::cli::RunConfig& cfg, const char* key) {
  const auto v = cfg.get(key);
  if (!v || v->empty()) fail(ErrorKind::usage, std::string("missing --") + key);
  return *v;
}

void write_json(const fs::path& path, const ordered_json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_resolved(const atlbp::cli::RunConfig& cfg, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::data, "cannot write " + path.string());
  out << "# config_hash = " << cfg.hash() << "\n" << cfg.resolved_text() << "# inputs\n"
      << cfg.input_paths_text();
}

fs::path sidecar(const fs::path& out, const char* suffix) {
  return out.parent_path() / (out.filename().string() + suffix);
}

atlbp::data::SplitPlan load_plan(const fs::path& path, const atlbp::data::Dataset& dataset) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot open plan " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::data, path.string() + ": " + e.what());
  }
  return atlbp::data::plan_from_json(j, dataset.segments);
}

const atlbp::data::Fold& pick_fold(const atlbp::data::SplitPlan& plan, const Flags& f) {
  if (!f.fold) fail(ErrorKind::usage, "missing --fold");
  if (*f.fold >= plan.folds.size()) {
    fail(ErrorKind::usage, "--fold " + std::to_string(*f.fold) + " but plan has " +
                               std::to_string(plan.folds.size()) + " folds");
  }
  return plan.folds[*f.fold];
}

int cmd_generate(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  const auto dataset = atlbp::synth::generate(cfg.synthetic_spec());
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  atlbp::data::save_dataset(dataset, out);
  write_resolved(cfg, sidecar(out, ".config.txt"));
  std::cout << atlbp::synth::to_json(atlbp::synth::describe(dataset)).dump(2) << '\n';
  return 0;
}

int cmd_describe(const Flags& f) {
  const auto cfg = resolve(f);
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const ordered_json j = atlbp::synth::to_json(atlbp::synth::describe(dataset));
  if (const auto out = cfg.get("out"); out && !out->empty()) write_json(*out, j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_split(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const auto plan = atlbp::cli::make_plan(dataset, cfg.protocol());
  write_json(out, atlbp::data::plan_to_json(plan, dataset.segments));
  write_resolved(cfg, sidecar(out, ".config.txt"));
  return 0;
}

int cmd_train(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const auto plan = load_plan(require(cfg, "plan"), dataset);
  const auto& fold = pick_fold(plan, f);
  const auto protocol = cfg.protocol();
  const auto model_config = cfg.model_config(dataset.header);
  const auto segments = atlbp::cli::prepare_segments(dataset, protocol.target_fps);
  const auto prepared = atlbp::cli::prepare_fold(segments, fold);
  const auto trained = atlbp::model::train(model_config, prepared.train);

  atlbp::model::save_checkpoint({trained.params, prepared.normalizer, protocol.target_fps}, out);
  ordered_json trace;
  trace["seed"] = model_config.seed;
  trace["config_hash"] = cfg.hash();
  trace["fold"] = *f.fold;
  trace["adam_steps"] = trained.adam_steps;
  trace["epoch_losses"] = trained.epoch_losses;
  write_json(sidecar(out, ".trace.json"), trace);
  write_resolved(cfg, sidecar(out, ".config.txt"));
  return 0;
}

std::vector<atlbp::data::Segment> checkpoint_inputs(const atlbp::model::Checkpoint& cp,
                                                    const atlbp::data::Dataset& dataset,
                                                    const std::vector<std::size_t>& indices) {
  std::vector<atlbp::data::Segment> out;
  for (std::size_t i : indices) {
    atlbp::data::Segment s = dataset.segments.at(i);
    if (cp.target_fps && s.fps > *cp.target_fps) s = atlbp::data::downsample(s, *cp.target_fps);
    if (cp.normalizer) s = cp.normalizer->apply(s);
    out.push_back(std::move(s));
  }
  return out;
}

int cmd_eval(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const auto plan = load_plan(require(cfg, "plan"), dataset);
  const auto& fold = pick_fold(plan, f);
  const auto cp = atlbp::model::load_checkpoint(require(cfg, "checkpoint"));
  const auto test = checkpoint_inputs(cp, dataset, fold.test);

  std::vector<std::size_t> truths, predictions;
  std::vector<std::string> users;
  for (const auto& s : test) {
    truths.push_back(atlbp::data::class_index(s.label));
    predictions.push_back(atlbp::model::predict(cp.params, s).label);
    users.push_back(s.user_id);
  }
  const auto report = atlbp::metrics::evaluate(truths, predictions, users, cp.params.config().num_classes);
  ordered_json j;
  j["seed"] = cp.params.config().seed;
  j["config_hash"] = cfg.hash();
  j["checkpoint"] = require(cfg, "checkpoint");
  j["plan"] = require(cfg, "plan");
  j["fold"] = *f.fold;
  j["report"] = atlbp::metrics::to_json(report, atlbp::data::kOutcomeNames);
  write_json(out, j);
  write_resolved(cfg, sidecar(out, ".config.txt"));
  std::cout << "mean_f " << report.overall.f.mean << " accuracy " << report.overall.accuracy << '\n';
  return 0;
}

int cmd_personalize(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  if (f.user.empty()) fail(ErrorKind::usage, "missing --user");
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const auto plan = load_plan(require(cfg, "plan"), dataset);
  const auto& fold = pick_fold(plan, f);
  const auto it = fold.personalize.find(f.user);
  if (it == fold.personalize.end()) {
    fail(ErrorKind::usage, "user " + f.user + " has no personalization set in this fold");
  }
  const auto cp = atlbp::model::load_checkpoint(require(cfg, "checkpoint"));
  const auto personal = checkpoint_inputs(cp, dataset, it->second);
  const auto result = atlbp::model::personalize(cp.params, personal);
  if (result.status == atlbp::model::PersonalizeStatus::empty_set) {
    std::cerr << "warning: empty personalization set for user " << f.user << ", base model copied\n";
  }
  atlbp::model::save_checkpoint({result.params, cp.normalizer, cp.target_fps}, out);
  ordered_json trace;
  trace["user"] = f.user;
  trace["segments"] = personal.size();
  trace["epoch_losses"] = result.epoch_losses;
  trace["config_hash"] = cfg.hash();
  write_json(sidecar(out, ".trace.json"), trace);
  write_resolved(cfg, sidecar(out, ".config.txt"));
  return 0;
}

int cmd_crossval(const Flags& f) {
  const auto cfg = resolve(f);
  const fs::path out = require(cfg, "out");
  const auto dataset = atlbp::data::load_dataset(require(cfg, "manifest"));
  const auto protocol = cfg.protocol();
  const auto model_config = cfg.model_config(dataset.header);
  std::optional<atlbp::data::SplitPlan> plan;
  if (const auto p = cfg.get("plan"); p && !p->empty()) plan = load_plan(*p, dataset);

  const auto result = atlbp::cli::run_crossval(dataset, model_config, protocol, plan);
  fs::create_directories(out);
  write_json(out / "plan.json", atlbp::data::plan_to_json(result.plan, dataset.segments));
  for (std::size_t i = 0; i < result.folds.size(); ++i) {
    atlbp::model::save_checkpoint(result.folds[i].checkpoint, out / ("fold_" + std::to_string(i) + ".ckpt.json"));
  }
  ordered_json report;
  for (const auto& [key, value] : result.report.items()) {
    report[key] = value;
    if (key == "seed") report["config_hash"] = cfg.hash();
  }
  report["plan_file"] = "plan.json";
  write_json(out / "report.json", report);
  write_resolved(cfg, out / "config.txt");

  const auto& agg = result.report["aggregate"]["lstm"];
  std::cout << "mean_f (mean of folds) " << agg["mean_of_folds"]["mean_f"].get<double>()
            << ", accuracy " << agg["mean_of_folds"]["accuracy"].get<double>() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavior prediction from fused facial feature sequences"};
  app.require_subcommand(1);
  Flags flags;

  auto common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Flat key = value config file");
    sub->add_option("--manifest", flags.manifest, "Dataset (JSON Lines, optionally .gz)");
    sub->add_option("--plan", flags.plan, "Split plan JSON");
    sub->add_option("--checkpoint", flags.checkpoint, "Model checkpoint JSON");
    sub->add_option("--out", flags.out, "Output file or directory");
    sub->add_option("--seed", flags.seed, "Seed for generation, splits and training");
    sub->add_option("--mode", flags.mode, "random | leave-users-out | leave-users-out-personalized");
    sub->add_option("--k", flags.k, "Number of folds");
    sub->add_option("--fraction", flags.fraction, "Personalization share of each session");
    sub->add_option("--embedding-mode", flags.embedding_mode, "none | affect | identity | both");
    sub->add_option("--fold", flags.fold, "Fold index within the plan");
    sub->add_option("--user", flags.user, "User id for personalize");
    sub->add_option("--set", flags.overrides, "Override a config key (key=value)");
  };

  std::map<std::string, int (*)(const Flags&)> commands = {
      {"generate", cmd_generate}, {"describe", cmd_describe}, {"split", cmd_split},
      {"train", cmd_train},       {"eval", cmd_eval},         {"personalize", cmd_personalize},
      {"crossval", cmd_crossval},
  };
  const std::map<std::string, std::string> help = {
      {"generate", "Write a synthetic dataset"},
      {"describe", "Summarize a dataset"},
      {"split", "Write a split plan"},
      {"train", "Train one fold and write a checkpoint"},
      {"eval", "Evaluate a checkpoint on one fold"},
      {"personalize", "Fine-tune a checkpoint on one user's early problems"},
      {"crossval", "Run a full protocol and write an aggregated report"},
  };
  for (const auto& [name, fn] : commands) common(app.add_subcommand(name, help.at(name)));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) return fn(flags);
    }
  } catch (const atlbp::Error& e) {
    std::cerr << "atlbp: " << atlbp::to_string(e.kind()) << ": " << e.what() << '\n';
    return atlbp::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "atlbp: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
