// Copyright 2026 The WFA Hedge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Declarative experiments: build a competitor, optionally approximate and
// phi-convert it, play a loss stream and check the regret bounds.

#ifndef WFA_HEDGE_EXPERIMENT_H_
#define WFA_HEDGE_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/approx.h"
#include "wfa_hedge/losses.h"
#include "wfa_hedge/ngram.h"
#include "wfa_hedge/sleeping.h"
#include "wfa_hedge/wfa.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {

struct AutomatonSpec {
  // kshift, weighted_shift, hierarchy, hierarchy_preset or file.
  std::string builder = "kshift";
  int num_experts = 3;
  int k = 1;
  bool at_most = false;
  std::vector<std::vector<double>> matrix;
  std::vector<double> initial;
  std::vector<HierarchyTier> tiers;
  std::string path;
  std::string symbols_path;
};

struct EtaSpec {
  // fixed: sqrt(8 log K / T); renyi: solves eta / sqrt(H_eta) = sqrt(8 / T);
  // value: `value`.
  std::string tuner = "fixed";
  double value = 0.0;
};

struct ApproxSpec {
  // none, ml-ngram, prod-eg, model-select or closed-form.
  std::string kind = "none";
  int order = 1;
  int iterations = 200;
  int64_t budget = 64;
  // closed-form: fixed-share (k-shift builders only) or unigram-renyi.
  std::string form = "fixed-share";
  // prod-eg step schedule: adaptive or fixed.
  std::string schedule = "adaptive";
  double step = 0.1;
};

struct LossSpec {
  // iid_uniform, piecewise_stationary, adversarial_best_path or file.
  std::string generator = "iid_uniform";
  int segment_length = 4;
  double low_mean = 0.1;
  double high_mean = 0.9;
  // adversarial_best_path: symbol names of the target, or empty to draw a
  // random sequence with `shifts` shifts.
  std::vector<std::string> target;
  int shifts = 1;
  std::string path;
};

struct AwakeSpec {
  // none, random or file.
  std::string source = "none";
  double probability = 0.6;
  std::string path;
};

struct ExperimentConfig {
  std::string name = "experiment";
  AutomatonSpec automaton;
  int horizon = 8;
  EtaSpec eta;
  // awm, phi-awm, awake-awm or fixed-share.
  std::string algorithm = "awm";
  ApproxSpec approximation;
  bool phi_convert = false;
  bool phi_shadowing = true;
  LossSpec losses;
  AwakeSpec awake;
  uint64_t seed = 1;
  std::string report_path;
  std::string rounds_csv_path;
  // none or corrupt_bound.
  std::string fault_injection = "none";
};

// Relative paths in the config are resolved against `base_dir`.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json,
                                             const std::string& base_dir = "");
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);
std::string ConfigToJson(const ExperimentConfig& cfg);

absl::StatusOr<Wfa> BuildCompetitor(const AutomatonSpec& spec);

struct Approximation {
  NGramModel model;
  std::string kind;
  // Extra facts for the report, e.g. the model-select probes.
  std::string details_json;
};

// Runs the configured approximation of c_t. Errors for kind "none".
absl::StatusOr<Approximation> BuildApproximation(const ExperimentConfig& cfg,
                                                 const Wfa& c_t);

struct ExperimentInputs {
  LossStream losses;
  // Empty unless the config has an awake source.
  std::vector<AwakeSet> awake;
};

absl::StatusOr<ExperimentInputs> GenerateInputs(const ExperimentConfig& cfg,
                                                const SymbolTable& symbols);

struct BoundVerdict {
  std::string name;
  double lhs;
  double rhs;
  bool pass;
};

struct RegretReport {
  std::string name;
  std::string algorithm;
  int num_experts = 0;
  int horizon = 0;
  double eta = 0.0;
  double log_k = 0.0;
  double algorithm_loss = 0.0;
  double best_loss = 0.0;
  double weighted_regret = 0.0;
  double unweighted_regret = 0.0;
  std::optional<double> divergence;
  int64_t touched_total = 0;
  int64_t touched_max = 0;
  std::vector<BoundVerdict> verdicts;
  std::vector<std::vector<double>> p;
  // Complete report document.
  std::string json;
  // t, p_t, l_t, expected loss and touched edges per round.
  std::string rounds_csv;

  bool AllPass() const;
};

// Full pipeline. Losses and awake sets come from `inputs` when given,
// otherwise from the config generators.
absl::StatusOr<RegretReport> RunExperiment(
    const ExperimentConfig& cfg, const ExperimentInputs* inputs = nullptr);

struct ComparisonRow {
  std::string name;
  std::string algorithm;
  double algorithm_loss;
  double weighted_regret;
  double unweighted_regret;
  int64_t touched_total;
  int64_t touched_max;
  bool pass;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<RegretReport> reports;

  std::string ToJson() const;
  std::string ToCsv() const;
};

// Runs every config on the loss stream (and awake sets) of the first one,
// spreading configs over `threads` workers. Errors if the configs disagree on
// the number of experts or the horizon.
absl::StatusOr<Comparison> Compare(const std::vector<ExperimentConfig>& cfgs,
                                   int threads = 1);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_EXPERIMENT_H_
