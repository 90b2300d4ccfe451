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

#include "wfa_hedge/experiment.h"

#include <algorithm>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"

namespace wfa_hedge {
namespace {

using json = nlohmann::json;

constexpr char kBase[] = R"({
  "name": "base",
  "automaton": {"builder": "kshift", "num_experts": 3, "k": 2},
  "horizon": 8,
  "seed": 3
})";

ExperimentConfig Parse(const std::string& text) {
  auto cfg = ParseConfig(text);
  EXPECT_TRUE(cfg.ok()) << cfg.status();
  return cfg.ok() ? *cfg : ExperimentConfig{};
}

// kBase with `patch` merged in.
std::string Patched(const json& patch) {
  json j = json::parse(kBase);
  j.merge_patch(patch);
  return j.dump();
}

TEST(ParseConfigTest, DefaultsAndEtaForms) {
  const ExperimentConfig cfg = Parse(kBase);
  EXPECT_EQ(cfg.name, "base");
  EXPECT_EQ(cfg.automaton.k, 2);
  EXPECT_EQ(cfg.eta.tuner, "fixed");
  EXPECT_EQ(cfg.algorithm, "awm");
  EXPECT_EQ(cfg.seed, 3u);

  EXPECT_EQ(Parse(Patched({{"eta", 0.25}})).eta.value, 0.25);
  EXPECT_EQ(Parse(Patched({{"eta", 0.25}})).eta.tuner, "value");
  EXPECT_EQ(Parse(Patched({{"eta", "renyi"}})).eta.tuner, "renyi");
  const auto obj =
      Parse(Patched({{"eta", {{"tuner", "value"}, {"value", 2}}}}));
  EXPECT_EQ(obj.eta.value, 2.0);
}

TEST(ParseConfigTest, PhiConvertForms) {
  EXPECT_TRUE(Parse(Patched({{"phi_convert", true}})).phi_convert);
  const auto cfg = Parse(
      Patched({{"phi_convert", {{"enabled", true}, {"shadowing", false}}}}));
  EXPECT_TRUE(cfg.phi_convert);
  EXPECT_FALSE(cfg.phi_shadowing);
}

TEST(ParseConfigTest, RejectsInvalidConfigs) {
  EXPECT_FALSE(ParseConfig("{").ok());
  EXPECT_FALSE(ParseConfig("[]").ok());
  for (const json& patch : std::vector<json>{
           {{"typo", 1}},
           {{"automaton", {{"kk", 1}}}},
           {{"horizon", 0}},
           {{"algorithm", "nope"}},
           {{"eta", "sometimes"}},
           {{"eta", -1.0}},
           {{"fault_injection", "explode"}},
           {{"losses", {{"generator", "file"}, {"path", "/no/such/file"}}}},
           {{"seed", "three"}},
       }) {
    EXPECT_FALSE(ParseConfig(Patched(patch)).ok()) << patch.dump();
  }
}

TEST(ParseConfigTest, EchoParsesBackToItself) {
  const ExperimentConfig cfg = Parse(Patched(
      {{"eta", "renyi"},
       {"approximation", {{"kind", "ml-ngram"}, {"order", 2}}},
       {"losses", {{"generator", "adversarial_best_path"}, {"shifts", 2}}}}));
  const std::string echo = ConfigToJson(cfg);
  EXPECT_EQ(ConfigToJson(Parse(echo)), echo);
}

TEST(BuildCompetitorTest, Builders) {
  AutomatonSpec spec;
  spec.builder = "hierarchy_preset";
  auto h = BuildCompetitor(spec);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->alphabet_size(), 3);
  spec.builder = "weighted_shift";
  spec.matrix = {{0.9, 0.1}, {0.2, 0.8}};
  EXPECT_TRUE(BuildCompetitor(spec).ok());
  spec.builder = "unknown";
  EXPECT_FALSE(BuildCompetitor(spec).ok());
}

TEST(RunExperimentTest, DeterministicReport) {
  const ExperimentConfig cfg = Parse(kBase);
  auto a = RunExperiment(cfg);
  auto b = RunExperiment(cfg);
  ASSERT_TRUE(a.ok() && b.ok()) << a.status();
  EXPECT_EQ(a->json, b->json);
  EXPECT_EQ(a->rounds_csv, b->rounds_csv);
  EXPECT_TRUE(a->AllPass());

  const json r = json::parse(a->json);
  EXPECT_EQ(r["seed"], 3);
  // C(7, 2) shift positions, 3 first experts, 2 choices per shift.
  EXPECT_EQ(r["competitor"]["k"], 21 * 3 * 4);
  EXPECT_NEAR(r["competitor"]["log_k"].get<double>(), a->log_k, 1e-12);
  EXPECT_NEAR(r["eta"]["value"].get<double>(), a->eta, 1e-15);
  ASSERT_EQ(r["verdicts"].size(), 2u);
  EXPECT_EQ(r["verdicts"][0]["name"], "awm_weighted");
  EXPECT_EQ(r["config"]["name"], "base");
  EXPECT_TRUE(r["passed"].get<bool>());
  // Header plus one line per round.
  EXPECT_EQ(std::count(a->rounds_csv.begin(), a->rounds_csv.end(), '\n'), 9);
}

TEST(RunExperimentTest, SeedChangesLosses) {
  ExperimentConfig cfg = Parse(kBase);
  auto a = RunExperiment(cfg);
  cfg.seed = 4;
  auto b = RunExperiment(cfg);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_NE(a->algorithm_loss, b->algorithm_loss);
}

TEST(RunExperimentTest, PhiAndPlainAgree) {
  ExperimentConfig cfg = Parse(kBase);
  auto plain = RunExperiment(cfg);
  cfg.algorithm = "phi-awm";
  auto phi = RunExperiment(cfg);
  ASSERT_TRUE(plain.ok() && phi.ok()) << phi.status();
  EXPECT_NEAR(plain->algorithm_loss, phi->algorithm_loss, 1e-12);
  EXPECT_NEAR(plain->weighted_regret, phi->weighted_regret, 1e-12);
}

TEST(RunExperimentTest, ApproximationAddsDivergence) {
  const auto cfg =
      Parse(Patched({{"approximation", {{"kind", "ml-ngram"}, {"order", 1}}}}));
  auto r = RunExperiment(cfg);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_TRUE(r->divergence.has_value());
  EXPECT_GT(*r->divergence, 0.0);
  ASSERT_EQ(r->verdicts.size(), 1u);
  EXPECT_EQ(r->verdicts[0].name, "approx_weighted");
  EXPECT_TRUE(r->AllPass());
}

TEST(RunExperimentTest, SleepingRunReportsVertexVerdict) {
  const auto cfg = Parse(
      Patched({{"algorithm", "awake-awm"}, {"awake", {{"source", "random"}}}}));
  auto r = RunExperiment(cfg);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->verdicts.size(), 1u);
  EXPECT_EQ(r->verdicts[0].name, "sleeping_vertices");
  EXPECT_TRUE(r->AllPass());
}

TEST(RunExperimentTest, CorruptedBoundFails) {
  auto r =
      RunExperiment(Parse(Patched({{"fault_injection", "corrupt_bound"}})));
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->AllPass());
  EXPECT_FALSE(r->verdicts[0].pass);
  EXPECT_FALSE(json::parse(r->json)["passed"].get<bool>());
}

TEST(RunExperimentTest, ExplicitInputsOverrideGenerators) {
  const ExperimentConfig cfg = Parse(kBase);
  ExperimentInputs inputs;
  inputs.losses.assign(8, std::vector<double>(3, 0.5));
  auto r = RunExperiment(cfg, &inputs);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->algorithm_loss, 4.0, 1e-12);
  inputs.losses.pop_back();
  EXPECT_FALSE(RunExperiment(cfg, &inputs).ok());
}

TEST(RunExperimentTest, EmptyCompetitorIsAnError) {
  // Five shifts need at least six rounds.
  ExperimentConfig cfg = Parse(kBase);
  cfg.automaton.k = 5;
  cfg.horizon = 4;
  EXPECT_FALSE(RunExperiment(cfg).ok());
}

TEST(CompareTest, SharedInputsAndThreadCountIndependence) {
  ExperimentConfig a = Parse(kBase);
  ExperimentConfig b = a;
  b.name = "phi";
  b.algorithm = "phi-awm";
  b.seed = 99;
  auto one = Compare({a, b}, 1);
  auto four = Compare({a, b}, 4);
  ASSERT_TRUE(one.ok() && four.ok()) << one.status();
  EXPECT_EQ(one->ToJson(), four->ToJson());
  EXPECT_EQ(one->ToCsv(), four->ToCsv());
  ASSERT_EQ(one->rows.size(), 2u);
  // b runs on a's losses despite its own seed.
  EXPECT_NEAR(one->rows[0].algorithm_loss, one->rows[1].algorithm_loss, 1e-12);

  ExperimentConfig c = a;
  c.horizon = 9;
  EXPECT_FALSE(Compare({a, c}).ok());
  EXPECT_FALSE(Compare({}).ok());
}

}  // namespace
}  // namespace wfa_hedge
