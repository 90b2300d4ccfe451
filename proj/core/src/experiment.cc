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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"
#include "wfa_hedge/awm.h"
#include "wfa_hedge/logging.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/regret.h"
#include "wfa_hedge/wfa_io.h"

namespace wfa_hedge {
namespace {

using Json = nlohmann::ordered_json;

constexpr uint64_t kAwakeSeedSalt = 0x9e3779b97f4a7c15ULL;

absl::Status WithContext(const absl::Status& st, const std::string& where) {
  if (st.ok()) return st;
  return absl::Status(st.code(), absl::StrCat(where, ": ", st.message()));
}

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

// Reads the keys of `obj` into the setters in `fields`; unknown keys are an
// error so that typos do not silently fall back to defaults.
template <typename Fields>
absl::Status ReadObject(const nlohmann::json& obj, const std::string& where,
                        const Fields& fields) {
  if (!obj.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, " must be an object"));
  }
  for (const auto& [key, value] : obj.items()) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", where));
    }
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad value for '", key, "' in ", where, ": ", e.what()));
    }
  }
  return absl::OkStatus();
}

template <typename T>
std::function<void(const nlohmann::json&)> Into(T* out) {
  return [out](const nlohmann::json& v) { v.get_to(*out); };
}

using FieldMap =
    std::map<std::string, std::function<void(const nlohmann::json&)>>;

absl::Status ParseAutomaton(const nlohmann::json& j, AutomatonSpec* spec,
                            const std::string& base_dir) {
  nlohmann::json tiers;
  FieldMap fields = {
      {"builder", Into(&spec->builder)},
      {"num_experts", Into(&spec->num_experts)},
      {"k", Into(&spec->k)},
      {"at_most", Into(&spec->at_most)},
      {"matrix", Into(&spec->matrix)},
      {"initial", Into(&spec->initial)},
      {"tiers", [&tiers](const nlohmann::json& v) { tiers = v; }},
      {"path", Into(&spec->path)},
      {"symbols", Into(&spec->symbols_path)},
  };
  if (auto st = ReadObject(j, "automaton", fields); !st.ok()) return st;
  if (!tiers.is_null()) {
    if (!tiers.is_array()) {
      return absl::InvalidArgumentError("automaton.tiers must be an array");
    }
    for (const auto& t : tiers) {
      HierarchyTier tier;
      FieldMap tf = {{"experts", Into(&tier.experts)},
                     {"budget", Into(&tier.budget)}};
      if (auto st = ReadObject(t, "automaton.tiers[]", tf); !st.ok()) return st;
      spec->tiers.push_back(std::move(tier));
    }
  }
  spec->path = Resolve(spec->path, base_dir);
  spec->symbols_path = Resolve(spec->symbols_path, base_dir);
  return absl::OkStatus();
}

Json AutomatonToJson(const AutomatonSpec& a) {
  Json j;
  j["builder"] = a.builder;
  if (a.builder == "file") {
    j["path"] = a.path;
    j["symbols"] = a.symbols_path;
    return j;
  }
  j["num_experts"] = a.num_experts;
  if (a.builder == "kshift") {
    j["k"] = a.k;
    j["at_most"] = a.at_most;
  } else if (a.builder == "weighted_shift") {
    j["matrix"] = a.matrix;
    j["initial"] = a.initial;
  } else if (a.builder == "hierarchy") {
    Json tiers = Json::array();
    for (const HierarchyTier& t : a.tiers) {
      tiers.push_back(Json{{"experts", t.experts}, {"budget", t.budget}});
    }
    j["tiers"] = tiers;
  }
  return j;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON has no infinity; unbounded values are written as strings.
Json Number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::string LabelsToString(const SymbolTable& symbols,
                           const std::vector<Label>& x) {
  std::vector<std::string> parts;
  for (Label a : x) parts.push_back(symbols.Name(a));
  return absl::StrJoin(parts, " ");
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view json,
                                             const std::string& base_dir) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError("config is not JSON");
  ExperimentConfig cfg;
  nlohmann::json automaton, eta, approx, phi, losses, awake, output;
  FieldMap fields = {
      {"name", Into(&cfg.name)},
      {"automaton", [&](const nlohmann::json& v) { automaton = v; }},
      {"horizon", Into(&cfg.horizon)},
      {"eta", [&](const nlohmann::json& v) { eta = v; }},
      {"algorithm", Into(&cfg.algorithm)},
      {"approximation", [&](const nlohmann::json& v) { approx = v; }},
      {"phi_convert", [&](const nlohmann::json& v) { phi = v; }},
      {"losses", [&](const nlohmann::json& v) { losses = v; }},
      {"awake", [&](const nlohmann::json& v) { awake = v; }},
      {"seed", Into(&cfg.seed)},
      {"output", [&](const nlohmann::json& v) { output = v; }},
      {"fault_injection", Into(&cfg.fault_injection)},
  };
  if (auto st = ReadObject(j, "config", fields); !st.ok()) return st;
  if (!automaton.is_null()) {
    if (auto st = ParseAutomaton(automaton, &cfg.automaton, base_dir);
        !st.ok()) {
      return st;
    }
  }
  if (eta.is_number()) {
    cfg.eta.tuner = "value";
    cfg.eta.value = eta.get<double>();
  } else if (eta.is_string()) {
    cfg.eta.tuner = eta.get<std::string>();
  } else if (!eta.is_null()) {
    FieldMap f = {{"tuner", Into(&cfg.eta.tuner)},
                  {"value", Into(&cfg.eta.value)}};
    if (auto st = ReadObject(eta, "eta", f); !st.ok()) return st;
  }
  if (!approx.is_null()) {
    ApproxSpec& a = cfg.approximation;
    FieldMap f = {{"kind", Into(&a.kind)},
                  {"order", Into(&a.order)},
                  {"iterations", Into(&a.iterations)},
                  {"budget", Into(&a.budget)},
                  {"form", Into(&a.form)},
                  {"schedule", Into(&a.schedule)},
                  {"step", Into(&a.step)}};
    if (auto st = ReadObject(approx, "approximation", f); !st.ok()) return st;
  }
  if (phi.is_boolean()) {
    cfg.phi_convert = phi.get<bool>();
  } else if (!phi.is_null()) {
    FieldMap f = {{"enabled", Into(&cfg.phi_convert)},
                  {"shadowing", Into(&cfg.phi_shadowing)}};
    if (auto st = ReadObject(phi, "phi_convert", f); !st.ok()) return st;
  }
  if (!losses.is_null()) {
    LossSpec& l = cfg.losses;
    FieldMap f = {{"generator", Into(&l.generator)},
                  {"segment_length", Into(&l.segment_length)},
                  {"low_mean", Into(&l.low_mean)},
                  {"high_mean", Into(&l.high_mean)},
                  {"target", Into(&l.target)},
                  {"shifts", Into(&l.shifts)},
                  {"path", Into(&l.path)}};
    if (auto st = ReadObject(losses, "losses", f); !st.ok()) return st;
    l.path = Resolve(l.path, base_dir);
  }
  if (!awake.is_null()) {
    FieldMap f = {{"source", Into(&cfg.awake.source)},
                  {"probability", Into(&cfg.awake.probability)},
                  {"path", Into(&cfg.awake.path)}};
    if (auto st = ReadObject(awake, "awake", f); !st.ok()) return st;
    cfg.awake.path = Resolve(cfg.awake.path, base_dir);
  }
  if (!output.is_null()) {
    FieldMap f = {{"report", Into(&cfg.report_path)},
                  {"rounds_csv", Into(&cfg.rounds_csv_path)}};
    if (auto st = ReadObject(output, "output", f); !st.ok()) return st;
    cfg.report_path = Resolve(cfg.report_path, base_dir);
    cfg.rounds_csv_path = Resolve(cfg.rounds_csv_path, base_dir);
  }
  if (cfg.horizon < 1)
    return absl::InvalidArgumentError("horizon must be >= 1");
  static const std::set<std::string> kAlgorithms = {"awm", "phi-awm",
                                                    "awake-awm", "fixed-share"};
  if (!kAlgorithms.count(cfg.algorithm)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown algorithm '", cfg.algorithm, "'"));
  }
  static const std::set<std::string> kTuners = {"fixed", "renyi", "value"};
  if (!kTuners.count(cfg.eta.tuner)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown eta tuner '", cfg.eta.tuner, "'"));
  }
  if (cfg.eta.tuner == "value" && !(cfg.eta.value > 0.0)) {
    return absl::InvalidArgumentError("eta value must be positive");
  }
  static const std::set<std::string> kFaults = {"none", "corrupt_bound"};
  if (!kFaults.count(cfg.fault_injection)) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown fault injection '", cfg.fault_injection, "'"));
  }
  for (const std::string* p :
       {&cfg.automaton.path, &cfg.losses.path, &cfg.awake.path}) {
    if (!p->empty() && !std::filesystem::exists(*p)) {
      return absl::NotFoundError(
          absl::StrCat("referenced file ", *p, " does not exist"));
    }
  }
  return cfg;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg =
      ParseConfig(ss.str(), std::filesystem::path(path).parent_path().string());
  if (!cfg.ok()) return WithContext(cfg.status(), path);
  return cfg;
}

std::string ConfigToJson(const ExperimentConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["automaton"] = AutomatonToJson(cfg.automaton);
  j["horizon"] = cfg.horizon;
  j["eta"] = Json{{"tuner", cfg.eta.tuner}, {"value", cfg.eta.value}};
  j["algorithm"] = cfg.algorithm;
  const ApproxSpec& a = cfg.approximation;
  j["approximation"] = Json{
      {"kind", a.kind},     {"order", a.order}, {"iterations", a.iterations},
      {"budget", a.budget}, {"form", a.form},   {"schedule", a.schedule},
      {"step", a.step}};
  j["phi_convert"] =
      Json{{"enabled", cfg.phi_convert}, {"shadowing", cfg.phi_shadowing}};
  const LossSpec& l = cfg.losses;
  j["losses"] = Json{{"generator", l.generator},
                     {"segment_length", l.segment_length},
                     {"low_mean", l.low_mean},
                     {"high_mean", l.high_mean},
                     {"target", l.target},
                     {"shifts", l.shifts},
                     {"path", l.path}};
  j["awake"] = Json{{"source", cfg.awake.source},
                    {"probability", cfg.awake.probability},
                    {"path", cfg.awake.path}};
  j["seed"] = cfg.seed;
  j["fault_injection"] = cfg.fault_injection;
  return j.dump(2);
}

absl::StatusOr<Wfa> BuildCompetitor(const AutomatonSpec& spec) {
  absl::StatusOr<Wfa> c;
  if (spec.builder == "kshift") {
    c = BuildKShift(spec.num_experts, spec.k, KShiftOptions{spec.at_most});
  } else if (spec.builder == "weighted_shift") {
    c = BuildWeightedShift(spec.matrix, spec.initial);
  } else if (spec.builder == "hierarchy") {
    c = BuildHierarchy(spec.num_experts, spec.tiers);
  } else if (spec.builder == "hierarchy_preset") {
    c = BuildHierarchyPreset();
  } else if (spec.builder == "file") {
    c = ReadFiles(spec.path, spec.symbols_path);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown builder '", spec.builder, "'"));
  }
  if (!c.ok()) return WithContext(c.status(), "automaton");
  if (c->HasPhi()) {
    auto p = PhiWfa::Create(*std::move(c));
    if (!p.ok()) return WithContext(p.status(), "automaton");
    return PhiExpand(*p);
  }
  return c;
}

absl::StatusOr<Approximation> BuildApproximation(const ExperimentConfig& cfg,
                                                 const Wfa& c_t) {
  const ApproxSpec& spec = cfg.approximation;
  ProdEgOptions options;
  if (spec.schedule == "fixed") {
    options.schedule = ProdEgOptions::Schedule::kFixed;
    options.eta = spec.step;
  } else if (spec.schedule != "adaptive") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown Prod-EG schedule '", spec.schedule, "'"));
  }
  Json details;
  absl::StatusOr<NGramModel> model;
  if (spec.kind == "ml-ngram") {
    auto r = MlNGram(c_t, spec.order);
    if (!r.ok()) return WithContext(r.status(), "ml-ngram");
    details["enumerated"] = r->enumerated;
    details["zero_count_contexts"] = r->zero_count_contexts.size();
    model = std::move(r->model);
  } else if (spec.kind == "prod-eg") {
    auto r = ProdEg(c_t, spec.order, spec.iterations, options);
    if (!r.ok()) return WithContext(r.status(), "prod-eg");
    details["objective"] = Number(r->objective);
    details["max_partial"] = r->max_sup_norm;
    model = std::move(r->model);
  } else if (spec.kind == "model-select") {
    auto r = ModelSelect(c_t, spec.iterations, spec.budget, options);
    if (!r.ok()) return WithContext(r.status(), "model-select");
    details["order"] = r->order;
    details["max_order"] = r->max_order;
    details["objective"] = Number(r->objective);
    details["gap_bound"] = r->gap_bound;
    details["budget_exhausted"] = r->budget_exhausted;
    Json probes = Json::array();
    for (const ModelSelectProbe& p : r->probes) {
      probes.push_back(Json{{"order", p.order},
                            {"iterations", p.iterations},
                            {"objective", Number(p.objective)},
                            {"gap_bound", p.gap_bound},
                            {"feasible", p.feasible}});
    }
    details["probes"] = probes;
    model = std::move(r->model);
  } else if (spec.kind == "closed-form") {
    if (spec.form == "fixed-share") {
      if (cfg.automaton.builder != "kshift" || cfg.automaton.at_most) {
        return absl::InvalidArgumentError(
            "fixed-share closed form needs the exact k-shift builder");
      }
      model = MlBigramKShiftClosedForm(cfg.automaton.num_experts,
                                       cfg.automaton.k, cfg.horizon);
    } else if (spec.form == "unigram-renyi") {
      model = UnigramRenyiClosedForm(c_t);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown closed form '", spec.form, "'"));
    }
    if (!model.ok()) return WithContext(model.status(), "closed-form");
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown approximation '", spec.kind, "'"));
  }
  return Approximation{*std::move(model), spec.kind,
                       details.is_null() ? "{}" : details.dump()};
}

absl::StatusOr<ExperimentInputs> GenerateInputs(const ExperimentConfig& cfg,
                                                const SymbolTable& symbols) {
  const int n = symbols.size();
  const int t = cfg.horizon;
  const LossSpec& spec = cfg.losses;
  Rng rng(cfg.seed);
  ExperimentInputs out;
  absl::StatusOr<LossStream> losses;
  if (spec.generator == "iid_uniform") {
    losses = GenIidUniform(n, t, rng);
  } else if (spec.generator == "piecewise_stationary") {
    losses = GenPiecewiseStationary(n, t, spec.segment_length, spec.low_mean,
                                    spec.high_mean, rng);
  } else if (spec.generator == "adversarial_best_path") {
    std::vector<Label> target;
    if (spec.target.empty()) {
      auto x = RandomKShiftSequence(n, spec.shifts, t, rng);
      if (!x.ok()) return WithContext(x.status(), "losses");
      target = *std::move(x);
    } else {
      for (const std::string& name : spec.target) {
        auto id = symbols.Find(name);
        if (!id.has_value()) {
          return absl::InvalidArgumentError(
              absl::StrCat("losses: unknown target symbol '", name, "'"));
        }
        target.push_back(*id);
      }
      if (static_cast<int>(target.size()) != t) {
        return absl::InvalidArgumentError(
            "losses: target length differs from the horizon");
      }
    }
    losses = GenAdversarialBestPath(n, target, rng);
  } else if (spec.generator == "file") {
    std::ifstream in(spec.path);
    if (!in)
      return absl::NotFoundError(absl::StrCat("cannot open ", spec.path));
    losses = ReadLossCsv(in);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown loss generator '", spec.generator, "'"));
  }
  if (!losses.ok()) return WithContext(losses.status(), "losses");
  if (auto st = ValidateLosses(*losses, n, t); !st.ok()) {
    return WithContext(st, "losses");
  }
  out.losses = *std::move(losses);

  if (cfg.awake.source == "random") {
    Rng awake_rng(cfg.seed ^ kAwakeSeedSalt);
    out.awake = GenRandomAwakeSets(n, t, cfg.awake.probability, awake_rng);
  } else if (cfg.awake.source == "file") {
    std::ifstream in(cfg.awake.path);
    if (!in) {
      return absl::NotFoundError(absl::StrCat("cannot open ", cfg.awake.path));
    }
    auto awake = ReadAwakeCsv(in, symbols);
    if (!awake.ok()) return WithContext(awake.status(), "awake");
    if (static_cast<int>(awake->size()) != t) {
      return absl::InvalidArgumentError(
          "awake: row count differs from horizon");
    }
    out.awake = *std::move(awake);
  } else if (cfg.awake.source != "none") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown awake source '", cfg.awake.source, "'"));
  }
  return out;
}

bool RegretReport::AllPass() const {
  for (const BoundVerdict& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

absl::StatusOr<RegretReport> RunExperiment(const ExperimentConfig& cfg,
                                           const ExperimentInputs* inputs) {
  const std::string where = absl::StrCat("experiment '", cfg.name, "'");
  auto fail = [&where](const absl::Status& st) {
    return WithContext(st, where);
  };
  const int horizon = cfg.horizon;

  auto c = BuildCompetitor(cfg.automaton);
  if (!c.ok()) return fail(c.status());
  const SymbolTable& symbols = c->symbols();
  const int n = symbols.size();
  auto s_t = BuildLengthAutomaton(n, horizon);
  if (!s_t.ok()) return fail(s_t.status());
  auto c_t = Intersect(*c, *s_t);
  if (!c_t.ok()) return fail(c_t.status());
  auto log_k = LogCountAcceptingPaths(*c_t);
  if (!log_k.ok()) return fail(log_k.status());
  if (*log_k == kLogZero) {
    return fail(absl::FailedPreconditionError(
        absl::StrCat("no competitor sequence of length ", horizon)));
  }

  ExperimentInputs generated;
  if (inputs == nullptr) {
    auto g = GenerateInputs(cfg, symbols);
    if (!g.ok()) return fail(g.status());
    generated = *std::move(g);
    inputs = &generated;
  }
  if (auto st = ValidateLosses(inputs->losses, n, horizon); !st.ok()) {
    return fail(st);
  }
  const bool sleeping = cfg.algorithm == "awake-awm";
  if (sleeping && static_cast<int>(inputs->awake.size()) != horizon) {
    return fail(
        absl::InvalidArgumentError("awake-awm needs one awake set per round"));
  }

  // Automaton actually played.
  ApproxSpec approx_spec = cfg.approximation;
  if (cfg.algorithm == "fixed-share" && approx_spec.kind == "none") {
    approx_spec.kind = "closed-form";
    approx_spec.form = "fixed-share";
  }
  Wfa played = *c;
  std::optional<Approximation> approx;
  std::optional<DivergenceValue> divergence;
  if (approx_spec.kind != "none") {
    ExperimentConfig acfg = cfg;
    acfg.approximation = approx_spec;
    auto a = BuildApproximation(acfg, *c_t);
    if (!a.ok()) return fail(a.status());
    approx = *std::move(a);
    played = NGramToWfa(approx->model);
    auto d = RenyiDivergenceInf(*c_t, approx->model);
    if (!d.ok()) return fail(d.status());
    divergence = *std::move(d);
  }
  auto played_t = Intersect(played, *s_t);
  if (!played_t.ok()) return fail(played_t.status());
  auto played_log_k = LogCountAcceptingPaths(*played_t);
  if (!played_log_k.ok()) return fail(played_log_k.status());

  double eta = cfg.eta.value;
  if (cfg.eta.tuner == "fixed") {
    eta = TuneEtaFixed(horizon, *played_log_k);
  } else if (cfg.eta.tuner == "renyi") {
    auto e = TuneEtaRenyi(*played_t, horizon);
    if (!e.ok()) return fail(e.status());
    eta = *e;
  }
  LogInfo(absl::StrCat(where, ": eta = ", eta, ", log K = ", *log_k));

  const bool use_phi = cfg.phi_convert || cfg.algorithm == "phi-awm";
  std::optional<PhiWfa> converted;
  if (use_phi) {
    PhiConvertOptions opts;
    opts.shadowing = cfg.phi_shadowing;
    auto pc = PhiConvert(played, opts);
    if (!pc.ok()) return fail(pc.status());
    converted = *std::move(pc);
  }
  // Sleeping runs drive the engine through AwakeAwm; `state` is only read.
  std::optional<AwakeAwm> awake_awm;
  std::optional<AwmState> plain_state;
  if (sleeping) {
    auto a = converted.has_value()
                 ? AwakeAwm::InitPhi(*converted, horizon, eta)
                 : AwakeAwm::FromProduct(*played_t, horizon, eta);
    if (!a.ok()) return fail(a.status());
    awake_awm = *std::move(a);
  } else {
    auto s = converted.has_value()
                 ? AwmState::InitPhi(*converted, horizon, eta)
                 : AwmState::FromProduct(*played_t, horizon, eta);
    if (!s.ok()) return fail(s.status());
    plain_state = *std::move(s);
  }
  const AwmState& engine = sleeping ? awake_awm->state() : *plain_state;

  RegretReport report;
  report.name = cfg.name;
  report.algorithm = cfg.algorithm;
  report.num_experts = n;
  report.horizon = horizon;
  report.eta = eta;
  report.log_k = *log_k;

  History history;
  SleepingHistory sleeping_history;
  std::vector<int64_t> touched;
  touched.push_back(engine.total_touched());
  std::ostringstream csv;
  csv << "t";
  for (const std::string& s : symbols.names()) csv << ",p_" << s;
  for (const std::string& s : symbols.names()) csv << ",l_" << s;
  csv << ",expected_loss,touched\n";
  for (int t = 0; t < horizon; ++t) {
    std::vector<double> loss = inputs->losses[t];
    std::vector<double> p;
    if (sleeping) {
      const AwakeSet& awake = inputs->awake[t];
      // Asleep experts incur no loss.
      for (int a = 0; a < n; ++a) {
        if (!awake[a]) loss[a] = 0.0;
      }
      auto pa = awake_awm->Distribution(awake);
      if (!pa.ok()) {
        return fail(absl::FailedPreconditionError(
            absl::StrCat("round ", t + 1, ": no accepting path is awake")));
      }
      p = *pa;
      auto st = awake_awm->Step(awake, loss);
      if (!st.ok()) return fail(st.status());
      if (t + 1 < horizon) touched.push_back(engine.last_touched());
      sleeping_history.p.push_back(p);
      sleeping_history.losses.push_back(loss);
      sleeping_history.awake.push_back(awake);
    } else {
      p = plain_state->distribution();
      auto st = plain_state->Step(loss);
      if (!st.ok()) return fail(st.status());
      if (t + 1 < horizon) touched.push_back(engine.last_touched());
    }
    history.p.push_back(p);
    history.losses.push_back(loss);
    double expected = 0.0;
    for (int a = 0; a < n; ++a) expected += p[a] * loss[a];
    csv << t + 1;
    for (double v : p) csv << ',' << FormatDouble(v);
    for (double v : loss) csv << ',' << FormatDouble(v);
    csv << ',' << FormatDouble(expected) << ',' << touched[t] << '\n';
  }
  report.rounds_csv = csv.str();
  report.p = history.p;
  report.algorithm_loss = history.AlgorithmLoss();
  for (int64_t v : touched) {
    report.touched_total += v;
    report.touched_max = std::max(report.touched_max, v);
  }

  Json j;
  j["name"] = cfg.name;
  j["config"] = Json::parse(ConfigToJson(cfg));
  j["seed"] = cfg.seed;
  j["algorithm"] = cfg.algorithm;
  j["num_experts"] = n;
  j["horizon"] = horizon;
  Json comp;
  comp["states"] = c_t->NumStates();
  comp["arcs"] = c_t->NumArcs();
  comp["log_k"] = *log_k;
  auto k_exact = CountAcceptingPaths(*c_t);
  if (k_exact.ok()) comp["k"] = *k_exact;
  j["competitor"] = comp;
  Json run;
  run["states"] = played_t->NumStates();
  run["arcs"] = played_t->NumArcs();
  run["log_k"] = *played_log_k;
  run["phi"] = use_phi;
  if (use_phi) run["phi_arcs"] = converted->wfa().NumArcs();
  run["engine_states"] = engine.NumStates();
  run["engine_arcs"] = engine.NumArcs();
  run["max_phi_chain"] = engine.max_phi_chain();
  j["played_automaton"] = run;
  j["eta"] = Json{{"tuner", cfg.eta.tuner}, {"value", eta}};
  if (approx.has_value()) {
    Json ap;
    ap["kind"] = approx->kind;
    ap["order"] = approx->model.order();
    ap["divergence_inf"] = Number(divergence->value);
    ap["witness"] = LabelsToString(symbols, divergence->witness);
    auto kl = KlDivergence(*c_t, approx->model);
    if (kl.ok()) ap["kl"] = Number(*kl);
    ap["details"] = Json::parse(approx->details_json);
    ap["model"] = Json::parse(NGramToJson(approx->model));
    j["approximation"] = ap;
    report.divergence = divergence->value;
  }
  j["algorithm_loss"] = report.algorithm_loss;

  if (sleeping) {
    auto u = ComparatorMixture::BestSinglePath(sleeping_history, *c_t);
    if (!u.ok()) return fail(u.status());
    auto sr = SleepingRegret(sleeping_history, *c_t, *u, eta);
    if (!sr.ok()) return fail(sr.status());
    auto excess = MaxVertexExcess(sleeping_history, *c_t, eta);
    if (!excess.ok()) return fail(excess.status());
    report.weighted_regret = sr->value;
    report.unweighted_regret = sr->value;
    report.best_loss = 0.0;
    const auto& best = u->entries().front().first;
    for (int t = 0; t < horizon; ++t) {
      report.best_loss += sleeping_history.losses[t][best[t]];
    }
    j["sleeping"] =
        Json{{"best_path", LabelsToString(symbols, best)},
             {"regret", sr->value},
             {"bound", sr->bound},
             {"max_vertex_excess", excess->value},
             {"worst_vertex", LabelsToString(symbols, excess->path)}};
    const double log_k_eta = *log_k / eta;
    report.verdicts.push_back({"sleeping_vertices", excess->value + log_k_eta,
                               log_k_eta, excess->value <= 0.0});
  } else {
    auto w = WeightedRegret(history, *c_t);
    if (!w.ok()) return fail(w.status());
    auto u = UnweightedRegret(history, *c_t);
    if (!u.ok()) return fail(u.status());
    report.weighted_regret = w->value;
    report.unweighted_regret = u->value;
    report.best_loss = u->best_loss;
    j["best_sequence"] = LabelsToString(symbols, u->best);
    j["best_loss"] = u->best_loss;
    j["regret"] = Json{{"weighted", w->value}, {"unweighted", u->value}};
    if (!approx.has_value()) {
      auto b = ComputeAwmBounds(*c_t, horizon, eta);
      if (!b.ok()) return fail(b.status());
      j["bounds"] = Json{{"weighted", b->weighted},
                         {"unweighted", b->unweighted},
                         {"log_sum_pow", b->log_sum_pow}};
      report.verdicts.push_back(
          {"awm_weighted", w->value, b->weighted, w->value <= b->weighted});
      report.verdicts.push_back({"awm_unweighted", u->value, b->unweighted,
                                 u->value <= b->unweighted});
    } else {
      auto lsp = LogSumPow(*played_t, eta);
      if (!lsp.ok()) return fail(lsp.status());
      const double base = eta * horizon / 8.0;
      const double loose = base + *log_k / eta + divergence->value;
      const double tight = base + *log_k + *lsp / eta + divergence->value;
      j["bounds"] = Json{{"weighted", Number(loose)},
                         {"weighted_renyi", Number(tight)},
                         {"log_sum_pow", *lsp}};
      report.verdicts.push_back(
          {"approx_weighted", w->value, loose, w->value <= loose});
    }
  }

  if (cfg.fault_injection == "corrupt_bound" && !report.verdicts.empty()) {
    BoundVerdict& v = report.verdicts.front();
    v.rhs = v.lhs - 1.0;
    v.pass = false;
  }
  Json verdicts = Json::array();
  for (const BoundVerdict& v : report.verdicts) {
    verdicts.push_back(Json{{"name", v.name},
                            {"lhs", Number(v.lhs)},
                            {"rhs", Number(v.rhs)},
                            {"pass", v.pass}});
  }
  j["verdicts"] = verdicts;
  j["touched"] = Json{{"total", report.touched_total},
                      {"max_per_round", report.touched_max},
                      {"per_round", touched}};
  j["passed"] = report.AllPass();
  report.json = j.dump(2);
  return report;
}

std::string Comparison::ToJson() const {
  Json rows_json = Json::array();
  for (const ComparisonRow& r : rows) {
    rows_json.push_back(Json{{"name", r.name},
                             {"algorithm", r.algorithm},
                             {"algorithm_loss", r.algorithm_loss},
                             {"weighted_regret", r.weighted_regret},
                             {"unweighted_regret", r.unweighted_regret},
                             {"touched_total", r.touched_total},
                             {"touched_max", r.touched_max},
                             {"pass", r.pass}});
  }
  Json j;
  j["rows"] = rows_json;
  return j.dump(2);
}

std::string Comparison::ToCsv() const {
  std::ostringstream out;
  out << "name,algorithm,algorithm_loss,weighted_regret,unweighted_regret,"
         "touched_total,touched_max,pass\n";
  for (const ComparisonRow& r : rows) {
    out << r.name << ',' << r.algorithm << ',' << FormatDouble(r.algorithm_loss)
        << ',' << FormatDouble(r.weighted_regret) << ','
        << FormatDouble(r.unweighted_regret) << ',' << r.touched_total << ','
        << r.touched_max << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

absl::StatusOr<Comparison> Compare(const std::vector<ExperimentConfig>& cfgs,
                                   int threads) {
  if (cfgs.empty()) return absl::InvalidArgumentError("nothing to compare");
  std::vector<SymbolTable> tables;
  for (const ExperimentConfig& cfg : cfgs) {
    auto c = BuildCompetitor(cfg.automaton);
    if (!c.ok()) return WithContext(c.status(), cfg.name);
    if (c->alphabet_size() != tables.emplace_back(c->symbols()).size() ||
        c->alphabet_size() != (tables.front().size()) ||
        cfg.horizon != cfgs.front().horizon) {
      return absl::InvalidArgumentError(
          absl::StrCat("config '", cfg.name,
                       "' has a different number of experts or "
                       "horizon than '",
                       cfgs.front().name, "'"));
    }
  }
  auto inputs = GenerateInputs(cfgs.front(), tables.front());
  if (!inputs.ok()) return inputs.status();

  std::vector<absl::StatusOr<RegretReport>> results(
      cfgs.size(), absl::UnknownError("not run"));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < cfgs.size(); i = next++) {
      results[i] = RunExperiment(cfgs[i], &*inputs);
    }
  };
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(cfgs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  Comparison out;
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    out.rows.push_back({r->name, r->algorithm, r->algorithm_loss,
                        r->weighted_regret, r->unweighted_regret,
                        r->touched_total, r->touched_max, r->AllPass()});
    out.reports.push_back(*std::move(r));
  }
  return out;
}

}  // namespace wfa_hedge
