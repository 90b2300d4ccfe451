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

// Command-line driver. Exit codes: 0 success, 1 error, 2 a bound verdict
// failed.
//
//   wfa_hedge run --config configs/kshift_awm.json --seed 7 --out report.json
//   wfa_hedge compare --config a.json --config b.json --format csv

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "wfa_hedge/approx.h"
#include "wfa_hedge/experiment.h"
#include "wfa_hedge/logging.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/wfa_io.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBoundFailure = 2;

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> horizon;
  std::string out;
  std::string format = "json";
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* flags, bool need_config) {
  auto* opt = cmd->add_option("--config", flags->config, "Experiment config");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags->seed, "Override the config seed");
  cmd->add_option("--horizon", flags->horizon, "Override the horizon T");
  cmd->add_option("--out", flags->out, "Output path (default stdout)");
  cmd->add_option("--format", flags->format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

int Fail(const absl::Status& status) {
  std::fprintf(stderr, "error: %s\n", status.ToString().c_str());
  return kExitError;
}

absl::Status WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    std::cout.flush();
    return absl::OkStatus();
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("write failed: ", path));
}

absl::StatusOr<ExperimentConfig> Load(const std::string& path,
                                      const CommonFlags& flags) {
  auto cfg = LoadConfig(path);
  if (!cfg.ok()) return cfg.status();
  if (flags.seed.has_value()) cfg->seed = *flags.seed;
  if (flags.horizon.has_value()) {
    if (*flags.horizon < 1) {
      return absl::InvalidArgumentError("horizon must be >= 1");
    }
    cfg->horizon = *flags.horizon;
  }
  return cfg;
}

absl::StatusOr<Wfa> CompetitorProduct(const ExperimentConfig& cfg) {
  auto c = BuildCompetitor(cfg.automaton);
  if (!c.ok()) return c.status();
  auto s_t = BuildLengthAutomaton(c->alphabet_size(), cfg.horizon);
  if (!s_t.ok()) return s_t.status();
  return Intersect(*c, *s_t);
}

Json Summary(const Wfa& a) {
  int phi = 0;
  for (StateId s = 0; s < a.NumStates(); ++s) {
    for (const Arc& arc : a.Arcs(s)) phi += arc.label == kPhiLabel;
  }
  return Json{
      {"states", a.NumStates()}, {"arcs", a.NumArcs()}, {"phi_arcs", phi}};
}

// Writes the automaton to `path` (and `path`.syms) or, without a path, embeds
// its text form in `summary`.
absl::Status EmitAutomaton(const Wfa& a, const std::string& path,
                           Json* summary) {
  if (path.empty()) {
    (*summary)["symbols"] = a.symbols().names();
    (*summary)["text"] = ToText(a);
    return absl::OkStatus();
  }
  (*summary)["path"] = path;
  return WriteFiles(a, path, path + ".syms");
}

int RunBuild(const CommonFlags& flags, bool product) {
  auto cfg = Load(flags.config, flags);
  if (!cfg.ok()) return Fail(cfg.status());
  auto a = product ? CompetitorProduct(*cfg) : BuildCompetitor(cfg->automaton);
  if (!a.ok()) return Fail(a.status());
  Json j = Summary(*a);
  if (product) {
    auto log_k = LogCountAcceptingPaths(*a);
    if (!log_k.ok()) return Fail(log_k.status());
    j["horizon"] = cfg->horizon;
    j["log_k"] = *log_k;
  }
  if (auto st = EmitAutomaton(*a, flags.out, &j); !st.ok()) return Fail(st);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int RunApproximate(const CommonFlags& flags) {
  auto cfg = Load(flags.config, flags);
  if (!cfg.ok()) return Fail(cfg.status());
  if (cfg->approximation.kind == "none") {
    return Fail(absl::InvalidArgumentError(
        "config has no approximation; set approximation.kind"));
  }
  auto c_t = CompetitorProduct(*cfg);
  if (!c_t.ok()) return Fail(c_t.status());
  auto approx = BuildApproximation(*cfg, *c_t);
  if (!approx.ok()) return Fail(approx.status());
  const NGramModel& m = approx->model;
  std::string text;
  if (flags.format == "csv") {
    std::ostringstream out;
    out << "context,symbol,weight\n";
    char buf[32];
    for (int ctx = 0; ctx < m.num_contexts(); ++ctx) {
      for (Label a = 0; a < m.num_symbols(); ++a) {
        std::snprintf(buf, sizeof(buf), "%.17g", m.Weight(ctx, a));
        out << m.ContextName(ctx) << ',' << m.symbols().Name(a) << ',' << buf
            << '\n';
      }
    }
    text = out.str();
  } else {
    Json j;
    j["kind"] = approx->kind;
    j["order"] = m.order();
    j["details"] = Json::parse(approx->details_json);
    j["model"] = Json::parse(NGramToJson(m));
    text = j.dump(2);
  }
  if (auto st = WriteOutput(flags.out, text); !st.ok()) return Fail(st);
  return kExitOk;
}

int RunPhiConvert(const CommonFlags& flags, bool no_shadowing) {
  auto cfg = Load(flags.config, flags);
  if (!cfg.ok()) return Fail(cfg.status());
  auto c = BuildCompetitor(cfg->automaton);
  if (!c.ok()) return Fail(c.status());
  Wfa source = *std::move(c);
  if (cfg->approximation.kind != "none") {
    auto c_t = CompetitorProduct(*cfg);
    if (!c_t.ok()) return Fail(c_t.status());
    auto approx = BuildApproximation(*cfg, *c_t);
    if (!approx.ok()) return Fail(approx.status());
    source = NGramToWfa(approx->model);
  }
  PhiConvertOptions options;
  options.shadowing = cfg->phi_shadowing && !no_shadowing;
  std::vector<PhiConvertStep> steps;
  auto p = PhiConvert(source, options, &steps);
  if (!p.ok()) return Fail(p.status());
  Json j;
  j["before"] = Summary(source);
  j["after"] = Summary(p->wfa());
  j["max_phi_chain"] = p->max_phi_chain();
  Json steps_json = Json::array();
  for (const PhiConvertStep& s : steps) {
    steps_json.push_back(Json{{"target", s.target},
                              {"new_state", s.new_state},
                              {"shared", s.num_shared},
                              {"parents", s.num_parents},
                              {"arc_delta", s.arc_delta}});
  }
  j["steps"] = steps_json;
  if (auto st = EmitAutomaton(p->wfa(), flags.out, &j); !st.ok()) {
    return Fail(st);
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int RunRun(const CommonFlags& flags, const std::string& fault) {
  auto cfg = Load(flags.config, flags);
  if (!cfg.ok()) return Fail(cfg.status());
  if (!fault.empty()) cfg->fault_injection = fault;
  auto report = RunExperiment(*cfg);
  if (!report.ok()) return Fail(report.status());
  if (!cfg->report_path.empty()) {
    if (auto st = WriteOutput(cfg->report_path, report->json); !st.ok()) {
      return Fail(st);
    }
  }
  if (!cfg->rounds_csv_path.empty()) {
    if (auto st = WriteOutput(cfg->rounds_csv_path, report->rounds_csv);
        !st.ok()) {
      return Fail(st);
    }
  }
  const std::string& text =
      flags.format == "csv" ? report->rounds_csv : report->json;
  if (auto st = WriteOutput(flags.out, text); !st.ok()) return Fail(st);
  for (const BoundVerdict& v : report->verdicts) {
    if (!v.pass) {
      std::fprintf(stderr, "bound violated: %s (%.17g > %.17g)\n",
                   v.name.c_str(), v.lhs, v.rhs);
    }
  }
  return report->AllPass() ? kExitOk : kExitBoundFailure;
}

int RunCompare(const CommonFlags& flags, const std::vector<std::string>& paths,
               int threads) {
  std::vector<ExperimentConfig> cfgs;
  for (const std::string& path : paths) {
    auto cfg = Load(path, flags);
    if (!cfg.ok()) return Fail(cfg.status());
    cfgs.push_back(*std::move(cfg));
  }
  auto table = Compare(cfgs, threads);
  if (!table.ok()) return Fail(table.status());
  const std::string text =
      flags.format == "csv" ? table->ToCsv() : table->ToJson();
  if (auto st = WriteOutput(flags.out, text); !st.ok()) return Fail(st);
  for (const ComparisonRow& row : table->rows) {
    if (!row.pass) return kExitBoundFailure;
  }
  return kExitOk;
}

int RunDivergence(const CommonFlags& flags) {
  auto cfg = Load(flags.config, flags);
  if (!cfg.ok()) return Fail(cfg.status());
  if (cfg->approximation.kind == "none") {
    return Fail(absl::InvalidArgumentError(
        "config has no approximation; set approximation.kind"));
  }
  auto c_t = CompetitorProduct(*cfg);
  if (!c_t.ok()) return Fail(c_t.status());
  auto approx = BuildApproximation(*cfg, *c_t);
  if (!approx.ok()) return Fail(approx.status());
  auto d = RenyiDivergenceInf(*c_t, approx->model);
  if (!d.ok()) return Fail(d.status());
  auto kl = KlDivergence(*c_t, approx->model);
  if (!kl.ok()) return Fail(kl.status());
  std::string witness;
  for (Label a : d->witness) {
    if (!witness.empty()) witness += ' ';
    witness += c_t->symbols().Name(a);
  }
  std::string text;
  if (flags.format == "csv") {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", d->value, *kl);
    text = absl::StrCat("divergence_inf,kl,witness\n", buf, ",", witness, "\n");
  } else {
    Json j;
    j["kind"] = approx->kind;
    j["order"] = approx->model.order();
    j["horizon"] = cfg->horizon;
    j["divergence_inf"] = d->value;
    j["kl"] = *kl;
    j["witness"] = witness;
    text = j.dump(2);
  }
  if (auto st = WriteOutput(flags.out, text); !st.ok()) return Fail(st);
  return kExitOk;
}

}  // namespace
}  // namespace wfa_hedge

int main(int argc, char** argv) {
  using namespace wfa_hedge;  // NOLINT
  InitLogging();
  CLI::App app{"Online learning with automaton-defined expert sequences"};
  app.require_subcommand(1);

  CommonFlags build_flags;
  bool build_product = false;
  auto* build = app.add_subcommand("build", "Build the competitor automaton");
  AddCommonFlags(build, &build_flags, true);
  build->add_flag("--product", build_product,
                  "Intersect with the length-T automaton first");

  CommonFlags approx_flags;
  auto* approximate =
      app.add_subcommand("approximate", "Fit the configured n-gram model");
  AddCommonFlags(approximate, &approx_flags, true);

  CommonFlags phi_flags;
  bool no_shadowing = false;
  auto* phi = app.add_subcommand(
      "phi-convert", "Replace shared transitions with failure transitions");
  AddCommonFlags(phi, &phi_flags, true);
  phi->add_flag("--no-shadowing", no_shadowing,
                "Only share arcs with identical destinations");

  CommonFlags run_flags;
  std::string fault;
  auto* run =
      app.add_subcommand("run", "Play the loss stream and check bounds");
  AddCommonFlags(run, &run_flags, true);
  run->add_option("--fault", fault, "Fault injection for CI checks")
      ->check(CLI::IsMember({"none", "corrupt_bound"}));

  CommonFlags compare_flags;
  std::vector<std::string> compare_configs;
  int threads = 1;
  auto* compare =
      app.add_subcommand("compare", "Run several configs on one loss stream");
  AddCommonFlags(compare, &compare_flags, false);
  compare->remove_option(compare->get_option("--config"));
  compare->add_option("--config", compare_configs, "Experiment configs")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--threads", threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  CommonFlags div_flags;
  auto* divergence = app.add_subcommand(
      "divergence", "Divergences between C_T and its approximation");
  AddCommonFlags(divergence, &div_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  if (build->parsed()) return RunBuild(build_flags, build_product);
  if (approximate->parsed()) return RunApproximate(approx_flags);
  if (phi->parsed()) return RunPhiConvert(phi_flags, no_shadowing);
  if (run->parsed()) return RunRun(run_flags, fault);
  if (compare->parsed()) {
    return RunCompare(compare_flags, compare_configs, threads);
  }
  if (divergence->parsed()) return RunDivergence(div_flags);
  return 1;
}
