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

// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "testing/brute_force.h"
#include "testing/phi_paths.h"
#include "wfa_hedge/approx.h"
#include "wfa_hedge/awm.h"
#include "wfa_hedge/losses.h"
#include "wfa_hedge/ngram.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/regret.h"
#include "wfa_hedge/sleeping.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

using testing::AllStrings;
using testing::AllStringsUpTo;
using testing::BruteEvaluate;
using testing::BruteSupport;
using testing::Matrix;
using testing::RandomLosses;
using testing::RandomWfa;
using testing::RandomWfaOptions;
using testing::Sequence;
using testing::Support;

// Tolerances and limits.
constexpr double kOracleRelTol = 1e-9;
constexpr double kOracleSeconds = 5.0;
constexpr double kRenyiResidualTol = 1e-9;
constexpr double kClosedFormTol = 1e-12;
constexpr double kGridStep = 1e-4;
constexpr double kGridObjectiveTol = 1e-3;
constexpr int kProdEgIterations = 2000;
constexpr double kProdEgStep = 0.01;
constexpr double kProdEgSeconds = 10.0;
constexpr double kLanguageTol = 1e-12;
constexpr double kPhiAwmTol = 1e-9;
constexpr int kTouchConstant = 4;
constexpr double kMassTol = 1e-9;
constexpr double kReductionTol = 1e-12;
constexpr double kOpsTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a failed check; keeps the first message.
  void Check(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

Wfa Product(const Wfa& c, int horizon) {
  return *Intersect(c, *BuildLengthAutomaton(c.alphabet_size(), horizon));
}

// p_1 .. p_T of the engine.
Matrix PlayAwm(AwmState& state, const Matrix& losses) {
  Matrix out;
  for (const auto& l : losses) {
    out.push_back(state.distribution());
    if (!state.Step(l).ok()) return {};
  }
  return out;
}

History ToHistory(const Matrix& p, const Matrix& losses) {
  History h;
  h.p = p;
  h.losses = losses;
  return h;
}

Wfa RandomWeightedShift(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (auto& row : m) {
    double sum = 0.0;
    for (double& v : row) sum += (v = u(rng));
    for (double& v : row) v /= sum;
  }
  std::vector<double> init(n);
  for (double& v : init) v = u(rng);
  return *BuildWeightedShift(m, init);
}

// Uniform two-symbol C_T over a few strings drawn with a random bias.
Wfa RandomUniformBinary(int horizon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> bias(0.1, 0.9);
  std::uniform_int_distribution<int> count(1, 6);
  std::bernoulli_distribution is_b(bias(rng));
  std::vector<Sequence> chosen;
  for (int n = count(rng); n > 0; --n) {
    Sequence x(horizon);
    for (Label& l : x) l = is_b(rng);
    if (std::find(chosen.begin(), chosen.end(), x) == chosen.end()) {
      chosen.push_back(x);
    }
  }
  return testing::TrieWfa(chosen, 2);
}

double ModelLogProb(const NGramModel& m, const Sequence& x) {
  double lp = 0.0;
  for (size_t t = 0; t < x.size(); ++t) {
    const size_t lag = std::min<size_t>(t, m.order() - 1);
    const double w = m.Weight(
        *m.ContextIndex(Sequence(x.begin() + t - lag, x.begin() + t)), x[t]);
    if (w <= 0.0) return -INFINITY;
    lp += std::log(w);
  }
  return lp;
}

// max_x log q(x) / q_w(x) over the enumerated support.
double BruteDivergenceInf(const Support& s, const NGramModel& m) {
  double best = -INFINITY;
  for (size_t i = 0; i < s.paths.size(); ++i) {
    best = std::max(
        best, std::log(s.weights[i] / s.Total()) - ModelLogProb(m, s.paths[i]));
  }
  return best;
}

double GridMinimum(const Support& s) {
  double best = INFINITY;
  auto m = NGramModel::Uniform(SymbolTable::Alphabetic(2), 1);
  for (int i = 0; i * kGridStep <= 1.0 + 1e-12; ++i) {
    const double p = std::min(1.0, i * kGridStep);
    m->SetWeight(0, 0, p);
    m->SetWeight(0, 1, 1.0 - p);
    best = std::min(best, BruteDivergenceInf(s, *m));
  }
  return best;
}

Outcome AwmOracle() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  constexpr int kHorizon = 6;
  const Wfa c = *BuildKShift(3, 2);
  const Support s = BruteSupport(Product(c, kHorizon), kHorizon);
  o.Check(s.paths.size() == 120, absl::StrCat("K = ", s.paths.size()));
  const double eta = TuneEtaFixed(kHorizon, std::log(s.paths.size()));
  double worst = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const Matrix losses = RandomLosses(3, kHorizon, rng);
    auto state = AwmState::Init(c, kHorizon, eta);
    if (!state.ok()) return {false, std::string(state.status().message())};
    const Matrix got = PlayAwm(*state, losses);
    const Matrix want = testing::BruteAwm(s, losses, eta, 3);
    o.Check(got.size() == want.size(), "engine failed");
    for (size_t t = 0; t < got.size(); ++t) {
      for (int a = 0; a < 3; ++a) {
        worst = std::max(worst, std::fabs(got[t][a] - want[t][a]) /
                                    std::max(want[t][a], 1e-300));
      }
    }
  }
  const double secs = Seconds(start);
  o.Check(worst <= kOracleRelTol, absl::StrCat("max rel err ", worst));
  o.Check(secs < kOracleSeconds, absl::StrCat("runtime ", secs, " s"));
  if (o.pass) {
    o.detail = absl::StrFormat("K=120, 20 streams, max rel err %.2e, %.2f s",
                               worst, secs);
  }
  return o;
}

Outcome AwmBounds() {
  Outcome o;
  int runs = 0;
  int violations = 0;
  double worst_residual = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(2000 + seed);
    Wfa c;
    const int family = seed % 3;
    if (family == 0) {
      c = *BuildKShift(3 + seed % 2, 1 + seed % 3);
    } else if (family == 1) {
      c = RandomWeightedShift(3, rng);
    } else {
      c = *BuildHierarchyPreset();
    }
    const int horizon = 8 + seed % 9;
    const Wfa c_t = Product(c, horizon);
    auto eta_star = TuneEtaRenyi(c_t, horizon);
    if (!eta_star.ok())
      return {false, std::string(eta_star.status().message())};
    worst_residual = std::max(
        worst_residual, std::fabs(*RenyiEtaResidual(c_t, horizon, *eta_star)));
    const double log_k = *LogCountAcceptingPaths(c_t);
    const double eta = seed % 2 == 0 ? *eta_star : TuneEtaFixed(horizon, log_k);
    auto state = AwmState::Init(c, horizon, eta);
    if (!state.ok()) return {false, std::string(state.status().message())};
    const Matrix losses = RandomLosses(c.alphabet_size(), horizon, rng);
    const History h = ToHistory(PlayAwm(*state, losses), losses);
    auto b = ComputeAwmBounds(c_t, horizon, eta);
    auto w = WeightedRegret(h, c_t);
    auto u = UnweightedRegret(h, c_t);
    if (!b.ok() || !w.ok() || !u.ok()) return {false, "regret failed"};
    violations += w->value > b->weighted;
    violations += u->value > b->unweighted;
    ++runs;
  }
  o.Check(violations == 0, absl::StrCat(violations, " violations"));
  o.Check(worst_residual <= kRenyiResidualTol,
          absl::StrCat("tuned-rate residual ", worst_residual));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "%d runs over 3 families, 0 violations, max residual %.1e", runs,
        worst_residual);
  }
  return o;
}

Outcome ApproxBound() {
  Outcome o;
  constexpr int kHorizon = 8;
  const Wfa c = *BuildKShift(3, 2);
  const Wfa c_t = Product(c, kHorizon);
  const Support s = BruteSupport(c_t, kHorizon);
  const double log_k = std::log(s.paths.size());
  int violations = 0;
  double min_slack = INFINITY;
  for (int order : {1, 2}) {
    auto ml = MlNGram(c_t, order);
    if (!ml.ok()) return {false, std::string(ml.status().message())};
    const double d_inf = BruteDivergenceInf(s, ml->model);
    auto dp = RenyiDivergenceInf(c_t, ml->model);
    o.Check(dp.ok() && std::fabs(dp->value - d_inf) <= 1e-12,
            "divergence mismatch");
    const Wfa played = NGramToWfa(ml->model);
    const double eta = TuneEtaFixed(kHorizon, kHorizon * std::log(3.0));
    for (int seed = 0; seed < 50; ++seed) {
      std::mt19937_64 rng(3000 + 100 * order + seed);
      auto state = AwmState::Init(played, kHorizon, eta);
      if (!state.ok()) return {false, std::string(state.status().message())};
      const Matrix losses = RandomLosses(3, kHorizon, rng);
      const History h = ToHistory(PlayAwm(*state, losses), losses);
      const double regret = WeightedRegret(h, c_t)->value;
      const double bound = eta * kHorizon / 8 + log_k / eta + d_inf;
      violations += regret > bound;
      min_slack = std::min(min_slack, bound - regret);
    }
  }
  o.Check(violations == 0, absl::StrCat(violations, " violations"));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "unigram and bigram, 100 runs, 0 violations, min slack %.3f",
        min_slack);
  }
  return o;
}

Outcome KShiftBigram() {
  Outcome o;
  std::string divs;
  for (auto [n, k, t] :
       {std::tuple{3, 2, 11}, std::tuple{4, 1, 9}, std::tuple{2, 3, 12}}) {
    const Wfa c_t = Product(*BuildKShift(n, k), t);
    auto closed = MlBigramKShiftClosedForm(n, k, t);
    auto ml = MlNGram(c_t, 2);
    if (!closed.ok() || !ml.ok()) return {false, "model failed"};
    double err = 0.0;
    for (int c = 0; c < closed->num_contexts(); ++c) {
      for (Label l = 0; l < n; ++l) {
        err = std::max(
            err, std::fabs(closed->Weight(c, l) - ml->model.Weight(c, l)));
      }
    }
    auto d = RenyiDivergenceInf(c_t, *closed);
    o.Check(err <= kClosedFormTol,
            absl::StrCat("(", n, ",", k, ",", t, ") error ", err));
    o.Check(d.ok() && std::isfinite(d->value), "infinite divergence");
    absl::StrAppendFormat(&divs, " D(%d,%d,%d)=%.4f", n, k, t,
                          d.ok() ? d->value : NAN);
  }
  if (o.pass) o.detail = "closed form matches ML bigram;" + divs;
  return o;
}

Outcome UnigramClosedForm() {
  Outcome o;
  std::mt19937_64 rng(4000);
  std::uniform_int_distribution<int> length(2, 8);
  double worst = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int horizon = length(rng);
    const Wfa c_t = RandomUniformBinary(horizon, rng);
    auto m = UnigramRenyiClosedForm(c_t);
    if (!m.ok()) return {false, std::string(m.status().message())};
    lo = std::min(lo, m->Weight(0, 0));
    hi = std::max(hi, m->Weight(0, 0));
    const Support s = BruteSupport(c_t, horizon);
    worst =
        std::max(worst, std::fabs(BruteDivergenceInf(s, *m) - GridMinimum(s)));
  }
  o.Check(worst <= kGridObjectiveTol, absl::StrCat("objective gap ", worst));

  // One sequence with (1/2 + gamma) T a's, T - 1 others with one b each.
  constexpr int kT = 100;
  constexpr double kGamma = 0.05;
  const int n_a = std::lround((0.5 + kGamma) * kT);
  std::vector<Sequence> paths;
  Sequence x(kT, 1);
  std::fill(x.begin(), x.begin() + n_a, 0);
  paths.push_back(x);
  for (int i = 0; i < kT - 1; ++i) {
    Sequence y(kT, 0);
    y[i] = 1;
    paths.push_back(y);
  }
  const Wfa example = testing::TrieWfa(paths, 2);
  auto renyi = UnigramRenyiClosedForm(example);
  auto ml = MlNGram(example, 1);
  if (!renyi.ok() || !ml.ok()) return {false, "worked example failed"};
  const double ml_formula = 1 + kGamma / kT - 1.5 / kT + 1.0 / (kT * kT);
  o.Check(std::fabs(renyi->Weight(0, 0) - (1 + 2 * kGamma) / 2) <= 1e-12,
          absl::StrCat("renyi weight ", renyi->Weight(0, 0)));
  o.Check(std::fabs(ml->model.Weight(0, 0) - ml_formula) <= 1e-12,
          absl::StrCat("ML weight ", ml->model.Weight(0, 0)));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "20 instances, max gap %.1e, weights %.3f..%.3f; example w=%.4f vs "
        "ML %.4f",
        worst, lo, hi, renyi->Weight(0, 0), ml->model.Weight(0, 0));
  }
  return o;
}

Outcome ProdEgGap() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5000);
  std::uniform_int_distribution<int> length(3, 8);
  double worst_margin = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const int horizon = length(rng);
    const Wfa c_t = RandomUniformBinary(horizon, rng);
    ProdEgOptions opts;
    opts.schedule = ProdEgOptions::Schedule::kFixed;
    opts.eta = kProdEgStep;
    auto r = ProdEg(c_t, 1, kProdEgIterations, opts);
    if (!r.ok()) return {false, std::string(r.status().message())};
    const double gap = r->objective - GridMinimum(BruteSupport(c_t, horizon));
    const double bound =
        ProdEgGapBound(1, 2, kProdEgStep, kProdEgIterations, r->max_sup_norm);
    worst_margin = std::min(worst_margin, bound - gap);
    o.Check(gap <= bound, absl::StrCat("gap ", gap, " > bound ", bound));
  }
  const double secs = Seconds(start);
  o.Check(secs < kProdEgSeconds, absl::StrCat("runtime ", secs, " s"));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "10 instances, tau=%d, eta=%.2f, min margin %.3f, %.2f s",
        kProdEgIterations, kProdEgStep, worst_margin, secs);
  }
  return o;
}

Outcome PhiMachinery() {
  Outcome o;
  // Conversion round trip.
  std::mt19937_64 rng(6000);
  const std::vector<Sequence> strings = AllStringsUpTo(3, 6);
  double worst = 0.0;
  int converted = 0;
  for (int i = 0; i < 50; ++i) {
    const Wfa a = testing::RandomSharedRows(rng);
    PhiConvertOptions opts;
    opts.shadowing = i % 2 == 0;
    std::vector<PhiConvertStep> steps;
    auto p = PhiConvert(a, opts, &steps);
    if (!p.ok()) return {false, std::string(p.status().message())};
    converted += !steps.empty();
    auto e = PhiExpand(*p);
    if (!e.ok()) return {false, std::string(e.status().message())};
    for (const Sequence& x : strings) {
      worst = std::max(worst,
                       std::fabs(BruteEvaluate(*e, x) - BruteEvaluate(a, x)));
    }
  }
  o.Check(worst <= kLanguageTol, absl::StrCat("language error ", worst));

  // Paired runs and touched counters on the bigram k-shift model.
  double pair_err = 0.0;
  std::string touch;
  for (int n : {4, 8, 16}) {
    constexpr int kHorizon = 20;
    const Wfa plain = NGramToWfa(*MlBigramKShiftClosedForm(n, 2, kHorizon));
    PhiConvertOptions opts;
    opts.shadowing = true;
    auto phi = PhiConvert(plain, opts);
    if (!phi.ok()) return {false, std::string(phi.status().message())};
    auto a = AwmState::Init(plain, kHorizon, 0.3);
    auto b = AwmState::InitPhi(*phi, kHorizon, 0.3);
    if (!a.ok() || !b.ok()) return {false, "engine init failed"};
    std::mt19937_64 lrng(6100 + n);
    const Matrix losses = RandomLosses(n, kHorizon, lrng);
    int64_t max_plain = 0;
    int64_t max_phi = 0;
    int64_t min_plain = INT64_MAX;
    for (int t = 0; t < kHorizon; ++t) {
      for (int e = 0; e < n; ++e) {
        pair_err = std::max(
            pair_err, std::fabs(a->distribution()[e] - b->distribution()[e]));
      }
      max_plain = std::max(max_plain, a->last_touched());
      max_phi = std::max(max_phi, b->last_touched());
      // Round zero only reads the start state's arcs.
      if (t > 0) min_plain = std::min(min_plain, a->last_touched());
      if (!a->Step(losses[t]).ok() || !b->Step(losses[t]).ok()) {
        return {false, "step failed"};
      }
    }
    o.Check(max_phi <= kTouchConstant * n,
            absl::StrCat("N=", n, " phi touched ", max_phi));
    o.Check(min_plain >= n * n,
            absl::StrCat("N=", n, " plain touched ", min_plain));
    absl::StrAppendFormat(&touch, " N=%d:%d/%d", n, max_phi, max_plain);
  }
  o.Check(pair_err <= kPhiAwmTol, absl::StrCat("phi-AWM error ", pair_err));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "50 round trips (%d converted), err %.1e; paired err %.1e; "
        "touched phi/plain%s",
        converted, worst, pair_err, touch);
  }
  return o;
}

Outcome PhiFilter() {
  Outcome o;
  std::mt19937_64 rng(7000);
  RandomWfaOptions opts;
  opts.num_states = 5;
  const std::vector<Sequence> strings = AllStringsUpTo(3, 5);
  double worst = 0.0;
  int max_paths = 0;
  for (int i = 0; i < 20; ++i) {
    const Wfa a = testing::AddRandomPhi(RandomWfa(opts, rng), 0.6, rng);
    const Wfa b = testing::AddRandomPhi(RandomWfa(opts, rng), 0.6, rng);
    auto pa = PhiWfa::Create(a);
    auto pb = PhiWfa::Create(b);
    if (!pa.ok() || !pb.ok()) return {false, "bad random automaton"};
    auto c = PhiIntersect(*pa, *pb);
    if (!c.ok()) return {false, std::string(c.status().message())};
    auto e = PhiExpand(*c);
    auto raw = PhiFilteredComposition(*pa, *pb);
    if (!e.ok() || !raw.ok()) return {false, "expansion failed"};
    for (const Sequence& x : strings) {
      worst =
          std::max(worst, std::fabs(BruteEvaluate(*e, x) -
                                    BruteEvaluate(a, x) * BruteEvaluate(b, x)));
    }
    max_paths = std::max(max_paths, testing::MaxPhiPaths(*raw));
  }
  o.Check(worst <= kLanguageTol, absl::StrCat("pointwise error ", worst));
  o.Check(max_paths <= 1, absl::StrCat(max_paths, " phi-paths to one pair"));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "20 pairs, max error %.1e, at most %d phi-path per pair", worst,
        max_paths);
  }
  return o;
}

Outcome AwakeAwmChecks() {
  Outcome o;
  constexpr int kN = 3;
  constexpr int kHorizon = 6;
  const Wfa c = *BuildKShift(kN, 2);
  const Wfa c_t = Product(c, kHorizon);
  const Support s = BruteSupport(c_t, kHorizon);
  o.Check(s.paths.size() <= 200, "instance too large");
  const double log_k = std::log(s.paths.size());
  double mass_err = 0.0;
  double worst_excess = -INFINITY;
  double vertex_err = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng(8000 + seed);
    const auto awake = GenRandomAwakeSets(kN, kHorizon, 0.6, rng);
    std::mt19937_64 lrng(8100 + seed);
    Matrix losses = RandomLosses(kN, kHorizon, lrng);
    for (int t = 0; t < kHorizon; ++t) {
      for (int a = 0; a < kN; ++a) {
        if (!awake[t][a]) losses[t][a] = 0.0;
      }
    }
    const double eta = 0.1 + 0.05 * (seed % 20);
    auto awm = AwakeAwm::Init(c, kHorizon, eta);
    if (!awm.ok()) return {false, std::string(awm.status().message())};
    SleepingHistory h;
    for (int t = 0; t < kHorizon; ++t) {
      std::vector<double> before(s.paths.size());
      double awake_before = 0.0;
      for (size_t i = 0; i < s.paths.size(); ++i) {
        before[i] = awm->state().LogPathWeight(s.paths[i]);
        if (awake[t][s.paths[i][t]]) awake_before += std::exp(before[i]);
      }
      h.p.push_back(*awm->Distribution(awake[t]));
      h.losses.push_back(losses[t]);
      h.awake.push_back(awake[t]);
      if (!awm->Step(awake[t], losses[t]).ok()) return {false, "step failed"};
      double awake_after = 0.0;
      for (size_t i = 0; i < s.paths.size(); ++i) {
        const double after = awm->state().LogPathWeight(s.paths[i]);
        if (awake[t][s.paths[i][t]]) {
          awake_after += std::exp(after);
        } else {
          mass_err = std::max(mass_err,
                              std::fabs(std::exp(after) - std::exp(before[i])));
        }
      }
      mass_err = std::max(mass_err, std::fabs(awake_after - awake_before));
    }
    auto excess = MaxVertexExcess(h, c_t, eta);
    if (!excess.ok()) return {false, std::string(excess.status().message())};
    // Every vertex by enumeration.
    double brute = -INFINITY;
    for (const Sequence& x : s.paths) {
      double regret = 0.0;
      int awake_rounds = 0;
      for (int t = 0; t < kHorizon; ++t) {
        if (!awake[t][x[t]]) continue;
        ++awake_rounds;
        regret += h.ExpectedLoss(t) - losses[t][x[t]];
      }
      brute = std::max(brute, regret - (eta / 8 * awake_rounds + log_k / eta));
    }
    vertex_err = std::max(vertex_err, std::fabs(brute - excess->value));
    worst_excess = std::max(worst_excess, brute);
  }
  o.Check(mass_err <= kMassTol, absl::StrCat("mass drift ", mass_err));
  o.Check(worst_excess <= 0.0, absl::StrCat("vertex excess ", worst_excess));
  o.Check(vertex_err <= 1e-9, absl::StrCat("vertex pass error ", vertex_err));

  // All experts awake reduces to plain AWM.
  double reduction = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    std::mt19937_64 lrng(8200 + seed);
    const Matrix losses = RandomLosses(kN, kHorizon, lrng);
    auto a = AwakeAwm::Init(c, kHorizon, 0.5);
    auto b = AwmState::Init(c, kHorizon, 0.5);
    const AwakeSet all(kN, true);
    for (int t = 0; t < kHorizon; ++t) {
      const auto p = *a->Distribution(all);
      for (int e = 0; e < kN; ++e) {
        reduction = std::max(reduction, std::fabs(p[e] - b->distribution()[e]));
      }
      if (!a->Step(all, losses[t]).ok() || !b->Step(losses[t]).ok()) {
        return {false, "step failed"};
      }
    }
  }
  o.Check(reduction <= kReductionTol, absl::StrCat("reduction ", reduction));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "K=%d, 50 runs, mass drift %.1e, max vertex excess %.3f, "
        "reduction err %.1e",
        static_cast<int>(s.paths.size()), mass_err, worst_excess, reduction);
  }
  return o;
}

Outcome CoreOps() {
  Outcome o;
  std::mt19937_64 rng(9000);
  // Intersection on 10^4 strings over ten symbols.
  RandomWfaOptions big;
  big.num_symbols = 10;
  big.num_states = 6;
  big.arc_probability = 0.7;
  big.final_probability = 0.7;
  const std::vector<Sequence> strings = AllStrings(10, 4);
  double inter = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Wfa a = RandomWfa(big, rng);
    const Wfa b = RandomWfa(big, rng);
    auto c = Intersect(a, b);
    if (!c.ok()) return {false, std::string(c.status().message())};
    for (const Sequence& x : strings) {
      const double want = BruteEvaluate(a, x) * BruteEvaluate(b, x);
      inter = std::max(inter,
                       std::fabs(Evaluate(*c, x) - want) / std::max(1.0, want));
    }
  }
  o.Check(inter <= kOpsTol, absl::StrCat("intersection error ", inter));

  RandomWfaOptions acyclic;
  acyclic.num_states = 7;
  acyclic.acyclic = true;
  const std::vector<Sequence> short_strings = AllStringsUpTo(3, 7);
  double stochastic = 0.0;
  double preserved = 0.0;
  double backward = 0.0;
  for (int i = 0; i < 30; ++i) {
    const Wfa a = Connect(RandomWfa(acyclic, rng));
    if (a.NumStates() == 1 && !a.IsFinal(0)) continue;
    double log_total = 0.0;
    auto p = WeightPush(a, &log_total);
    auto d = BackwardDistances(a);
    if (!p.ok() || !d.ok()) return {false, "push failed"};
    for (StateId q = 0; q < p->NumStates(); ++q) {
      double out = p->Final(q);
      for (const Arc& arc : p->Arcs(q)) out += arc.weight;
      stochastic = std::max(stochastic, std::fabs(out - 1.0));
    }
    for (StateId q = 0; q < a.NumStates(); ++q) {
      Wfa from = a;
      from.SetInitial(q);
      double sum = 0.0;
      for (const Sequence& x : short_strings) sum += BruteEvaluate(from, x);
      backward =
          std::max(backward, std::fabs((*d)[q] - sum) / std::max(1.0, sum));
    }
    for (const Sequence& x : short_strings) {
      const double w = BruteEvaluate(a, x);
      preserved = std::max(
          preserved, std::fabs(BruteEvaluate(*p, x) * std::exp(log_total) - w));
    }
  }
  o.Check(stochastic <= kOpsTol, absl::StrCat("stochasticity ", stochastic));
  o.Check(preserved <= kOpsTol, absl::StrCat("path weights ", preserved));
  o.Check(backward <= kOpsTol, absl::StrCat("backward ", backward));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "intersection %.1e on 10^4 strings, stochastic %.1e, paths %.1e, "
        "backward %.1e",
        inter, stochastic, preserved, backward);
  }
  return o;
}

struct CliResult {
  int code;
  std::string out;
};

CliResult RunCli(const std::string& args) {
  const std::string cmd =
      std::string(WFA_HEDGE_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r{-1, ""};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome Cli() {
  namespace fs = std::filesystem;
  Outcome o;
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(WFA_HEDGE_CONFIG_DIR)) {
    if (e.path().extension() == ".json") configs.push_back(e.path());
  }
  std::sort(configs.begin(), configs.end());
  o.Check(!configs.empty(), "no shipped configs");
  for (const fs::path& cfg : configs) {
    const CliResult a = RunCli("run --config " + cfg.string());
    const CliResult b = RunCli("run --config " + cfg.string());
    const std::string golden =
        ReadFile(fs::path(WFA_HEDGE_GOLDEN_DIR) / cfg.filename());
    o.Check(a.code == 0, cfg.filename().string() + " failed");
    o.Check(a.out == b.out && a.out == golden,
            cfg.filename().string() + " differs");
  }
  const std::string first = configs.empty() ? "" : configs.front().string();
  const int fault =
      RunCli("run --config " + first + " --fault corrupt_bound").code;
  o.Check(fault == 2, absl::StrCat("fault exit code ", fault));
  if (o.pass) {
    o.detail = absl::StrCat(configs.size(),
                            " configs replay byte-identically; fault exit 2");
  }
  return o;
}

int Main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria =
      {
          {"AWM matches path enumeration", AwmOracle},
          {"AWM regret bounds and tuned rate", AwmBounds},
          {"n-gram approximation regret bound", ApproxBound},
          {"k-shift bigram closed form", KShiftBigram},
          {"two-symbol unigram closed form", UnigramClosedForm},
          {"Prod-EG optimization gap", ProdEgGap},
          {"failure-transition conversion and AWM", PhiMachinery},
          {"failure-transition intersection filter", PhiFilter},
          {"sleeping-experts AWM", AwakeAwmChecks},
          {"core automata operations", CoreOps},
          {"CLI replay and exit codes", Cli},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[i].second();
    failures += !o.pass;
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), Seconds(start));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace wfa_hedge

int main() { return wfa_hedge::Main(); }
