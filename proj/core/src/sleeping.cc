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

#include "wfa_hedge/sleeping.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/signed_log.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

absl::Status CheckAwake(const AwakeSet& awake, int num_experts) {
  if (static_cast<int>(awake.size()) != num_experts) {
    return absl::InvalidArgumentError(absl::StrCat(
        "awake set has ", awake.size(), " entries, expected ", num_experts));
  }
  return absl::OkStatus();
}

// Per-round scores for BestPath: an awake label a contributes
// lbar_t - l_t[a] - penalty, an asleep label nothing. BestPath maximizes the
// sum of -loss, so the entries are negated.
std::vector<std::vector<double>> AwakeScores(const SleepingHistory& h,
                                             double penalty) {
  std::vector<std::vector<double>> out(h.rounds());
  for (int t = 0; t < h.rounds(); ++t) {
    const double lbar = h.ExpectedLoss(t);
    out[t].assign(h.losses[t].size(), 0.0);
    for (size_t a = 0; a < h.losses[t].size(); ++a) {
      if (h.awake[t][a]) out[t][a] = -(lbar - h.losses[t][a] - penalty);
    }
  }
  return out;
}

absl::Status CheckHistory(const SleepingHistory& h) {
  if (h.awake.size() != h.losses.size() || h.p.size() != h.losses.size()) {
    return absl::InvalidArgumentError("history fields have different lengths");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<double>> AwakeDistribution(
    const std::vector<double>& p, const AwakeSet& awake) {
  if (auto st = CheckAwake(awake, p.size()); !st.ok()) return st;
  double mass = 0.0;
  for (size_t a = 0; a < p.size(); ++a) {
    if (awake[a]) mass += p[a];
  }
  if (!(mass > 0.0)) {
    return absl::FailedPreconditionError("awake set carries no mass");
  }
  std::vector<double> out(p.size(), 0.0);
  for (size_t a = 0; a < p.size(); ++a) {
    if (awake[a]) out[a] = p[a] / mass;
  }
  return out;
}

absl::StatusOr<AwakeAwm> AwakeAwm::Init(const Wfa& c, int horizon, double eta) {
  auto s = AwmState::Init(c, horizon, eta);
  if (!s.ok()) return s.status();
  return AwakeAwm(*std::move(s));
}

absl::StatusOr<AwakeAwm> AwakeAwm::InitPhi(const PhiWfa& c, int horizon,
                                           double eta) {
  auto s = AwmState::InitPhi(c, horizon, eta);
  if (!s.ok()) return s.status();
  return AwakeAwm(*std::move(s));
}

absl::StatusOr<AwakeAwm> AwakeAwm::FromProduct(const Wfa& b, int horizon,
                                               double eta) {
  auto s = AwmState::FromProduct(b, horizon, eta);
  if (!s.ok()) return s.status();
  return AwakeAwm(*std::move(s));
}

absl::StatusOr<std::vector<double>> AwakeAwm::Step(
    const AwakeSet& awake, const std::vector<double>& loss) {
  const int n = num_experts();
  if (auto st = CheckAwake(awake, n); !st.ok()) return st;
  if (static_cast<int>(loss.size()) != n) {
    return absl::InvalidArgumentError(
        absl::StrCat("loss has ", loss.size(), " entries, expected ", n));
  }
  for (int a = 0; a < n; ++a) {
    if (!(loss[a] >= 0.0 && loss[a] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("loss entry ", a, " outside [0,1]: ", loss[a]));
    }
    if (!awake[a] && loss[a] != 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("positive loss on asleep expert ", a));
    }
  }
  auto pa = Distribution(awake);
  if (!pa.ok()) {
    return absl::FailedPreconditionError(
        absl::StrCat("round ", round() + 1, ": no accepting path is awake"));
  }
  // rho = p_t(A) / sum_{a in A} p_t[a] exp(-eta l[a]) keeps the awake mass.
  const std::vector<double>& p = state_.distribution();
  std::vector<double> awake_logs;
  std::vector<double> scaled_logs;
  double expected = 0.0;
  for (int a = 0; a < n; ++a) {
    if (!awake[a] || p[a] <= 0.0) continue;
    awake_logs.push_back(std::log(p[a]));
    scaled_logs.push_back(std::log(p[a]) - eta() * loss[a]);
    expected += (*pa)[a] * loss[a];
  }
  const double log_rho = LogSumExp(awake_logs) - LogSumExp(scaled_logs);
  std::vector<double> log_factors(n, 0.0);
  for (int a = 0; a < n; ++a) {
    if (awake[a]) log_factors[a] = -eta() * loss[a] + log_rho;
  }
  return state_.StepWithLogFactors(log_factors, expected);
}

double SleepingHistory::ExpectedLoss(int t) const {
  double v = 0.0;
  for (size_t a = 0; a < losses[t].size() && a < p[t].size(); ++a) {
    v += p[t][a] * losses[t][a];
  }
  return v;
}

absl::StatusOr<ComparatorMixture> ComparatorMixture::Create(
    std::vector<std::pair<std::vector<Label>, double>> entries) {
  double total = 0.0;
  for (const auto& [path, u] : entries) {
    if (!(u >= 0.0) || !std::isfinite(u)) {
      return absl::InvalidArgumentError("mixture weights must be >= 0");
    }
    total += u;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("mixture weights sum to ", total, ", not 1"));
  }
  return ComparatorMixture(std::move(entries));
}

ComparatorMixture ComparatorMixture::PointMass(std::vector<Label> path) {
  return ComparatorMixture({{std::move(path), 1.0}});
}

absl::StatusOr<ComparatorMixture> ComparatorMixture::BestSinglePath(
    const SleepingHistory& history, const Wfa& c_t) {
  if (auto st = CheckHistory(history); !st.ok()) return st;
  auto best = BestPath(c_t, AwakeScores(history, 0.0), false);
  if (!best.ok()) return best.status();
  return PointMass(std::move(best->best));
}

double ComparatorMixture::AwakeMass(const AwakeSet& awake, int t) const {
  double mass = 0.0;
  for (const auto& [path, u] : entries_) {
    if (t < static_cast<int>(path.size()) && awake[path[t]]) mass += u;
  }
  return mass;
}

absl::StatusOr<SleepingRegretValue> SleepingRegret(
    const SleepingHistory& history, const Wfa& c_t, const ComparatorMixture& u,
    double eta) {
  if (auto st = CheckHistory(history); !st.ok()) return st;
  if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  const int horizon = history.rounds();
  for (const auto& [path, w] : u.entries()) {
    if (static_cast<int>(path.size()) != horizon ||
        Evaluate(c_t, path) <= 0.0) {
      return absl::InvalidArgumentError(
          "comparator puts mass on a sequence outside C_T");
    }
  }
  auto log_k = LogCountAcceptingPaths(c_t);
  if (!log_k.ok()) return log_k.status();
  SleepingRegretValue out{0.0, *log_k / eta};
  for (int t = 0; t < horizon; ++t) {
    const double lbar = history.ExpectedLoss(t);
    for (const auto& [path, w] : u.entries()) {
      const Label a = path[t];
      if (history.awake[t][a]) out.value += w * (lbar - history.losses[t][a]);
    }
    out.bound += eta / 8.0 * u.AwakeMass(history.awake[t], t);
  }
  return out;
}

absl::StatusOr<VertexExcess> MaxVertexExcess(const SleepingHistory& history,
                                             const Wfa& c_t, double eta) {
  if (auto st = CheckHistory(history); !st.ok()) return st;
  if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  auto log_k = LogCountAcceptingPaths(c_t);
  if (!log_k.ok()) return log_k.status();
  auto best = BestPath(c_t, AwakeScores(history, eta / 8.0), false);
  if (!best.ok()) return best.status();
  return VertexExcess{best->value - *log_k / eta, std::move(best->best)};
}

}  // namespace wfa_hedge
