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

#include "wfa_hedge/regret.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/signed_log.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

constexpr double kShannonWindow = 1e-9;

absl::StatusOr<std::vector<int>> Levels(const Wfa& a,
                                        const std::vector<StateId>& order) {
  std::vector<int> level(a.NumStates(), -1);
  level[a.initial()] = 0;
  for (StateId s : order) {
    if (level[s] < 0) continue;
    for (const Arc& arc : a.Arcs(s)) {
      if (level[arc.dest] < 0) {
        level[arc.dest] = level[s] + 1;
      } else if (level[arc.dest] != level[s] + 1) {
        return absl::InvalidArgumentError(
            "competitor is not level-consistent; intersect with S_T first");
      }
    }
  }
  return level;
}

// Shannon entropy of the path distribution of an acyclic automaton:
// log Z - E_q[log C(x)].
absl::StatusOr<double> AutomatonShannonEntropy(const Wfa& c_t) {
  auto order = TopologicalOrder(c_t);
  if (!order.ok()) return order.status();
  auto beta = LogBackwardDistances(c_t);
  if (!beta.ok()) return beta.status();
  const double log_z = (*beta)[c_t.initial()];
  if (log_z == kLogZero) return absl::InvalidArgumentError("empty support");
  std::vector<double> alpha(c_t.NumStates(), kLogZero);
  alpha[c_t.initial()] = 0.0;
  double expected_log_weight = 0.0;
  for (StateId s : *order) {
    if (alpha[s] == kLogZero) continue;
    if (c_t.Final(s) > 0.0) {
      const double lf = std::log(c_t.Final(s));
      expected_log_weight += std::exp(alpha[s] + lf - log_z) * lf;
    }
    for (const Arc& arc : c_t.Arcs(s)) {
      if (arc.weight <= 0.0 || (*beta)[arc.dest] == kLogZero) continue;
      const double lw = std::log(arc.weight);
      expected_log_weight +=
          std::exp(alpha[s] + lw + (*beta)[arc.dest] - log_z) * lw;
      alpha[arc.dest] = LogAddExp(alpha[arc.dest], alpha[s] + lw);
    }
  }
  return log_z - expected_log_weight;
}

absl::StatusOr<double> SolveRenyiEta(
    const std::function<absl::StatusOr<double>(double)>& entropy, int horizon) {
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  const double target = std::sqrt(8.0 / horizon);
  auto g = [&](double eta) -> absl::StatusOr<double> {
    auto h = entropy(eta);
    if (!h.ok()) return h.status();
    if (*h <= 0.0) {
      return absl::InvalidArgumentError("Renyi entropy is not positive");
    }
    return eta / std::sqrt(*h) - target;
  };
  auto g_lo = g(kEtaFloor);
  if (!g_lo.ok()) return g_lo.status();
  if (*g_lo >= 0.0) return kEtaFloor;
  auto g_hi = g(kEtaCap);
  if (!g_hi.ok()) return g_hi.status();
  if (*g_hi <= 0.0) return kEtaCap;
  double lo = kEtaFloor;
  double hi = kEtaCap;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    auto v = g(mid);
    if (!v.ok()) return v.status();
    if (std::fabs(*v) <= 1e-13 || hi - lo <= 1e-16) break;
    if (*v < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace

double History::AlgorithmLoss() const {
  double total = 0.0;
  for (size_t t = 0; t < losses.size() && t < p.size(); ++t) {
    for (size_t a = 0; a < losses[t].size(); ++a) {
      total += p[t][a] * losses[t][a];
    }
  }
  return total;
}

absl::StatusOr<RegretValue> BestPath(
    const Wfa& c_t, const std::vector<std::vector<double>>& losses,
    bool use_weights) {
  if (c_t.HasPhi()) {
    return absl::InvalidArgumentError("best path needs a phi-free automaton");
  }
  if (c_t.initial() == kNoState) return absl::InvalidArgumentError("empty");
  auto order = TopologicalOrder(c_t);
  if (!order.ok()) return order.status();
  auto level = Levels(c_t, *order);
  if (!level.ok()) return level.status();
  const int horizon = static_cast<int>(losses.size());
  const int n = c_t.NumStates();
  std::vector<double> best(n, kLogZero);
  std::vector<const Arc*> next(n, nullptr);
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    const int l = (*level)[s];
    if (l < 0) continue;
    if (l == horizon && c_t.IsFinal(s)) {
      best[s] = use_weights ? std::log(c_t.Final(s)) : 0.0;
    }
    if (l >= horizon) continue;
    std::vector<const Arc*> arcs;
    for (const Arc& arc : c_t.Arcs(s)) {
      if (arc.weight > 0.0) arcs.push_back(&arc);
    }
    std::sort(arcs.begin(), arcs.end(),
              [](const Arc* x, const Arc* y) { return x->label < y->label; });
    for (const Arc* arc : arcs) {
      if (best[arc->dest] == kLogZero) continue;
      const double score = (use_weights ? std::log(arc->weight) : 0.0) -
                           losses[l][arc->label] + best[arc->dest];
      const double tol = 1e-12 * std::max(1.0, std::fabs(best[s]));
      if (next[s] == nullptr || score > best[s] + tol) {
        best[s] = score;
        next[s] = arc;
      }
    }
  }
  const StateId init = c_t.initial();
  if (best[init] == kLogZero) {
    return absl::FailedPreconditionError("competitor has empty support");
  }
  RegretValue out;
  out.value = best[init];
  out.best_loss = 0.0;
  StateId s = init;
  for (int t = 0; t < horizon && next[s] != nullptr; ++t) {
    out.best.push_back(next[s]->label);
    out.best_loss += losses[t][next[s]->label];
    s = next[s]->dest;
  }
  return out;
}

absl::StatusOr<RegretValue> WeightedRegret(const History& history,
                                           const Wfa& c_t) {
  auto best = BestPath(c_t, history.losses, true);
  if (!best.ok()) return best.status();
  auto log_z = LogBackwardDistances(c_t);
  if (!log_z.ok()) return log_z.status();
  auto log_k = LogCountAcceptingPaths(c_t);
  if (!log_k.ok()) return log_k.status();
  RegretValue out = *std::move(best);
  out.value =
      history.AlgorithmLoss() + out.value - (*log_z)[c_t.initial()] + *log_k;
  return out;
}

absl::StatusOr<RegretValue> UnweightedRegret(const History& history,
                                             const Wfa& c_t) {
  auto best = BestPath(c_t, history.losses, false);
  if (!best.ok()) return best.status();
  RegretValue out = *std::move(best);
  out.value = history.AlgorithmLoss() + out.value;
  return out;
}

absl::StatusOr<double> LogSumPow(const Wfa& c_t, double eta) {
  auto powered = PowerWeights(c_t, eta);
  if (!powered.ok()) return powered.status();
  auto b_eta = LogBackwardDistances(*powered);
  if (!b_eta.ok()) return b_eta.status();
  auto b = LogBackwardDistances(c_t);
  if (!b.ok()) return b.status();
  const double log_z = (*b)[c_t.initial()];
  if (log_z == kLogZero) return absl::InvalidArgumentError("empty support");
  return (*b_eta)[c_t.initial()] - eta * log_z;
}

absl::StatusOr<double> RenyiEntropy(const std::vector<double>& q, double eta) {
  if (eta == 1.0) {
    return absl::InvalidArgumentError(
        "Renyi entropy at eta = 1 is the Shannon entropy");
  }
  if (!(eta >= 0.0)) return absl::InvalidArgumentError("eta must be >= 0");
  std::vector<double> terms;
  for (double v : q) {
    if (v < 0.0) return absl::InvalidArgumentError("negative probability");
    if (v > 0.0) terms.push_back(eta * std::log(v));
  }
  if (terms.empty()) return absl::InvalidArgumentError("empty support");
  return LogSumExp(terms) / (1.0 - eta);
}

absl::StatusOr<double> RenyiEntropy(const Wfa& c_t, double eta) {
  if (eta == 1.0) {
    return absl::InvalidArgumentError(
        "Renyi entropy at eta = 1 is the Shannon entropy");
  }
  auto lsp = LogSumPow(c_t, eta);
  if (!lsp.ok()) return lsp.status();
  return *lsp / (1.0 - eta);
}

double ShannonEntropy(const std::vector<double>& q) {
  double h = 0.0;
  for (double v : q) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

absl::StatusOr<AwmBounds> ComputeAwmBounds(const Wfa& c_t, int horizon,
                                           double eta) {
  if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  auto log_k = LogCountAcceptingPaths(c_t);
  if (!log_k.ok()) return log_k.status();
  auto lsp = LogSumPow(c_t, eta);
  if (!lsp.ok()) return lsp.status();
  AwmBounds b;
  b.log_k = *log_k;
  b.log_sum_pow = *lsp;
  b.weighted = eta * horizon / 8.0 + b.log_k + b.log_sum_pow / eta;
  b.unweighted = eta * horizon / 8.0 + b.log_k / eta;
  return b;
}

double TuneEtaFixed(int horizon, double log_k) {
  if (horizon < 1 || !(log_k > 0.0)) return kEtaFloor;
  const double eta = std::sqrt(8.0 * log_k / horizon);
  return std::clamp(eta, kEtaFloor, kEtaCap);
}

absl::StatusOr<double> TuneEtaRenyi(const std::vector<double>& q, int horizon) {
  int support = 0;
  for (double v : q) support += v > 0.0 ? 1 : 0;
  if (support < 2) {
    return absl::InvalidArgumentError("Renyi tuning needs support size >= 2");
  }
  return SolveRenyiEta(
      [&q](double eta) -> absl::StatusOr<double> {
        if (std::fabs(1.0 - eta) < kShannonWindow) return ShannonEntropy(q);
        return RenyiEntropy(q, eta);
      },
      horizon);
}

absl::StatusOr<double> TuneEtaRenyi(const Wfa& c_t, int horizon) {
  auto count = LogCountAcceptingPaths(c_t);
  if (!count.ok()) return count.status();
  if (*count < std::log(2.0) - 1e-12) {
    return absl::InvalidArgumentError("Renyi tuning needs support size >= 2");
  }
  return SolveRenyiEta(
      [&c_t](double eta) -> absl::StatusOr<double> {
        if (std::fabs(1.0 - eta) < kShannonWindow) {
          return AutomatonShannonEntropy(c_t);
        }
        return RenyiEntropy(c_t, eta);
      },
      horizon);
}

absl::StatusOr<double> RenyiEtaResidual(const Wfa& c_t, int horizon,
                                        double eta) {
  absl::StatusOr<double> h = std::fabs(1.0 - eta) < kShannonWindow
                                 ? AutomatonShannonEntropy(c_t)
                                 : RenyiEntropy(c_t, eta);
  if (!h.ok()) return h.status();
  return eta / std::sqrt(*h) - std::sqrt(8.0 / horizon);
}

}  // namespace wfa_hedge
