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

// Regret against competitor sequences, Renyi entropies and learning-rate
// tuning.

#ifndef WFA_HEDGE_REGRET_H_
#define WFA_HEDGE_REGRET_H_

#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

inline constexpr double kEtaFloor = 1e-6;
inline constexpr double kEtaCap = 10.0;

// Per-round distributions and losses of a run.
struct History {
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> losses;

  int rounds() const { return static_cast<int>(losses.size()); }
  // sum_t p_t . l_t
  double AlgorithmLoss() const;
};

struct RegretValue {
  double value;
  // Maximizing competitor sequence and its cumulative loss.
  std::vector<Label> best;
  double best_loss;
};

// Maximizes sum_t log w(arc_t) * use_weights - l_t[x_t] over accepting paths
// of the acyclic, level-consistent `c_t`; ties go to the lexicographically
// first sequence.
absl::StatusOr<RegretValue> BestPath(
    const Wfa& c_t, const std::vector<std::vector<double>>& losses,
    bool use_weights);

// max_x  sum_t p_t.l_t - sum_t l_t[x_t] + log(q(x) K),  q = C_T / sum C_T.
absl::StatusOr<RegretValue> WeightedRegret(const History& history,
                                           const Wfa& c_t);

// max_x  sum_t p_t.l_t - sum_t l_t[x_t]  over the support of C_T.
absl::StatusOr<RegretValue> UnweightedRegret(const History& history,
                                             const Wfa& c_t);

// log sum_x q(x)^eta for the distribution q induced by C_T.
absl::StatusOr<double> LogSumPow(const Wfa& c_t, double eta);

// (1/(1-eta)) log sum q^eta. Errors at eta = 1.
absl::StatusOr<double> RenyiEntropy(const std::vector<double>& q, double eta);
absl::StatusOr<double> RenyiEntropy(const Wfa& c_t, double eta);
double ShannonEntropy(const std::vector<double>& q);

struct AwmBounds {
  // eta T / 8 + (1/eta) log[K^eta sum q^eta]
  double weighted;
  // eta T / 8 + (1/eta) log K
  double unweighted;
  double log_k;
  double log_sum_pow;
};

absl::StatusOr<AwmBounds> ComputeAwmBounds(const Wfa& c_t, int horizon,
                                           double eta);

// sqrt(8 log K / T), clamped to [kEtaFloor, kEtaCap].
double TuneEtaFixed(int horizon, double log_k);

// Solves eta / sqrt(H_eta(q)) = sqrt(8 / T) by bisection.
absl::StatusOr<double> TuneEtaRenyi(const std::vector<double>& q, int horizon);
absl::StatusOr<double> TuneEtaRenyi(const Wfa& c_t, int horizon);

// eta / sqrt(H_eta) - sqrt(8 / T); zero at the tuned rate.
absl::StatusOr<double> RenyiEtaResidual(const Wfa& c_t, int horizon,
                                        double eta);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_REGRET_H_
