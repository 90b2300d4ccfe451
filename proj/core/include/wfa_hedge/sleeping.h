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

// Sleeping experts over automaton-defined expert sequences.
//
// At round t only the experts in the awake set A_t may be played. Paths whose
// t-th symbol is asleep keep their weight; awake paths are reweighted by
// exp(-eta l_t) and rescaled so that their total weight is unchanged.

#ifndef WFA_HEDGE_SLEEPING_H_
#define WFA_HEDGE_SLEEPING_H_

#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/awm.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/regret.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

// awake[a] is true if expert a may be played this round.
using AwakeSet = std::vector<bool>;

// Restriction of p to the awake experts, renormalized. Errors if the awake
// mass is zero.
absl::StatusOr<std::vector<double>> AwakeDistribution(
    const std::vector<double>& p, const AwakeSet& awake);

class AwakeAwm {
 public:
  static absl::StatusOr<AwakeAwm> Init(const Wfa& c, int horizon, double eta);
  static absl::StatusOr<AwakeAwm> InitPhi(const PhiWfa& c, int horizon,
                                          double eta);
  static absl::StatusOr<AwakeAwm> FromProduct(const Wfa& b, int horizon,
                                              double eta);

  // p_t^A for the coming round.
  absl::StatusOr<std::vector<double>> Distribution(
      const AwakeSet& awake) const {
    return AwakeDistribution(state_.distribution(), awake);
  }

  // Plays round t with awake set `awake` and a loss vector that is zero on
  // asleep experts. Returns the unrestricted p_{t+1}. Rounds whose awake set
  // carries no path mass are rejected with FailedPrecondition.
  absl::StatusOr<std::vector<double>> Step(const AwakeSet& awake,
                                           const std::vector<double>& loss);

  const AwmState& state() const { return state_; }
  int round() const { return state_.round(); }
  double eta() const { return state_.eta(); }
  int num_experts() const { return state_.num_experts(); }
  // sum_t E_{a ~ p_t^A}[l_t[a]].
  double cumulative_loss() const { return state_.cumulative_loss(); }

 private:
  explicit AwakeAwm(AwmState state) : state_(std::move(state)) {}

  AwmState state_;
};

struct SleepingHistory {
  // Awake distributions p_t^A actually played.
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> losses;
  std::vector<AwakeSet> awake;

  int rounds() const { return static_cast<int>(losses.size()); }
  // E_{p_t^A}[l_t].
  double ExpectedLoss(int t) const;
};

// A distribution u over accepting paths, stored sparsely by label sequence.
class ComparatorMixture {
 public:
  // Entries must be non-negative and sum to 1 within 1e-9.
  static absl::StatusOr<ComparatorMixture> Create(
      std::vector<std::pair<std::vector<Label>, double>> entries);
  static ComparatorMixture PointMass(std::vector<Label> path);
  // Point mass on the path with the largest sleeping regret.
  static absl::StatusOr<ComparatorMixture> BestSinglePath(
      const SleepingHistory& history, const Wfa& c_t);

  const std::vector<std::pair<std::vector<Label>, double>>& entries() const {
    return entries_;
  }
  // sum of u[x] over paths with x[t] awake.
  double AwakeMass(const AwakeSet& awake, int t) const;

 private:
  explicit ComparatorMixture(
      std::vector<std::pair<std::vector<Label>, double>> entries)
      : entries_(std::move(entries)) {}

  std::vector<std::pair<std::vector<Label>, double>> entries_;
};

struct SleepingRegretValue {
  double value;
  // (eta / 8) sum_t u(A_t) + log K / eta.
  double bound;
};

// sum_t sum_{x[t] in A_t} u[x] (E_{p_t^A}[l_t] - l_t[x[t]]). Errors if some
// entry of u is not an accepting path of c_t.
absl::StatusOr<SleepingRegretValue> SleepingRegret(
    const SleepingHistory& history, const Wfa& c_t, const ComparatorMixture& u,
    double eta);

struct VertexExcess {
  // max over accepting x of regret(x) - bound(x) for point masses u = x.
  double value;
  std::vector<Label> path;
};

// Checks the bound for every vertex of the comparator simplex at once by a
// best-path pass. The bound holds for all vertices iff value <= 0.
absl::StatusOr<VertexExcess> MaxVertexExcess(const SleepingHistory& history,
                                             const Wfa& c_t, double eta);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_SLEEPING_H_
