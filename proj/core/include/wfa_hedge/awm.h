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

// Automata weighted majority over plain and failure-transition automata.
//
// Positional convention: the loss of round t scales the arcs that consume the
// t-th symbol, and the distribution for round t+1 is the marginal of the
// (t+1)-th symbol under the reweighted path distribution.

#ifndef WFA_HEDGE_AWM_H_
#define WFA_HEDGE_AWM_H_

#include <cstdint>
#include <random>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/signed_log.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

// Seeded mt19937_64 with a portable 53-bit uniform draw.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform();
  uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

// Inverse-CDF draw from a probability vector.
int Sample(const std::vector<double>& p, Rng& rng);

class AwmState {
 public:
  // B = C intersected with S_T; C must be phi-free and deterministic.
  static absl::StatusOr<AwmState> Init(const Wfa& c, int horizon, double eta);
  // Same with a failure-transition competitor, intersected through the filter.
  static absl::StatusOr<AwmState> InitPhi(const PhiWfa& c, int horizon,
                                          double eta);
  // From an already intersected, acyclic and level-consistent automaton.
  static absl::StatusOr<AwmState> FromProduct(const Wfa& b, int horizon,
                                              double eta);

  // Receives loss l_t and returns p_{t+1} (p_T is kept after the last round).
  absl::StatusOr<std::vector<double>> Step(const std::vector<double>& loss);

  // Multiplies the arcs consuming symbol t by exp(log_factors[label]).
  // `expected_loss` is added to the cumulative loss.
  absl::StatusOr<std::vector<double>> StepWithLogFactors(
      const std::vector<double>& log_factors, double expected_loss);

  // p_{t+1} after t rounds.
  const std::vector<double>& distribution() const { return p_; }
  // Unnormalized per-label flows behind distribution().
  const std::vector<SignedLogWeight>& flows() const { return flows_; }

  int round() const { return round_; }
  int horizon() const { return horizon_; }
  double eta() const { return eta_; }
  int num_experts() const { return num_labels_; }
  double cumulative_loss() const { return cumulative_loss_; }
  bool has_phi() const { return has_phi_; }

  // Edge work of the last pass: arcs visited plus phi-chain steps.
  int64_t last_touched() const { return last_touched_; }
  int64_t total_touched() const { return total_touched_; }
  // Number of arcs (phi included) leaving level-t states.
  int64_t LevelArcCount(int t) const;
  int max_phi_chain() const { return max_phi_chain_; }

  // Pushed automaton A, linear weights.
  const Wfa& automaton() const { return a_; }
  int NumStates() const { return a_.NumStates(); }
  int NumArcs() const { return a_.NumArcs(); }

  // log of the current weight of path x: pushed weight times all factors
  // applied so far. kLogZero if x is rejected.
  double LogPathWeight(const std::vector<Label>& x) const;

 private:
  struct EngineArc {
    Label label;
    double log_weight;
    StateId dest;
    // Slot index of (dest, label); -1 for phi arcs.
    int slot;
  };

  AwmState() = default;
  absl::Status Build(const Wfa& b);
  // Visits level-t arcs, fills next-level slots and the flows, sets p_.
  void Pass(int t);
  int FindLocal(StateId s, Label label) const;

  Wfa a_;
  int horizon_ = 0;
  double eta_ = 0.0;
  int num_labels_ = 0;
  bool has_phi_ = false;
  int max_phi_chain_ = 0;

  std::vector<std::vector<EngineArc>> arcs_;
  std::vector<StateId> phi_dest_;
  std::vector<double> phi_log_weight_;
  std::vector<int> level_;
  std::vector<std::vector<StateId>> by_level_;
  std::vector<double> log_beta_;

  std::vector<Label> slot_label_;
  std::vector<std::vector<int>> slots_of_state_;
  std::vector<SignedLogWeight> slot_value_;

  std::vector<SignedLogWeight> alpha_;
  std::vector<SignedLogWeight> flows_;
  std::vector<double> p_;
  std::vector<std::vector<double>> applied_log_factors_;

  int round_ = 0;
  double cumulative_loss_ = 0.0;
  int64_t last_touched_ = 0;
  int64_t total_touched_ = 0;
};

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_AWM_H_
