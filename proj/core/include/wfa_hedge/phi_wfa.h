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

// Automata with failure (phi) transitions. Reading symbol a at a state with
// no a-arc follows the state's phi arc without consuming a, multiplying by
// its weight, and retries. Final weights are local to each state.

#ifndef WFA_HEDGE_PHI_WFA_H_
#define WFA_HEDGE_PHI_WFA_H_

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

inline constexpr int kDefaultPhiChainCap = 16;

// A Wfa with at most one phi arc per state, no phi cycles and deterministic
// non-phi arcs.
class PhiWfa {
 public:
  static absl::StatusOr<PhiWfa> Create(Wfa wfa,
                                       int chain_cap = kDefaultPhiChainCap);

  const Wfa& wfa() const { return wfa_; }
  // Longest run of consecutive phi arcs.
  int max_phi_chain() const { return max_phi_chain_; }
  int chain_cap() const { return chain_cap_; }

 private:
  PhiWfa(Wfa wfa, int max_chain, int cap)
      : wfa_(std::move(wfa)), max_phi_chain_(max_chain), chain_cap_(cap) {}

  Wfa wfa_;
  int max_phi_chain_;
  int chain_cap_;
};

// Effective transition for a symbol after following the phi chain.
struct ResolvedArc {
  double weight;
  StateId dest;
  // Number of phi arcs followed.
  int depth;
};

std::optional<ResolvedArc> Resolve(const Wfa& a, StateId s, Label label);

double PhiEvaluate(const PhiWfa& p, const std::vector<Label>& x);

struct SourceSubset {
  // Shared (label, weight) pairs on arcs into the target.
  std::vector<std::pair<Label, double>> shared;
  std::vector<StateId> parents;

  int Benefit() const;
};

// Greedy choice of parents of `q` sharing (label, weight) arcs into q. Ties
// go to the lowest state id. Parents owning a phi arc are not candidates.
SourceSubset PhiSourceSubset(const Wfa& a, StateId q);

struct PhiConvertOptions {
  // Also share (label, weight, dest) arcs with differing destinations among
  // parents, letting a parent keep a different local arc with the same label
  // that shadows the shared one.
  bool shadowing = false;
  int chain_cap = kDefaultPhiChainCap;
};

struct PhiConvertStep {
  StateId target;
  StateId new_state;
  int num_shared;
  int num_parents;
  // Change in the number of transitions.
  int arc_delta;
};

absl::StatusOr<PhiWfa> PhiConvert(const Wfa& a,
                                  const PhiConvertOptions& options = {},
                                  std::vector<PhiConvertStep>* steps = nullptr);

// Plain automaton with the same weighted language. State ids are preserved.
absl::StatusOr<Wfa> PhiExpand(const PhiWfa& p);

// Intersection of phi automata. Each product state keeps the single phi move
// the filter permits: both sides when both own a phi arc, otherwise the side
// that owns one. Labels local to one side are resolved through the other
// side's chain when both own a phi arc.
absl::StatusOr<PhiWfa> PhiIntersect(const PhiWfa& a1, const PhiWfa& a2);

// Labels of the raw three-way composition.
enum class FilteredLabelKind { kSymbol, kPhi22, kPhi11, kPhi21 };

struct FilteredArc {
  FilteredLabelKind kind;
  // Symbol id for kSymbol; otherwise unused.
  Label label;
  double weight;
  int dest;
};

// Untrimmed composition of the renamed automata through the three-state
// filter. State i is (left state, filter state, right state).
struct FilteredComposition {
  std::vector<std::tuple<StateId, int, StateId>> states;
  std::vector<std::vector<FilteredArc>> arcs;
  int initial = 0;
};

absl::StatusOr<FilteredComposition> PhiFilteredComposition(const PhiWfa& a1,
                                                           const PhiWfa& a2);

// Phi-aware backward distances in the log domain over an acyclic automaton.
absl::StatusOr<std::vector<double>> PhiLogBackwardDistances(const Wfa& a);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_PHI_WFA_H_
