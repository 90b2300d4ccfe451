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

// Builders and algorithms over plain (phi-free) automata.

#ifndef WFA_HEDGE_WFA_OPS_H_
#define WFA_HEDGE_WFA_OPS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

// Backward distances indexed by state id.
using PathWeightTable = std::vector<double>;

struct WeightedString {
  std::vector<Label> labels;
  double weight;
};

// ---------------------------------------------------------------------------
// Builders. All emit final weight 1.

struct KShiftOptions {
  // Marks every shift level final, accepting sequences with at most k shifts.
  bool at_most = false;
};

// Sequences over `num_experts` symbols with exactly `k` expert changes.
absl::StatusOr<Wfa> BuildKShift(int num_experts, int k,
                                const KShiftOptions& options = {});

// One state per expert plus a start state. matrix[a][b] weighs the move from
// expert a to expert b; initial[a] weighs starting with a (default all 1).
absl::StatusOr<Wfa> BuildWeightedShift(
    const std::vector<std::vector<double>>& matrix,
    const std::vector<double>& initial = {});

struct HierarchyTier {
  std::vector<Label> experts;
  // Maximum number of shifts onto an expert of this tier.
  int budget = 0;
};

// Sequences that start on an expert of the first tier and shift onto each
// tier at most its budget times. Experts absent from every tier are unused.
absl::StatusOr<Wfa> BuildHierarchy(int num_experts,
                                   const std::vector<HierarchyTier>& tiers);

// Three experts a, b, c: start on a, at most one shift onto b, at most two
// shifts onto c.
absl::StatusOr<Wfa> BuildHierarchyPreset();

// S_T: chain of T+1 states with every symbol between consecutive states.
absl::StatusOr<Wfa> BuildLengthAutomaton(int num_symbols, int horizon);

// ---------------------------------------------------------------------------
// Structure.

bool IsAcyclic(const Wfa& a);

// Topological order over all arcs (phi included); ties by ascending id.
absl::StatusOr<std::vector<StateId>> TopologicalOrder(const Wfa& a);

// Keeps states both reachable from the initial state and able to reach a
// final state. Relative state order is preserved.
Wfa Connect(const Wfa& a);

// ---------------------------------------------------------------------------
// Algorithms.

// Product automaton over the shared alphabet; trimmed.
absl::StatusOr<Wfa> Intersect(const Wfa& a1, const Wfa& a2);

// Raises every transition and final weight to the power eta > 0.
absl::StatusOr<Wfa> PowerWeights(const Wfa& a, double eta);

// Sum of path weights from each state to the final states.
absl::StatusOr<PathWeightTable> BackwardDistances(const Wfa& a);

// Same quantity in the log domain, safe for long horizons.
absl::StatusOr<std::vector<double>> LogBackwardDistances(const Wfa& a);

// Stochastic reweighting. If `log_total` is given it receives log d[initial];
// path weights of the result equal the original ones divided by d[initial].
absl::StatusOr<Wfa> WeightPush(const Wfa& a, double* log_total = nullptr);

// Weight of the path labeled `x` times its final weight, or 0.
double Evaluate(const Wfa& a, const std::vector<Label>& x);

// Number of accepting paths of positive weight.
absl::StatusOr<uint64_t> CountAcceptingPaths(const Wfa& a);
absl::StatusOr<double> LogCountAcceptingPaths(const Wfa& a);

// All accepting paths of positive weight in lexicographic order.
absl::StatusOr<std::vector<WeightedString>> EnumerateSupport(const Wfa& a,
                                                             int64_t limit);

// ---------------------------------------------------------------------------
// Diagnostics.

struct Diagnostic {
  enum class Severity { kWarning, kError };
  Severity severity;
  std::string code;
  std::string message;
};

struct Diagnostics {
  std::vector<Diagnostic> items;

  bool ok() const;
  bool Has(const std::string& code) const;
  std::string ToString() const;
};

// Determinism, initial state, weight sign and reachability checks.
Diagnostics Validate(const Wfa& a);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_WFA_OPS_H_
