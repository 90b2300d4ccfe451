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

#include <cmath>
#include <deque>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

bool InUnitInterval(double w) { return w >= 0.0 && w <= 1.0; }

}  // namespace

absl::StatusOr<Wfa> BuildKShift(int num_experts, int k,
                                const KShiftOptions& options) {
  if (num_experts < 1) {
    return absl::InvalidArgumentError("k-shift needs at least one expert");
  }
  if (k < 0) return absl::InvalidArgumentError("k-shift needs k >= 0");
  if (num_experts < 2 && k >= 1) {
    return absl::InvalidArgumentError(
        "k-shift with k >= 1 needs at least two experts");
  }
  Wfa a(SymbolTable::Alphabetic(num_experts));
  const StateId start = a.AddState();
  a.SetInitial(start);
  a.SetStateName(start, "start");
  // State of (level j, expert e) is 1 + j * N + e.
  a.AddStates((k + 1) * num_experts);
  auto state = [num_experts](int level, int expert) {
    return static_cast<StateId>(1 + level * num_experts + expert);
  };
  for (int e = 0; e < num_experts; ++e) {
    a.AddArc(start, {e, 1.0, state(0, e)});
  }
  for (int j = 0; j <= k; ++j) {
    for (int e = 0; e < num_experts; ++e) {
      const StateId s = state(j, e);
      a.SetStateName(s, absl::StrCat("(", j, ",", a.symbols().Name(e), ")"));
      for (int b = 0; b < num_experts; ++b) {
        if (b == e) {
          a.AddArc(s, {b, 1.0, s});
        } else if (j < k) {
          a.AddArc(s, {b, 1.0, state(j + 1, b)});
        }
      }
      if (j == k || options.at_most) a.SetFinal(s, 1.0);
    }
  }
  return a;
}

absl::StatusOr<Wfa> BuildWeightedShift(
    const std::vector<std::vector<double>>& matrix,
    const std::vector<double>& initial) {
  const int n = static_cast<int>(matrix.size());
  if (n < 1) return absl::InvalidArgumentError("empty weight matrix");
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != n) {
      return absl::InvalidArgumentError("weight matrix must be square");
    }
    for (double w : row) {
      if (!InUnitInterval(w)) {
        return absl::InvalidArgumentError(
            absl::StrCat("transition weight outside [0,1]: ", w));
      }
    }
  }
  std::vector<double> init =
      initial.empty() ? std::vector<double>(n, 1.0) : initial;
  if (static_cast<int>(init.size()) != n) {
    return absl::InvalidArgumentError("initial weight vector has wrong size");
  }
  for (double w : init) {
    if (!InUnitInterval(w)) {
      return absl::InvalidArgumentError(
          absl::StrCat("initial weight outside [0,1]: ", w));
    }
  }
  Wfa a(SymbolTable::Alphabetic(n));
  const StateId start = a.AddState();
  a.SetInitial(start);
  a.SetStateName(start, "start");
  a.AddStates(n);
  for (int e = 0; e < n; ++e) {
    if (init[e] > 0.0) a.AddArc(start, {e, init[e], 1 + e});
  }
  for (int e = 0; e < n; ++e) {
    a.SetStateName(1 + e, a.symbols().Name(e));
    a.SetFinal(1 + e, 1.0);
    for (int b = 0; b < n; ++b) {
      if (matrix[e][b] > 0.0) a.AddArc(1 + e, {b, matrix[e][b], 1 + b});
    }
  }
  return a;
}

absl::StatusOr<Wfa> BuildHierarchy(int num_experts,
                                   const std::vector<HierarchyTier>& tiers) {
  if (tiers.empty()) return absl::InvalidArgumentError("empty hierarchy");
  if (num_experts < 1) {
    return absl::InvalidArgumentError("hierarchy needs at least one expert");
  }
  std::vector<int> tier_of(num_experts, -1);
  for (int i = 0; i < static_cast<int>(tiers.size()); ++i) {
    if (tiers[i].experts.empty()) {
      return absl::InvalidArgumentError(absl::StrCat("tier ", i, " is empty"));
    }
    if (tiers[i].budget < 0) {
      return absl::InvalidArgumentError("negative tier budget");
    }
    for (Label e : tiers[i].experts) {
      if (e < 0 || e >= num_experts) {
        return absl::InvalidArgumentError(
            absl::StrCat("expert id out of range: ", e));
      }
      if (tier_of[e] != -1) {
        return absl::InvalidArgumentError(
            absl::StrCat("expert ", e, " appears in two tiers"));
      }
      tier_of[e] = i;
    }
  }
  using Key = std::pair<Label, std::vector<int>>;
  Wfa a(SymbolTable::Alphabetic(num_experts));
  const StateId start = a.AddState();
  a.SetInitial(start);
  a.SetStateName(start, "start");
  std::map<Key, StateId> ids;
  std::deque<Key> queue;
  auto get = [&](const Key& key) {
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    const StateId s = a.AddState();
    a.SetFinal(s, 1.0);
    a.SetStateName(s, absl::StrCat("(", a.symbols().Name(key.first), ";",
                                   absl::StrJoin(key.second, ","), ")"));
    ids.emplace(key, s);
    queue.push_back(key);
    return s;
  };
  const std::vector<int> zero(tiers.size(), 0);
  for (Label e = 0; e < num_experts; ++e) {
    if (tier_of[e] == 0) a.AddArc(start, {e, 1.0, get({e, zero})});
  }
  while (!queue.empty()) {
    const Key key = queue.front();
    queue.pop_front();
    const StateId s = ids.at(key);
    for (Label b = 0; b < num_experts; ++b) {
      if (tier_of[b] < 0) continue;
      if (b == key.first) {
        a.AddArc(s, {b, 1.0, s});
        continue;
      }
      const int tier = tier_of[b];
      if (key.second[tier] >= tiers[tier].budget) continue;
      Key next{b, key.second};
      ++next.second[tier];
      a.AddArc(s, {b, 1.0, get(next)});
    }
  }
  return a;
}

absl::StatusOr<Wfa> BuildHierarchyPreset() {
  return BuildHierarchy(3, {{{0}, 0}, {{1}, 1}, {{2}, 2}});
}

absl::StatusOr<Wfa> BuildLengthAutomaton(int num_symbols, int horizon) {
  if (num_symbols < 1) {
    return absl::InvalidArgumentError("length automaton needs N >= 1");
  }
  if (horizon < 1) {
    return absl::InvalidArgumentError("length automaton needs T >= 1");
  }
  Wfa a(SymbolTable::Alphabetic(num_symbols));
  a.AddStates(horizon + 1);
  a.SetInitial(0);
  for (int t = 0; t < horizon; ++t) {
    for (Label e = 0; e < num_symbols; ++e) a.AddArc(t, {e, 1.0, t + 1});
  }
  a.SetFinal(horizon, 1.0);
  return a;
}

}  // namespace wfa_hedge
