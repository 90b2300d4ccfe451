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

// Weighted finite automata over the probability semiring.

#ifndef WFA_HEDGE_WFA_H_
#define WFA_HEDGE_WFA_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace wfa_hedge {

using StateId = int32_t;
using Label = int32_t;

inline constexpr StateId kNoState = -1;
// Reserved label of failure transitions. Never a valid symbol id.
inline constexpr Label kPhiLabel = -2;
inline constexpr char kPhiToken[] = "<phi>";

struct Arc {
  Label label;
  double weight;
  StateId dest;
};

// Dense symbol ids 0..N-1 with display names.
class SymbolTable {
 public:
  SymbolTable() = default;

  // Symbols "a", "b", ..., "z", then "e26", "e27", ...
  static SymbolTable Alphabetic(int size);
  static absl::StatusOr<SymbolTable> FromNames(
      const std::vector<std::string>& names);

  // Returns the id of `name`, adding it if absent.
  Label AddSymbol(const std::string& name);
  std::optional<Label> Find(const std::string& name) const;
  const std::string& Name(Label label) const { return names_[label]; }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SymbolTable& other) const {
    return names_ == other.names_;
  }
  bool operator!=(const SymbolTable& other) const { return !(*this == other); }

 private:
  std::vector<std::string> names_;
};

// Mutable during construction; treated as immutable once built. Arcs may
// carry kPhiLabel, in which case the automaton is only meaningful through the
// phi-aware operations in phi_wfa.h.
class Wfa {
 public:
  Wfa() = default;
  explicit Wfa(SymbolTable symbols) : symbols_(std::move(symbols)) {}

  StateId AddState();
  void AddStates(int count);
  int NumStates() const { return static_cast<int>(arcs_.size()); }

  void SetInitial(StateId s) { initial_ = s; }
  StateId initial() const { return initial_; }

  // A weight of 0 makes the state non-final.
  void SetFinal(StateId s, double weight) { final_[s] = weight; }
  double Final(StateId s) const { return final_[s]; }
  bool IsFinal(StateId s) const { return final_[s] > 0.0; }

  void AddArc(StateId src, const Arc& arc) { arcs_[src].push_back(arc); }
  const std::vector<Arc>& Arcs(StateId s) const { return arcs_[s]; }
  std::vector<Arc>* MutableArcs(StateId s) { return &arcs_[s]; }
  int NumArcs() const;
  int NumArcs(StateId s) const { return static_cast<int>(arcs_[s].size()); }

  // First arc leaving `s` with `label`, or nullptr.
  const Arc* FindArc(StateId s, Label label) const;
  // The failure arc leaving `s`, or nullptr.
  const Arc* PhiArc(StateId s) const { return FindArc(s, kPhiLabel); }
  bool HasPhi() const;

  // Sorts arcs of every state by label (phi first).
  void SortArcs();

  const SymbolTable& symbols() const { return symbols_; }
  int alphabet_size() const { return symbols_.size(); }

  // Optional provenance for debugging, e.g. "(3,7)" for intersections.
  void SetStateName(StateId s, std::string name);
  std::string StateName(StateId s) const;

 private:
  SymbolTable symbols_;
  StateId initial_ = kNoState;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> final_;
  std::vector<std::string> names_;
};

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_WFA_H_
