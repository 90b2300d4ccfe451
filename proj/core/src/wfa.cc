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

#include "wfa_hedge/wfa.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace wfa_hedge {

SymbolTable SymbolTable::Alphabetic(int size) {
  SymbolTable table;
  for (int i = 0; i < size; ++i) {
    if (i < 26) {
      table.AddSymbol(std::string(1, static_cast<char>('a' + i)));
    } else {
      table.AddSymbol(absl::StrCat("e", i));
    }
  }
  return table;
}

absl::StatusOr<SymbolTable> SymbolTable::FromNames(
    const std::vector<std::string>& names) {
  SymbolTable table;
  for (const std::string& name : names) {
    if (name.empty() || name == kPhiToken) {
      return absl::InvalidArgumentError(
          absl::StrCat("Invalid symbol name: '", name, "'"));
    }
    if (table.Find(name).has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("Duplicate symbol: ", name));
    }
    table.AddSymbol(name);
  }
  return table;
}

Label SymbolTable::AddSymbol(const std::string& name) {
  if (auto found = Find(name)) return *found;
  names_.push_back(name);
  return static_cast<Label>(names_.size() - 1);
}

std::optional<Label> SymbolTable::Find(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<Label>(i);
  }
  return std::nullopt;
}

StateId Wfa::AddState() {
  arcs_.emplace_back();
  final_.push_back(0.0);
  if (!names_.empty()) names_.emplace_back();
  return static_cast<StateId>(arcs_.size() - 1);
}

void Wfa::AddStates(int count) {
  for (int i = 0; i < count; ++i) AddState();
}

int Wfa::NumArcs() const {
  int total = 0;
  for (const auto& arcs : arcs_) total += static_cast<int>(arcs.size());
  return total;
}

const Arc* Wfa::FindArc(StateId s, Label label) const {
  for (const Arc& arc : arcs_[s]) {
    if (arc.label == label) return &arc;
  }
  return nullptr;
}

bool Wfa::HasPhi() const {
  for (const auto& arcs : arcs_) {
    for (const Arc& arc : arcs) {
      if (arc.label == kPhiLabel) return true;
    }
  }
  return false;
}

void Wfa::SortArcs() {
  for (auto& arcs : arcs_) {
    std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
      return a.label < b.label;
    });
  }
}

void Wfa::SetStateName(StateId s, std::string name) {
  if (names_.size() < arcs_.size()) names_.resize(arcs_.size());
  names_[s] = std::move(name);
}

std::string Wfa::StateName(StateId s) const {
  if (s < static_cast<StateId>(names_.size()) && !names_[s].empty()) {
    return names_[s];
  }
  return absl::StrCat(s);
}

}  // namespace wfa_hedge
