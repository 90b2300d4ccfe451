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

#include "wfa_hedge/wfa_io.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace wfa_hedge {
namespace {

std::string FormatWeight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

std::vector<std::string> Fields(const std::string& line) {
  return absl::StrSplit(line, absl::ByAnyChar(" \t"), absl::SkipWhitespace());
}

absl::Status LineError(int line_no, const std::string& what) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line_no, ": ", what));
}

}  // namespace

void WriteSymbols(const SymbolTable& symbols, std::ostream& out) {
  for (int i = 0; i < symbols.size(); ++i) {
    out << symbols.Name(i) << "\t" << i << "\n";
  }
}

absl::StatusOr<SymbolTable> ReadSymbols(std::istream& in) {
  std::map<int, std::string> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> f = Fields(line);
    if (f.empty() || f[0][0] == '#') continue;
    int id;
    if (f.size() != 2 || !absl::SimpleAtoi(f[1], &id) || id < 0) {
      return LineError(line_no, "expected 'symbol id'");
    }
    if (!by_id.emplace(id, f[0]).second) {
      return LineError(line_no, absl::StrCat("duplicate id ", id));
    }
  }
  std::vector<std::string> names;
  for (const auto& [id, name] : by_id) {
    if (id != static_cast<int>(names.size())) {
      return absl::InvalidArgumentError("symbol ids must be dense from 0");
    }
    names.push_back(name);
  }
  return SymbolTable::FromNames(names);
}

void WriteText(const Wfa& a, std::ostream& out) {
  if (a.initial() == kNoState) return;
  // Initial state first so that its first transition fixes it on reading.
  std::vector<StateId> order = {a.initial()};
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (s != a.initial()) order.push_back(s);
  }
  // An initial state without arcs is fixed by a leading final-weight line.
  if (a.NumArcs(a.initial()) == 0) {
    out << a.initial() << "\t" << FormatWeight(a.Final(a.initial())) << "\n";
  }
  for (StateId s : order) {
    for (const Arc& arc : a.Arcs(s)) {
      const std::string label =
          arc.label == kPhiLabel ? kPhiToken : a.symbols().Name(arc.label);
      out << s << "\t" << arc.dest << "\t" << label << "\t"
          << FormatWeight(arc.weight) << "\n";
    }
  }
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (a.IsFinal(s)) out << s << "\t" << FormatWeight(a.Final(s)) << "\n";
  }
}

absl::StatusOr<Wfa> ReadText(std::istream& in, const SymbolTable& symbols) {
  struct Transition {
    StateId src;
    Arc arc;
  };
  std::vector<Transition> transitions;
  std::vector<std::pair<StateId, double>> finals;
  StateId max_state = -1;
  StateId initial = kNoState;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> f = Fields(line);
    if (f.empty() || f[0][0] == '#') continue;
    StateId src;
    if (!absl::SimpleAtoi(f[0], &src) || src < 0) {
      return LineError(line_no, "bad state id");
    }
    max_state = std::max(max_state, src);
    if (f.size() <= 2) {
      double w = 1.0;
      if (f.size() == 2 && !absl::SimpleAtod(f[1], &w)) {
        return LineError(line_no, "bad final weight");
      }
      if (!(w >= 0.0)) return LineError(line_no, "negative final weight");
      if (initial == kNoState && transitions.empty() && finals.empty()) {
        initial = src;
      }
      finals.emplace_back(src, w);
      continue;
    }
    if (f.size() > 4) return LineError(line_no, "too many fields");
    StateId dst;
    if (!absl::SimpleAtoi(f[1], &dst) || dst < 0) {
      return LineError(line_no, "bad destination state");
    }
    max_state = std::max(max_state, dst);
    Label label;
    if (f[2] == kPhiToken) {
      label = kPhiLabel;
    } else if (auto found = symbols.Find(f[2])) {
      label = *found;
    } else {
      return LineError(line_no, absl::StrCat("unknown symbol '", f[2], "'"));
    }
    double w = 1.0;
    if (f.size() == 4 && !absl::SimpleAtod(f[3], &w)) {
      return LineError(line_no, "bad weight");
    }
    if (!(w >= 0.0)) return LineError(line_no, "negative weight");
    if (initial == kNoState) initial = src;
    transitions.push_back({src, {label, w, dst}});
  }
  if (max_state < 0) return absl::InvalidArgumentError("empty automaton");
  Wfa a(symbols);
  a.AddStates(max_state + 1);
  a.SetInitial(initial);
  for (const Transition& t : transitions) a.AddArc(t.src, t.arc);
  for (const auto& [s, w] : finals) a.SetFinal(s, w);
  return a;
}

std::string ToText(const Wfa& a) {
  std::ostringstream out;
  WriteText(a, out);
  return out.str();
}

std::string SymbolsToText(const SymbolTable& symbols) {
  std::ostringstream out;
  WriteSymbols(symbols, out);
  return out.str();
}

absl::Status WriteFiles(const Wfa& a, const std::string& path,
                        const std::string& symbols_path) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  WriteText(a, out);
  std::ofstream sym(symbols_path);
  if (!sym) {
    return absl::UnavailableError(absl::StrCat("cannot write ", symbols_path));
  }
  WriteSymbols(a.symbols(), sym);
  return absl::OkStatus();
}

absl::StatusOr<Wfa> ReadFiles(const std::string& path,
                              const std::string& symbols_path) {
  std::ifstream sym(symbols_path);
  if (!sym) {
    return absl::NotFoundError(absl::StrCat("cannot read ", symbols_path));
  }
  auto symbols = ReadSymbols(sym);
  if (!symbols.ok()) return symbols.status();
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  return ReadText(in, *symbols);
}

}  // namespace wfa_hedge
