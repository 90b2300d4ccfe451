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

// AT&T-style text format.
//
// Transition lines are "src dst label [weight]" (weight defaults to 1) and
// final lines are "state [final_weight]". The source of the first transition
// is the initial state. Labels are symbol names from a sidecar table with one
// "symbol id" pair per line; the token <phi> denotes a failure transition.

#ifndef WFA_HEDGE_WFA_IO_H_
#define WFA_HEDGE_WFA_IO_H_

#include <istream>
#include <ostream>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

void WriteSymbols(const SymbolTable& symbols, std::ostream& out);
absl::StatusOr<SymbolTable> ReadSymbols(std::istream& in);

// Weights are written with 17 significant digits.
void WriteText(const Wfa& a, std::ostream& out);
absl::StatusOr<Wfa> ReadText(std::istream& in, const SymbolTable& symbols);

std::string ToText(const Wfa& a);
std::string SymbolsToText(const SymbolTable& symbols);

// File variants. WriteFiles writes `path` and `symbols_path`.
absl::Status WriteFiles(const Wfa& a, const std::string& path,
                        const std::string& symbols_path);
absl::StatusOr<Wfa> ReadFiles(const std::string& path,
                              const std::string& symbols_path);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_WFA_IO_H_
