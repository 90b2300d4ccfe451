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

// Order-n Markov models over expert symbols and their automaton form.

#ifndef WFA_HEDGE_NGRAM_H_
#define WFA_HEDGE_NGRAM_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

// Largest number of weights (contexts times symbols) a model may hold.
inline constexpr int64_t kMaxNGramEntries = int64_t{1} << 24;

// Conditional tables w[a | ctx] for every context of length < n.
//
// Contexts are indexed by length first, then as base-N numbers with the
// oldest symbol most significant: with N = 3, "" is 0, "a" is 1, "c" is 3,
// "a a" is 4. The model of a sequence uses the context
// x[max(t-n+1, 1)] ... x[t-1] at position t, so short contexts only occur at
// the start of the sequence.
class NGramModel {
 public:
  NGramModel() = default;

  // Every conditional table set to 1/N.
  static absl::StatusOr<NGramModel> Uniform(SymbolTable symbols, int order);

  int order() const { return order_; }
  const SymbolTable& symbols() const { return symbols_; }
  int num_symbols() const { return symbols_.size(); }
  int num_contexts() const { return static_cast<int>(weights_.size()); }

  int ContextLength(int ctx) const;
  std::vector<Label> Context(int ctx) const;
  // Errors if the context is longer than n - 1 or has an unknown symbol.
  absl::StatusOr<int> ContextIndex(const std::vector<Label>& ctx) const;
  // Context after emitting `label` in `ctx`.
  int NextContext(int ctx, Label label) const;
  // Space-separated symbol names; "" for the empty context.
  std::string ContextName(int ctx) const;

  double Weight(int ctx, Label label) const { return weights_[ctx][label]; }
  void SetWeight(int ctx, Label label, double w) { weights_[ctx][label] = w; }
  const std::vector<double>& Row(int ctx) const { return weights_[ctx]; }
  std::vector<double>* MutableRow(int ctx) { return &weights_[ctx]; }

  // log prod_t w[x_t | context_t]; kLogZero if some factor is zero.
  double LogProbability(const std::vector<Label>& x) const;

  // Each row non-negative and summing to 1 within `tolerance`.
  absl::Status Validate(double tolerance = 1e-12) const;

 private:
  NGramModel(SymbolTable symbols, int order, std::vector<int64_t> offsets,
             std::vector<std::vector<double>> weights)
      : symbols_(std::move(symbols)),
        order_(order),
        offsets_(std::move(offsets)),
        weights_(std::move(weights)) {}

  SymbolTable symbols_;
  int order_ = 0;
  // offsets_[k]: index of the first context of length k; offsets_[n] is the
  // total count.
  std::vector<int64_t> offsets_;
  std::vector<std::vector<double>> weights_;
};

// Deterministic stochastic automaton with one state per context (state id =
// context index), initial state for the empty context and every state final
// with weight 1. Zero weights produce no arc.
Wfa NGramToWfa(const NGramModel& m);

// Reads the weights back from an automaton produced by NGramToWfa, following
// arcs from the initial state. Contexts no path reaches get uniform rows.
absl::StatusOr<NGramModel> NGramFromWfa(const Wfa& a, int order);

// {"order": n, "symbols": [...], "contexts": {"a b": {"a": w, ...}, ...}}
std::string NGramToJson(const NGramModel& m);
absl::StatusOr<NGramModel> NGramFromJson(std::string_view json);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_NGRAM_H_
