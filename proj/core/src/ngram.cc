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

#include "wfa_hedge/ngram.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "wfa_hedge/signed_log.h"

namespace wfa_hedge {

absl::StatusOr<NGramModel> NGramModel::Uniform(SymbolTable symbols, int order) {
  const int n = symbols.size();
  if (n < 1) return absl::InvalidArgumentError("empty alphabet");
  if (order < 1) return absl::InvalidArgumentError("order must be >= 1");
  std::vector<int64_t> offsets = {0};
  int64_t block = 1;
  for (int k = 0; k < order; ++k) {
    offsets.push_back(offsets.back() + block);
    if (offsets.back() * n > kMaxNGramEntries) {
      return absl::ResourceExhaustedError(
          absl::StrCat("order ", order, " over ", n, " symbols is too large"));
    }
    block *= n;
  }
  std::vector<std::vector<double>> weights(offsets.back(),
                                           std::vector<double>(n, 1.0 / n));
  return NGramModel(std::move(symbols), order, std::move(offsets),
                    std::move(weights));
}

int NGramModel::ContextLength(int ctx) const {
  int k = 0;
  while (offsets_[k + 1] <= ctx) ++k;
  return k;
}

std::vector<Label> NGramModel::Context(int ctx) const {
  const int len = ContextLength(ctx);
  int64_t local = ctx - offsets_[len];
  std::vector<Label> out(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = static_cast<Label>(local % num_symbols());
    local /= num_symbols();
  }
  return out;
}

absl::StatusOr<int> NGramModel::ContextIndex(
    const std::vector<Label>& ctx) const {
  if (static_cast<int>(ctx.size()) >= order_) {
    return absl::InvalidArgumentError("context longer than order - 1");
  }
  int64_t local = 0;
  for (Label a : ctx) {
    if (a < 0 || a >= num_symbols()) {
      return absl::InvalidArgumentError(absl::StrCat("bad label ", a));
    }
    local = local * num_symbols() + a;
  }
  return static_cast<int>(offsets_[ctx.size()] + local);
}

int NGramModel::NextContext(int ctx, Label label) const {
  if (order_ == 1) return 0;
  const int len = ContextLength(ctx);
  const int64_t local = ctx - offsets_[len];
  const int64_t n = num_symbols();
  if (len < order_ - 1) {
    return static_cast<int>(offsets_[len + 1] + local * n + label);
  }
  // Full context: drop the oldest symbol.
  const int64_t high = offsets_[len + 1] - offsets_[len];
  return static_cast<int>(offsets_[len] + (local * n) % high + label);
}

std::string NGramModel::ContextName(int ctx) const {
  std::vector<std::string> parts;
  for (Label a : Context(ctx)) parts.push_back(symbols_.Name(a));
  return absl::StrJoin(parts, " ");
}

double NGramModel::LogProbability(const std::vector<Label>& x) const {
  double total = 0.0;
  int ctx = 0;
  for (Label a : x) {
    const double w = weights_[ctx][a];
    if (w <= 0.0) return kLogZero;
    total += std::log(w);
    ctx = NextContext(ctx, a);
  }
  return total;
}

absl::Status NGramModel::Validate(double tolerance) const {
  for (int ctx = 0; ctx < num_contexts(); ++ctx) {
    double sum = 0.0;
    for (double w : weights_[ctx]) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        return absl::InvalidArgumentError(
            absl::StrCat("invalid weight in context '", ContextName(ctx), "'"));
      }
      sum += w;
    }
    if (std::fabs(sum - 1.0) > tolerance) {
      return absl::InvalidArgumentError(absl::StrCat(
          "context '", ContextName(ctx), "' sums to ", sum, ", not 1"));
    }
  }
  return absl::OkStatus();
}

Wfa NGramToWfa(const NGramModel& m) {
  Wfa a(m.symbols());
  a.AddStates(m.num_contexts());
  a.SetInitial(0);
  for (int ctx = 0; ctx < m.num_contexts(); ++ctx) {
    a.SetFinal(ctx, 1.0);
    a.SetStateName(ctx, ctx == 0 ? "<eps>" : m.ContextName(ctx));
    for (Label l = 0; l < m.num_symbols(); ++l) {
      const double w = m.Weight(ctx, l);
      if (w > 0.0) a.AddArc(ctx, Arc{l, w, m.NextContext(ctx, l)});
    }
  }
  return a;
}

absl::StatusOr<NGramModel> NGramFromWfa(const Wfa& a, int order) {
  auto m = NGramModel::Uniform(a.symbols(), order);
  if (!m.ok()) return m.status();
  if (a.initial() == kNoState) return absl::InvalidArgumentError("no initial");
  std::vector<StateId> state_of(m->num_contexts(), kNoState);
  state_of[0] = a.initial();
  // Breadth-first over contexts; contexts no path reaches keep their uniform
  // row.
  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const int ctx = queue.front();
    queue.pop_front();
    const StateId s = state_of[ctx];
    std::vector<double>& row = *m->MutableRow(ctx);
    std::fill(row.begin(), row.end(), 0.0);
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.label < 0) return absl::InvalidArgumentError("phi in n-gram");
      row[arc.label] = arc.weight;
      const int next = m->NextContext(ctx, arc.label);
      if (state_of[next] == kNoState) {
        state_of[next] = arc.dest;
        queue.push_back(next);
      }
    }
  }
  absl::Status valid = m->Validate();
  if (!valid.ok()) return valid;
  return m;
}

std::string NGramToJson(const NGramModel& m) {
  nlohmann::ordered_json j;
  j["order"] = m.order();
  j["symbols"] = m.symbols().names();
  nlohmann::ordered_json contexts = nlohmann::ordered_json::object();
  for (int ctx = 0; ctx < m.num_contexts(); ++ctx) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (Label l = 0; l < m.num_symbols(); ++l) {
      row[m.symbols().Name(l)] = m.Weight(ctx, l);
    }
    contexts[m.ContextName(ctx)] = std::move(row);
  }
  j["contexts"] = std::move(contexts);
  return j.dump(2);
}

absl::StatusOr<NGramModel> NGramFromJson(std::string_view json) {
  nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("n-gram model is not a JSON object");
  }
  if (!j.contains("order") || !j["order"].is_number_integer() ||
      !j.contains("symbols") || !j["symbols"].is_array() ||
      !j.contains("contexts") || !j["contexts"].is_object()) {
    return absl::InvalidArgumentError(
        "n-gram model needs 'order', 'symbols' and 'contexts'");
  }
  std::vector<std::string> names;
  for (const auto& s : j["symbols"]) {
    if (!s.is_string()) return absl::InvalidArgumentError("bad symbol");
    names.push_back(s.get<std::string>());
  }
  auto symbols = SymbolTable::FromNames(names);
  if (!symbols.ok()) return symbols.status();
  auto m = NGramModel::Uniform(*symbols, j["order"].get<int>());
  if (!m.ok()) return m.status();
  std::vector<bool> seen(m->num_contexts(), false);
  for (const auto& [key, row] : j["contexts"].items()) {
    std::vector<Label> ctx;
    if (!key.empty()) {
      for (absl::string_view part : absl::StrSplit(key, ' ')) {
        auto id = symbols->Find(std::string(part));
        if (!id.has_value()) {
          return absl::InvalidArgumentError(
              absl::StrCat("unknown symbol in context '", key, "'"));
        }
        ctx.push_back(*id);
      }
    }
    auto index = m->ContextIndex(ctx);
    if (!index.ok()) return index.status();
    if (!row.is_object()) return absl::InvalidArgumentError("bad row");
    std::vector<double>& weights = *m->MutableRow(*index);
    std::fill(weights.begin(), weights.end(), 0.0);
    for (const auto& [sym, w] : row.items()) {
      auto id = symbols->Find(sym);
      if (!id.has_value() || !w.is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("bad entry '", sym, "' in context '", key, "'"));
      }
      weights[*id] = w.get<double>();
    }
    seen[*index] = true;
  }
  for (int ctx = 0; ctx < m->num_contexts(); ++ctx) {
    if (!seen[ctx]) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing context '", m->ContextName(ctx), "'"));
    }
  }
  absl::Status valid = m->Validate();
  if (!valid.ok()) return valid;
  return m;
}

}  // namespace wfa_hedge
