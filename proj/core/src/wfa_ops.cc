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

#include "wfa_hedge/wfa_ops.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/signed_log.h"

namespace wfa_hedge {
namespace {

absl::Status RequirePhiFree(const Wfa& a, const char* op) {
  if (a.HasPhi()) {
    return absl::InvalidArgumentError(
        absl::StrCat(op, ": failure transitions need the phi-aware variant"));
  }
  return absl::OkStatus();
}

std::vector<bool> Accessible(const Wfa& a) {
  std::vector<bool> seen(a.NumStates(), false);
  if (a.initial() == kNoState) return seen;
  std::vector<StateId> stack = {a.initial()};
  seen[a.initial()] = true;
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const Arc& arc : a.Arcs(s)) {
      if (!seen[arc.dest]) {
        seen[arc.dest] = true;
        stack.push_back(arc.dest);
      }
    }
  }
  return seen;
}

std::vector<bool> CoAccessible(const Wfa& a) {
  std::vector<std::vector<StateId>> reverse(a.NumStates());
  std::vector<StateId> stack;
  std::vector<bool> seen(a.NumStates(), false);
  for (StateId s = 0; s < a.NumStates(); ++s) {
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight > 0.0) reverse[arc.dest].push_back(s);
    }
    if (a.IsFinal(s)) {
      seen[s] = true;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : reverse[s]) {
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  return seen;
}

}  // namespace

bool IsAcyclic(const Wfa& a) { return TopologicalOrder(a).ok(); }

absl::StatusOr<std::vector<StateId>> TopologicalOrder(const Wfa& a) {
  const int n = a.NumStates();
  std::vector<int> indegree(n, 0);
  for (StateId s = 0; s < n; ++s) {
    for (const Arc& arc : a.Arcs(s)) ++indegree[arc.dest];
  }
  std::priority_queue<StateId, std::vector<StateId>, std::greater<StateId>>
      ready;
  for (StateId s = 0; s < n; ++s) {
    if (indegree[s] == 0) ready.push(s);
  }
  std::vector<StateId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const StateId s = ready.top();
    ready.pop();
    order.push_back(s);
    for (const Arc& arc : a.Arcs(s)) {
      if (--indegree[arc.dest] == 0) ready.push(arc.dest);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    return absl::FailedPreconditionError("automaton is cyclic");
  }
  return order;
}

Wfa Connect(const Wfa& a) {
  const std::vector<bool> acc = Accessible(a);
  const std::vector<bool> coacc = CoAccessible(a);
  std::vector<StateId> remap(a.NumStates(), kNoState);
  Wfa out(a.symbols());
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (acc[s] && coacc[s]) {
      remap[s] = out.AddState();
      out.SetStateName(remap[s], a.StateName(s));
    }
  }
  if (a.initial() == kNoState || remap[a.initial()] == kNoState) {
    // Empty language: a single non-final initial state.
    Wfa empty(a.symbols());
    empty.SetInitial(empty.AddState());
    return empty;
  }
  out.SetInitial(remap[a.initial()]);
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (remap[s] == kNoState) continue;
    out.SetFinal(remap[s], a.Final(s));
    for (const Arc& arc : a.Arcs(s)) {
      if (remap[arc.dest] == kNoState) continue;
      out.AddArc(remap[s], {arc.label, arc.weight, remap[arc.dest]});
    }
  }
  return out;
}

absl::StatusOr<Wfa> Intersect(const Wfa& a1, const Wfa& a2) {
  if (a1.symbols() != a2.symbols()) {
    return absl::InvalidArgumentError("intersect: alphabet mismatch");
  }
  if (auto st = RequirePhiFree(a1, "intersect"); !st.ok()) return st;
  if (auto st = RequirePhiFree(a2, "intersect"); !st.ok()) return st;
  if (a1.initial() == kNoState || a2.initial() == kNoState) {
    return absl::InvalidArgumentError("intersect: missing initial state");
  }
  Wfa out(a1.symbols());
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::deque<std::pair<StateId, StateId>> queue;
  auto get = [&](StateId q1, StateId q2) {
    auto [it, inserted] = ids.try_emplace({q1, q2}, kNoState);
    if (inserted) {
      it->second = out.AddState();
      out.SetStateName(it->second, absl::StrCat("(", q1, ",", q2, ")"));
      out.SetFinal(it->second, a1.Final(q1) * a2.Final(q2));
      queue.emplace_back(q1, q2);
    }
    return it->second;
  };
  out.SetInitial(get(a1.initial(), a2.initial()));
  while (!queue.empty()) {
    const auto [q1, q2] = queue.front();
    queue.pop_front();
    const StateId s = ids.at({q1, q2});
    for (const Arc& e1 : a1.Arcs(q1)) {
      const Arc* e2 = a2.FindArc(q2, e1.label);
      if (e2 == nullptr) continue;
      const double w = e1.weight * e2->weight;
      if (w <= 0.0) continue;
      out.AddArc(s, {e1.label, w, get(e1.dest, e2->dest)});
    }
  }
  Wfa trimmed = Connect(out);
  trimmed.SortArcs();
  return trimmed;
}

absl::StatusOr<Wfa> PowerWeights(const Wfa& a, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("power weights: eta must be positive, got ", eta));
  }
  Wfa out = a;
  for (StateId s = 0; s < out.NumStates(); ++s) {
    for (Arc& arc : *out.MutableArcs(s)) {
      arc.weight = arc.weight > 0.0 ? std::pow(arc.weight, eta) : 0.0;
    }
    const double f = a.Final(s);
    out.SetFinal(s, f > 0.0 ? std::pow(f, eta) : 0.0);
  }
  return out;
}

absl::StatusOr<PathWeightTable> BackwardDistances(const Wfa& a) {
  if (auto st = RequirePhiFree(a, "backward distances"); !st.ok()) return st;
  auto order = TopologicalOrder(a);
  if (!order.ok()) return order.status();
  PathWeightTable beta(a.NumStates(), 0.0);
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    double sum = a.Final(s);
    for (const Arc& arc : a.Arcs(s)) sum += arc.weight * beta[arc.dest];
    beta[s] = sum;
  }
  return beta;
}

absl::StatusOr<std::vector<double>> LogBackwardDistances(const Wfa& a) {
  if (auto st = RequirePhiFree(a, "backward distances"); !st.ok()) return st;
  auto order = TopologicalOrder(a);
  if (!order.ok()) return order.status();
  std::vector<double> beta(a.NumStates(), kLogZero);
  std::vector<double> terms;
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    terms.clear();
    if (a.Final(s) > 0.0) terms.push_back(std::log(a.Final(s)));
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight > 0.0 && beta[arc.dest] != kLogZero) {
        terms.push_back(std::log(arc.weight) + beta[arc.dest]);
      }
    }
    beta[s] = LogSumExp(terms);
  }
  return beta;
}

absl::StatusOr<Wfa> WeightPush(const Wfa& a, double* log_total) {
  auto beta = LogBackwardDistances(a);
  if (!beta.ok()) return beta.status();
  const std::vector<bool> acc = Accessible(a);
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (!acc[s] || (*beta)[s] != kLogZero) continue;
    if (s == a.initial() || a.NumArcs(s) > 0) {
      return absl::FailedPreconditionError(
          absl::StrCat("weight push: state ", a.StateName(s),
                       " is used but has zero backward weight"));
    }
  }
  Wfa out = a;
  for (StateId s = 0; s < out.NumStates(); ++s) {
    const double ds = (*beta)[s];
    if (ds == kLogZero) {
      // Dead state: every arc into it already got weight zero.
      for (Arc& arc : *out.MutableArcs(s)) arc.weight = 0.0;
      out.SetFinal(s, 0.0);
      continue;
    }
    for (Arc& arc : *out.MutableArcs(s)) {
      const double dd = (*beta)[arc.dest];
      arc.weight = (arc.weight > 0.0 && dd != kLogZero)
                       ? std::exp(std::log(arc.weight) + dd - ds)
                       : 0.0;
    }
    const double f = a.Final(s);
    out.SetFinal(s, f > 0.0 ? std::exp(std::log(f) - ds) : 0.0);
  }
  if (log_total != nullptr) *log_total = (*beta)[a.initial()];
  return out;
}

double Evaluate(const Wfa& a, const std::vector<Label>& x) {
  if (a.initial() == kNoState) return 0.0;
  StateId s = a.initial();
  double w = 1.0;
  for (Label label : x) {
    const Arc* arc = label >= 0 ? a.FindArc(s, label) : nullptr;
    if (arc == nullptr) return 0.0;
    w *= arc->weight;
    s = arc->dest;
  }
  return w * a.Final(s);
}

absl::StatusOr<uint64_t> CountAcceptingPaths(const Wfa& a) {
  auto order = TopologicalOrder(a);
  if (!order.ok()) return order.status();
  if (a.initial() == kNoState) return 0;
  constexpr uint64_t kMax = std::numeric_limits<uint64_t>::max();
  std::vector<uint64_t> count(a.NumStates(), 0);
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    uint64_t c = a.IsFinal(s) ? 1 : 0;
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight <= 0.0 || arc.label == kPhiLabel) continue;
      if (c > kMax - count[arc.dest]) {
        return absl::OutOfRangeError("path count overflows 64 bits");
      }
      c += count[arc.dest];
    }
    count[s] = c;
  }
  return count[a.initial()];
}

absl::StatusOr<double> LogCountAcceptingPaths(const Wfa& a) {
  auto order = TopologicalOrder(a);
  if (!order.ok()) return order.status();
  if (a.initial() == kNoState) return kLogZero;
  std::vector<double> count(a.NumStates(), kLogZero);
  std::vector<double> terms;
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    terms.clear();
    if (a.IsFinal(s)) terms.push_back(0.0);
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight <= 0.0 || arc.label == kPhiLabel) continue;
      terms.push_back(count[arc.dest]);
    }
    count[s] = LogSumExp(terms);
  }
  return count[a.initial()];
}

absl::StatusOr<std::vector<WeightedString>> EnumerateSupport(const Wfa& a,
                                                             int64_t limit) {
  if (auto st = RequirePhiFree(a, "enumerate"); !st.ok()) return st;
  auto log_count = LogCountAcceptingPaths(a);
  if (!log_count.ok()) return log_count.status();
  if (*log_count > std::log(static_cast<double>(limit)) + 1e-9) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "support size exp(", *log_count, ") exceeds limit ", limit));
  }
  std::vector<WeightedString> out;
  if (a.initial() == kNoState) return out;
  std::vector<Label> prefix;
  // Iterative DFS over (state, weight, next arc index) frames.
  struct Frame {
    StateId state;
    double weight;
    std::vector<const Arc*> arcs;
    size_t next;
  };
  auto make_frame = [&a](StateId s, double w) {
    Frame f{s, w, {}, 0};
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight > 0.0) f.arcs.push_back(&arc);
    }
    std::sort(f.arcs.begin(), f.arcs.end(),
              [](const Arc* x, const Arc* y) { return x->label < y->label; });
    return f;
  };
  std::vector<Frame> stack;
  stack.push_back(make_frame(a.initial(), 1.0));
  if (a.IsFinal(a.initial())) out.push_back({{}, a.Final(a.initial())});
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.arcs.size()) {
      stack.pop_back();
      if (!prefix.empty()) prefix.pop_back();
      continue;
    }
    const Arc* arc = top.arcs[top.next++];
    const double w = top.weight * arc->weight;
    prefix.push_back(arc->label);
    if (a.IsFinal(arc->dest)) out.push_back({prefix, w * a.Final(arc->dest)});
    stack.push_back(make_frame(arc->dest, w));
    if (static_cast<int64_t>(out.size()) > limit) {
      return absl::ResourceExhaustedError("support exceeds limit");
    }
  }
  return out;
}

bool Diagnostics::ok() const {
  for (const Diagnostic& d : items) {
    if (d.severity == Diagnostic::Severity::kError) return false;
  }
  return true;
}

bool Diagnostics::Has(const std::string& code) const {
  for (const Diagnostic& d : items) {
    if (d.code == code) return true;
  }
  return false;
}

std::string Diagnostics::ToString() const {
  std::string out;
  for (const Diagnostic& d : items) {
    absl::StrAppend(
        &out, d.severity == Diagnostic::Severity::kError ? "error" : "warning",
        " [", d.code, "] ", d.message, "\n");
  }
  return out;
}

Diagnostics Validate(const Wfa& a) {
  Diagnostics diag;
  auto error = [&diag](std::string code, std::string message) {
    diag.items.push_back(
        {Diagnostic::Severity::kError, std::move(code), std::move(message)});
  };
  auto warning = [&diag](std::string code, std::string message) {
    diag.items.push_back(
        {Diagnostic::Severity::kWarning, std::move(code), std::move(message)});
  };
  if (a.initial() == kNoState || a.initial() >= a.NumStates()) {
    error("initial", "missing or invalid initial state");
    return diag;
  }
  for (StateId s = 0; s < a.NumStates(); ++s) {
    std::set<Label> labels;
    int phi_count = 0;
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.dest < 0 || arc.dest >= a.NumStates()) {
        error("dest", absl::StrCat("state ", s, " has an arc to ", arc.dest));
      }
      if (arc.label == kPhiLabel) {
        ++phi_count;
      } else if (arc.label < 0 || arc.label >= a.alphabet_size()) {
        error("label",
              absl::StrCat("state ", s, " has unknown label ", arc.label));
      } else if (!labels.insert(arc.label).second) {
        error("determinism", absl::StrCat("state ", s, " has two arcs labeled ",
                                          a.symbols().Name(arc.label)));
      }
      if (!(arc.weight >= 0.0) || !std::isfinite(arc.weight)) {
        error("weight",
              absl::StrCat("state ", s, " has arc weight ", arc.weight));
      }
    }
    if (phi_count > 1) {
      error("phi", absl::StrCat("state ", s, " has ", phi_count,
                                " failure transitions"));
    }
    if (!(a.Final(s) >= 0.0) || !std::isfinite(a.Final(s))) {
      error("weight",
            absl::StrCat("state ", s, " has final weight ", a.Final(s)));
    }
  }
  if (!diag.ok()) return diag;
  const std::vector<bool> acc = Accessible(a);
  const std::vector<bool> coacc = CoAccessible(a);
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (!acc[s]) {
      warning("unreachable", absl::StrCat("state ", s, " is unreachable"));
    } else if (!coacc[s]) {
      warning("dead", absl::StrCat("state ", s, " cannot reach a final state"));
    }
  }
  return diag;
}

}  // namespace wfa_hedge
