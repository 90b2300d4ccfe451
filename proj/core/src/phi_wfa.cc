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

#include "wfa_hedge/phi_wfa.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/signed_log.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

using LabelWeight = std::pair<Label, double>;

// Non-phi arcs from p into q as (label, weight) pairs.
std::set<LabelWeight> ItemsInto(const Wfa& a, StateId p, StateId q) {
  std::set<LabelWeight> items;
  for (const Arc& arc : a.Arcs(p)) {
    if (arc.label != kPhiLabel && arc.dest == q) {
      items.emplace(arc.label, arc.weight);
    }
  }
  return items;
}

std::vector<StateId> Parents(const Wfa& a, StateId q,
                             const std::function<bool(StateId)>& eligible) {
  std::vector<StateId> parents;
  for (StateId p = 0; p < a.NumStates(); ++p) {
    if (!eligible(p)) continue;
    for (const Arc& arc : a.Arcs(p)) {
      if (arc.label != kPhiLabel && arc.dest == q) {
        parents.push_back(p);
        break;
      }
    }
  }
  return parents;
}

int ArcBenefit(int num_shared, int num_parents) {
  return num_shared * num_parents - (num_shared + num_parents);
}

SourceSubset SourceSubsetImpl(const Wfa& a, StateId q,
                              const std::function<bool(StateId)>& eligible) {
  const std::vector<StateId> parents = Parents(a, q, eligible);
  std::map<StateId, std::set<LabelWeight>> items;
  for (StateId p : parents) items[p] = ItemsInto(a, p, q);

  std::vector<StateId> chosen;
  std::set<LabelWeight> current;
  SourceSubset best;
  int best_benefit = 0;
  bool have_best = false;
  for (size_t k = 1; k <= parents.size(); ++k) {
    StateId next = kNoState;
    std::set<LabelWeight> next_shared;
    for (StateId p : parents) {
      if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
      std::set<LabelWeight> shared;
      if (chosen.empty()) {
        shared = items[p];
      } else {
        std::set_intersection(current.begin(), current.end(), items[p].begin(),
                              items[p].end(),
                              std::inserter(shared, shared.begin()));
      }
      // Parents are scanned by ascending id, so strict > keeps the lowest.
      if (next == kNoState || shared.size() > next_shared.size()) {
        next = p;
        next_shared = std::move(shared);
      }
    }
    chosen.push_back(next);
    current = std::move(next_shared);
    const int benefit = ArcBenefit(static_cast<int>(current.size()),
                                   static_cast<int>(chosen.size()));
    if (!have_best || benefit > best_benefit) {
      have_best = true;
      best_benefit = benefit;
      best.shared.assign(current.begin(), current.end());
      best.parents = chosen;
    }
  }
  return best;
}

struct Triple {
  Label label;
  double weight;
  StateId dest;
  bool operator<(const Triple& o) const {
    return std::tie(label, weight, dest) < std::tie(o.label, o.weight, o.dest);
  }
};

struct ShadowGroup {
  std::vector<StateId> members;
  std::vector<Triple> shared;
  int removed = 0;

  int Benefit() const {
    return removed - static_cast<int>(shared.size()) -
           static_cast<int>(members.size());
  }
};

// For each label local to every member, shares the most frequent
// (label, weight, dest) arc when at least two members carry it.
ShadowGroup EvaluateShadowGroup(const Wfa& a,
                                const std::vector<StateId>& members) {
  ShadowGroup group;
  group.members = members;
  std::map<Label, std::map<std::pair<StateId, double>, int>> counts;
  std::map<Label, int> present;
  for (StateId p : members) {
    for (const Arc& arc : a.Arcs(p)) {
      if (arc.label == kPhiLabel) continue;
      ++present[arc.label];
      ++counts[arc.label][{arc.dest, arc.weight}];
    }
  }
  for (const auto& [label, n] : present) {
    if (n != static_cast<int>(members.size())) continue;
    int best = 0;
    std::pair<StateId, double> best_key;
    for (const auto& [key, c] : counts[label]) {
      if (c > best) {
        best = c;
        best_key = key;
      }
    }
    if (best < 2) continue;
    group.shared.push_back({label, best_key.second, best_key.first});
    group.removed += best;
  }
  return group;
}

ShadowGroup ShadowSubset(const Wfa& a, StateId q,
                         const std::function<bool(StateId)>& eligible) {
  const std::vector<StateId> candidates = Parents(a, q, eligible);
  ShadowGroup best;
  for (StateId seed : candidates) {
    std::vector<StateId> members = {seed};
    ShadowGroup local = EvaluateShadowGroup(a, members);
    while (members.size() < candidates.size()) {
      ShadowGroup step;
      bool found = false;
      for (StateId p : candidates) {
        if (std::find(members.begin(), members.end(), p) != members.end()) {
          continue;
        }
        std::vector<StateId> trial = members;
        trial.push_back(p);
        std::sort(trial.begin(), trial.end());
        ShadowGroup g = EvaluateShadowGroup(a, trial);
        if (!found || g.Benefit() > step.Benefit()) {
          step = std::move(g);
          found = true;
        }
      }
      members = step.members;
      if (step.Benefit() > local.Benefit()) local = step;
    }
    if (local.Benefit() > best.Benefit()) best = std::move(local);
  }
  return best;
}

void RemoveArcs(Wfa* a, StateId p,
                const std::function<bool(const Arc&)>& predicate) {
  std::vector<Arc>* arcs = a->MutableArcs(p);
  arcs->erase(std::remove_if(arcs->begin(), arcs->end(), predicate),
              arcs->end());
}

}  // namespace

absl::StatusOr<PhiWfa> PhiWfa::Create(Wfa wfa, int chain_cap) {
  const Diagnostics diag = Validate(wfa);
  if (!diag.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("invalid phi automaton:\n", diag.ToString()));
  }
  const int n = wfa.NumStates();
  // depth[s] = number of consecutive phi arcs starting at s.
  std::vector<int> depth(n, -1);
  int max_chain = 0;
  for (StateId s = 0; s < n; ++s) {
    std::vector<StateId> path;
    StateId cur = s;
    while (depth[cur] < 0) {
      const Arc* phi = wfa.PhiArc(cur);
      if (phi == nullptr) {
        depth[cur] = 0;
        break;
      }
      if (std::find(path.begin(), path.end(), cur) != path.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("phi cycle through state ", cur));
      }
      path.push_back(cur);
      cur = phi->dest;
    }
    int d = depth[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
    max_chain = std::max(max_chain, depth[s]);
  }
  if (max_chain > chain_cap) {
    return absl::InvalidArgumentError(absl::StrCat(
        "phi chain of length ", max_chain, " exceeds cap ", chain_cap));
  }
  return PhiWfa(std::move(wfa), max_chain, chain_cap);
}

std::optional<ResolvedArc> Resolve(const Wfa& a, StateId s, Label label) {
  double w = 1.0;
  int depth = 0;
  while (true) {
    if (const Arc* arc = a.FindArc(s, label)) {
      return ResolvedArc{w * arc->weight, arc->dest, depth};
    }
    const Arc* phi = a.PhiArc(s);
    if (phi == nullptr || depth > a.NumStates()) return std::nullopt;
    w *= phi->weight;
    s = phi->dest;
    ++depth;
  }
}

double PhiEvaluate(const PhiWfa& p, const std::vector<Label>& x) {
  const Wfa& a = p.wfa();
  if (a.initial() == kNoState) return 0.0;
  StateId s = a.initial();
  double w = 1.0;
  for (Label label : x) {
    auto r = Resolve(a, s, label);
    if (!r.has_value()) return 0.0;
    w *= r->weight;
    s = r->dest;
  }
  return w * a.Final(s);
}

int SourceSubset::Benefit() const {
  return ArcBenefit(static_cast<int>(shared.size()),
                    static_cast<int>(parents.size()));
}

SourceSubset PhiSourceSubset(const Wfa& a, StateId q) {
  return SourceSubsetImpl(a, q,
                          [&a](StateId p) { return a.PhiArc(p) == nullptr; });
}

absl::StatusOr<PhiWfa> PhiConvert(const Wfa& a,
                                  const PhiConvertOptions& options,
                                  std::vector<PhiConvertStep>* steps) {
  const Diagnostics diag = Validate(a);
  if (!diag.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "phi convert needs a deterministic input:\n", diag.ToString()));
  }
  const int original = a.NumStates();
  std::vector<StateId> order;
  if (auto topo = TopologicalOrder(a); topo.ok()) {
    order = *std::move(topo);
  } else {
    for (StateId s = 0; s < original; ++s) order.push_back(s);
  }
  Wfa out = a;
  auto eligible = [&out, original](StateId p) {
    return p < original && out.PhiArc(p) == nullptr;
  };
  for (StateId q : order) {
    if (q == a.initial()) continue;
    if (!options.shadowing) {
      const SourceSubset subset = SourceSubsetImpl(out, q, eligible);
      if (subset.Benefit() <= 0) continue;
      const StateId fresh = out.AddState();
      const std::set<LabelWeight> shared(subset.shared.begin(),
                                         subset.shared.end());
      for (StateId p : subset.parents) {
        RemoveArcs(&out, p, [&](const Arc& arc) {
          return arc.dest == q && arc.label != kPhiLabel &&
                 shared.count({arc.label, arc.weight}) > 0;
        });
        out.AddArc(p, {kPhiLabel, 1.0, fresh});
      }
      for (const auto& [label, weight] : subset.shared) {
        out.AddArc(fresh, {label, weight, q});
      }
      if (steps != nullptr) {
        const int s = static_cast<int>(subset.shared.size());
        const int p = static_cast<int>(subset.parents.size());
        steps->push_back({q, fresh, s, p, s + p - s * p});
      }
    } else {
      const ShadowGroup group = ShadowSubset(out, q, eligible);
      if (group.Benefit() <= 0) continue;
      const StateId fresh = out.AddState();
      const std::set<Triple> shared(group.shared.begin(), group.shared.end());
      for (StateId p : group.members) {
        RemoveArcs(&out, p, [&](const Arc& arc) {
          return arc.label != kPhiLabel &&
                 shared.count({arc.label, arc.weight, arc.dest}) > 0;
        });
        out.AddArc(p, {kPhiLabel, 1.0, fresh});
      }
      for (const Triple& t : group.shared) {
        out.AddArc(fresh, {t.label, t.weight, t.dest});
      }
      if (steps != nullptr) {
        const int s = static_cast<int>(group.shared.size());
        const int p = static_cast<int>(group.members.size());
        steps->push_back({q, fresh, s, p, s + p - group.removed});
      }
    }
  }
  out.SortArcs();
  return PhiWfa::Create(std::move(out), options.chain_cap);
}

absl::StatusOr<Wfa> PhiExpand(const PhiWfa& p) {
  const Wfa& a = p.wfa();
  Wfa out(a.symbols());
  out.AddStates(a.NumStates());
  out.SetInitial(a.initial());
  for (StateId s = 0; s < a.NumStates(); ++s) {
    out.SetStateName(s, a.StateName(s));
    out.SetFinal(s, a.Final(s));
    for (Label label = 0; label < a.alphabet_size(); ++label) {
      auto r = Resolve(a, s, label);
      if (!r.has_value()) continue;
      if (r->depth > p.chain_cap()) {
        return absl::FailedPreconditionError("phi chain cap exceeded");
      }
      if (r->weight > 0.0) out.AddArc(s, {label, r->weight, r->dest});
    }
  }
  return out;
}

absl::StatusOr<PhiWfa> PhiIntersect(const PhiWfa& p1, const PhiWfa& p2) {
  const Wfa& a1 = p1.wfa();
  const Wfa& a2 = p2.wfa();
  if (a1.symbols() != a2.symbols()) {
    return absl::InvalidArgumentError("phi intersect: alphabet mismatch");
  }
  Wfa out(a1.symbols());
  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::vector<std::pair<StateId, StateId>> pairs;
  std::deque<StateId> queue;
  auto get = [&](StateId q1, StateId q2) {
    auto [it, inserted] = ids.try_emplace({q1, q2}, kNoState);
    if (inserted) {
      it->second = out.AddState();
      pairs.emplace_back(q1, q2);
      out.SetStateName(it->second, absl::StrCat("(", q1, ",", q2, ")"));
      out.SetFinal(it->second, a1.Final(q1) * a2.Final(q2));
      queue.push_back(it->second);
    }
    return it->second;
  };
  out.SetInitial(get(a1.initial(), a2.initial()));
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    const auto [q1, q2] = pairs[s];
    const Arc* phi1 = a1.PhiArc(q1);
    const Arc* phi2 = a2.PhiArc(q2);
    const bool both = phi1 != nullptr && phi2 != nullptr;
    for (Label label = 0; label < a1.alphabet_size(); ++label) {
      const Arc* l1 = a1.FindArc(q1, label);
      const Arc* l2 = a2.FindArc(q2, label);
      std::optional<ResolvedArc> r1, r2;
      if (l1 != nullptr && l2 != nullptr) {
        r1 = ResolvedArc{l1->weight, l1->dest, 0};
        r2 = ResolvedArc{l2->weight, l2->dest, 0};
      } else if (both && l1 != nullptr) {
        r1 = ResolvedArc{l1->weight, l1->dest, 0};
        r2 = Resolve(a2, q2, label);
      } else if (both && l2 != nullptr) {
        r1 = Resolve(a1, q1, label);
        r2 = ResolvedArc{l2->weight, l2->dest, 0};
      }
      // Any other label falls through the product phi arc, if there is one.
      if (!r1.has_value() || !r2.has_value()) continue;
      const double w = r1->weight * r2->weight;
      // A zero arc must stay where it shadows a phi fallback.
      if (w <= 0.0 && phi1 == nullptr && phi2 == nullptr) continue;
      out.AddArc(s, {label, w, get(r1->dest, r2->dest)});
    }
    if (both) {
      out.AddArc(s, {kPhiLabel, phi1->weight * phi2->weight,
                     get(phi1->dest, phi2->dest)});
    } else if (phi1 != nullptr) {
      out.AddArc(s, {kPhiLabel, phi1->weight, get(phi1->dest, q2)});
    } else if (phi2 != nullptr) {
      out.AddArc(s, {kPhiLabel, phi2->weight, get(q1, phi2->dest)});
    }
  }

  // Trim dead states. A symbol arc into a dead state at a state that owns a
  // phi arc still shadows the fallback, so it is redirected to a sink.
  std::vector<bool> live(out.NumStates(), false);
  {
    std::vector<std::vector<StateId>> reverse(out.NumStates());
    std::vector<StateId> stack;
    for (StateId s = 0; s < out.NumStates(); ++s) {
      for (const Arc& arc : out.Arcs(s)) {
        if (arc.weight > 0.0) reverse[arc.dest].push_back(s);
      }
      if (out.IsFinal(s)) {
        live[s] = true;
        stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      const StateId s = stack.back();
      stack.pop_back();
      for (StateId p : reverse[s]) {
        if (!live[p]) {
          live[p] = true;
          stack.push_back(p);
        }
      }
    }
  }
  Wfa trimmed(out.symbols());
  std::vector<StateId> remap(out.NumStates(), kNoState);
  for (StateId s = 0; s < out.NumStates(); ++s) {
    if (live[s]) {
      remap[s] = trimmed.AddState();
      trimmed.SetStateName(remap[s], out.StateName(s));
      trimmed.SetFinal(remap[s], out.Final(s));
    }
  }
  if (!live[out.initial()]) {
    Wfa empty(out.symbols());
    empty.SetInitial(empty.AddState());
    return PhiWfa::Create(std::move(empty));
  }
  trimmed.SetInitial(remap[out.initial()]);
  StateId sink = kNoState;
  for (StateId s = 0; s < out.NumStates(); ++s) {
    if (!live[s]) continue;
    const bool owns_phi = out.PhiArc(s) != nullptr && live[out.PhiArc(s)->dest];
    for (const Arc& arc : out.Arcs(s)) {
      if (live[arc.dest]) {
        trimmed.AddArc(remap[s], {arc.label, arc.weight, remap[arc.dest]});
      } else if (arc.label != kPhiLabel && owns_phi) {
        if (sink == kNoState) {
          sink = trimmed.AddState();
          trimmed.SetStateName(sink, "sink");
        }
        trimmed.AddArc(remap[s], {arc.label, arc.weight, sink});
      }
    }
  }
  trimmed.SortArcs();
  return PhiWfa::Create(std::move(trimmed),
                        std::max(p1.chain_cap(), p2.chain_cap()) * 2);
}

absl::StatusOr<FilteredComposition> PhiFilteredComposition(const PhiWfa& p1,
                                                           const PhiWfa& p2) {
  const Wfa& a1 = p1.wfa();
  const Wfa& a2 = p2.wfa();
  if (a1.symbols() != a2.symbols()) {
    return absl::InvalidArgumentError("phi intersect: alphabet mismatch");
  }
  // Source and destination states of phi arcs carry the "stay" self-loops.
  auto endpoints = [](const Wfa& a) {
    std::vector<bool> e(a.NumStates(), false);
    for (StateId s = 0; s < a.NumStates(); ++s) {
      if (const Arc* phi = a.PhiArc(s)) {
        e[s] = true;
        e[phi->dest] = true;
      }
    }
    return e;
  };
  const std::vector<bool> stay1 = endpoints(a1);
  const std::vector<bool> stay2 = endpoints(a2);

  FilteredComposition c;
  std::map<std::tuple<StateId, int, StateId>, int> ids;
  std::deque<int> queue;
  auto get = [&](StateId q1, int f, StateId q2) {
    auto [it, inserted] = ids.try_emplace({q1, f, q2}, -1);
    if (inserted) {
      it->second = static_cast<int>(c.states.size());
      c.states.emplace_back(q1, f, q2);
      c.arcs.emplace_back();
      queue.push_back(it->second);
    }
    return it->second;
  };
  c.initial = get(a1.initial(), 0, a2.initial());
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    const auto [q1, f, q2] = c.states[s];
    std::vector<FilteredArc> arcs;
    for (const Arc& e1 : a1.Arcs(q1)) {
      if (e1.label == kPhiLabel) continue;
      const Arc* e2 = a2.FindArc(q2, e1.label);
      if (e2 == nullptr) continue;
      arcs.push_back({FilteredLabelKind::kSymbol, e1.label,
                      e1.weight * e2->weight, get(e1.dest, 0, e2->dest)});
    }
    const Arc* phi1 = a1.PhiArc(q1);
    const Arc* phi2 = a2.PhiArc(q2);
    // phi2:phi2, the left side moves and the right side stays.
    if ((f == 0 || f == 2) && phi1 != nullptr && stay2[q2]) {
      arcs.push_back({FilteredLabelKind::kPhi22, kPhiLabel, phi1->weight,
                      get(phi1->dest, 2, q2)});
    }
    // phi1:phi1, the left side stays and the right side moves.
    if ((f == 0 || f == 1) && stay1[q1] && phi2 != nullptr) {
      arcs.push_back({FilteredLabelKind::kPhi11, kPhiLabel, phi2->weight,
                      get(q1, 1, phi2->dest)});
    }
    // phi2:phi1, both sides move.
    if (f == 0 && phi1 != nullptr && phi2 != nullptr) {
      arcs.push_back({FilteredLabelKind::kPhi21, kPhiLabel,
                      phi1->weight * phi2->weight,
                      get(phi1->dest, 0, phi2->dest)});
    }
    c.arcs[s] = std::move(arcs);
  }
  return c;
}

absl::StatusOr<std::vector<double>> PhiLogBackwardDistances(const Wfa& a) {
  auto order = TopologicalOrder(a);
  if (!order.ok()) return order.status();
  std::vector<double> beta(a.NumStates(), kLogZero);
  std::vector<double> terms;
  for (auto it = order->rbegin(); it != order->rend(); ++it) {
    const StateId s = *it;
    terms.clear();
    if (a.Final(s) > 0.0) terms.push_back(std::log(a.Final(s)));
    for (Label label = 0; label < a.alphabet_size(); ++label) {
      auto r = Resolve(a, s, label);
      if (!r.has_value() || r->weight <= 0.0) continue;
      if (beta[r->dest] == kLogZero) continue;
      terms.push_back(std::log(r->weight) + beta[r->dest]);
    }
    beta[s] = LogSumExp(terms);
  }
  return beta;
}

}  // namespace wfa_hedge
