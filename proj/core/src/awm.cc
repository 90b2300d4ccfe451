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

#include "wfa_hedge/awm.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Sample(const std::vector<double>& p, Rng& rng) {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  int last_positive = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] <= 0.0) continue;
    last_positive = i;
    cumulative += p[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

absl::StatusOr<AwmState> AwmState::Init(const Wfa& c, int horizon, double eta) {
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  auto s_t = BuildLengthAutomaton(c.alphabet_size(), horizon);
  if (!s_t.ok()) return s_t.status();
  auto b = Intersect(c, *s_t);
  if (!b.ok()) return b.status();
  return FromProduct(*b, horizon, eta);
}

absl::StatusOr<AwmState> AwmState::InitPhi(const PhiWfa& c, int horizon,
                                           double eta) {
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  auto s_t = BuildLengthAutomaton(c.wfa().alphabet_size(), horizon);
  if (!s_t.ok()) return s_t.status();
  auto s_phi = PhiWfa::Create(*std::move(s_t));
  if (!s_phi.ok()) return s_phi.status();
  auto b = PhiIntersect(c, *s_phi);
  if (!b.ok()) return b.status();
  return FromProduct(b->wfa(), horizon, eta);
}

absl::StatusOr<AwmState> AwmState::FromProduct(const Wfa& b, int horizon,
                                               double eta) {
  if (horizon < 1) return absl::InvalidArgumentError("horizon must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must be positive, got ", eta));
  }
  AwmState state;
  state.horizon_ = horizon;
  state.eta_ = eta;
  if (auto st = state.Build(b); !st.ok()) return st;
  return state;
}

absl::Status AwmState::Build(const Wfa& b) {
  if (b.initial() == kNoState) {
    return absl::InvalidArgumentError("competitor has no initial state");
  }
  auto phi_check = PhiWfa::Create(b, kDefaultPhiChainCap * 2);
  if (!phi_check.ok()) return phi_check.status();
  max_phi_chain_ = phi_check->max_phi_chain();
  has_phi_ = b.HasPhi();
  num_labels_ = b.alphabet_size();

  auto powered = PowerWeights(b, eta_);
  if (!powered.ok()) return powered.status();
  auto beta_b = PhiLogBackwardDistances(*powered);
  if (!beta_b.ok()) return beta_b.status();
  if ((*beta_b)[b.initial()] == kLogZero) {
    return absl::FailedPreconditionError(
        "empty intersection: no competitor sequence of the horizon length");
  }

  // Weight pushing in the log domain.
  const int n = b.NumStates();
  a_ = Wfa(b.symbols());
  a_.AddStates(n);
  a_.SetInitial(b.initial());
  arcs_.assign(n, {});
  phi_dest_.assign(n, kNoState);
  phi_log_weight_.assign(n, kLogZero);
  std::vector<std::vector<EngineArc>> log_arcs(n);
  for (StateId s = 0; s < n; ++s) {
    a_.SetStateName(s, b.StateName(s));
    const double ds = (*beta_b)[s];
    const double f = powered->Final(s);
    if (ds != kLogZero && f > 0.0) a_.SetFinal(s, std::exp(std::log(f) - ds));
    for (const Arc& arc : powered->Arcs(s)) {
      const double dd = (*beta_b)[arc.dest];
      double lw = kLogZero;
      if (ds != kLogZero && dd != kLogZero && arc.weight > 0.0) {
        lw = std::log(arc.weight) + dd - ds;
      }
      a_.AddArc(s, {arc.label, lw == kLogZero ? 0.0 : std::exp(lw), arc.dest});
      if (arc.label == kPhiLabel) {
        phi_dest_[s] = arc.dest;
        phi_log_weight_[s] = lw;
      } else {
        arcs_[s].push_back({arc.label, lw, arc.dest, -1});
      }
    }
    std::sort(arcs_[s].begin(), arcs_[s].end(),
              [](const EngineArc& x, const EngineArc& y) {
                return x.label < y.label;
              });
  }
  auto beta_a = PhiLogBackwardDistances(a_);
  if (!beta_a.ok()) return beta_a.status();
  log_beta_ = *std::move(beta_a);

  // Levels: symbol arcs advance one level, phi arcs stay on the level.
  auto order = TopologicalOrder(a_);
  if (!order.ok()) return order.status();
  level_.assign(n, -1);
  level_[a_.initial()] = 0;
  for (StateId s : *order) {
    if (level_[s] < 0) continue;
    for (const Arc& arc : a_.Arcs(s)) {
      const int next = level_[s] + (arc.label == kPhiLabel ? 0 : 1);
      if (level_[arc.dest] < 0) {
        level_[arc.dest] = next;
      } else if (level_[arc.dest] != next) {
        return absl::InvalidArgumentError(absl::StrCat(
            "state ", a_.StateName(arc.dest), " is reachable at levels ",
            level_[arc.dest], " and ", next));
      }
    }
  }
  by_level_.assign(horizon_ + 1, {});
  for (StateId s : *order) {
    if (level_[s] < 0) continue;
    if (level_[s] > horizon_) {
      return absl::InvalidArgumentError("competitor exceeds the horizon");
    }
    by_level_[level_[s]].push_back(s);
  }

  // One slot per (state, incoming label).
  slots_of_state_.assign(n, {});
  slot_label_.clear();
  std::vector<std::map<Label, int>> slot_ids(n);
  for (StateId s = 0; s < n; ++s) {
    for (EngineArc& arc : arcs_[s]) {
      auto [it, inserted] = slot_ids[arc.dest].try_emplace(
          arc.label, static_cast<int>(slot_label_.size()));
      if (inserted) {
        slot_label_.push_back(arc.label);
        slots_of_state_[arc.dest].push_back(it->second);
      }
      arc.slot = it->second;
    }
  }
  slot_value_.assign(slot_label_.size(), SignedLogWeight::Zero());

  alpha_.assign(n, SignedLogWeight::Zero());
  alpha_[a_.initial()] = SignedLogWeight::One();
  flows_.assign(num_labels_, SignedLogWeight::Zero());
  p_.assign(num_labels_, 0.0);
  round_ = 0;
  cumulative_loss_ = 0.0;
  total_touched_ = 0;
  Pass(0);
  return absl::OkStatus();
}

int AwmState::FindLocal(StateId s, Label label) const {
  const std::vector<EngineArc>& arcs = arcs_[s];
  auto it = std::lower_bound(
      arcs.begin(), arcs.end(), label,
      [](const EngineArc& arc, Label l) { return arc.label < l; });
  if (it == arcs.end() || it->label != label) return -1;
  return static_cast<int>(it - arcs.begin());
}

void AwmState::Pass(int t) {
  std::fill(flows_.begin(), flows_.end(), SignedLogWeight::Zero());
  int64_t touched = 0;
  for (StateId u : by_level_[t]) {
    const SignedLogWeight alpha_u = alpha_[u];
    for (const EngineArc& e : arcs_[u]) {
      ++touched;
      const SignedLogWeight c = alpha_u.ScaledByLog(e.log_weight);
      slot_value_[e.slot] += c;
      flows_[e.label] += c.ScaledByLog(log_beta_[e.dest]);
      // The same label further down the phi chain is shadowed by e; take
      // back the mass that the phi arcs will push through it.
      StateId q = u;
      double log_phi = 0.0;
      while (phi_dest_[q] != kNoState) {
        ++touched;
        log_phi += phi_log_weight_[q];
        const StateId d = phi_dest_[q];
        const int k = FindLocal(d, e.label);
        if (k >= 0) {
          const EngineArc& shadowed = arcs_[d][k];
          const SignedLogWeight sub =
              alpha_u.ScaledByLog(log_phi + shadowed.log_weight);
          slot_value_[shadowed.slot] -= sub;
          flows_[e.label] -= sub.ScaledByLog(log_beta_[shadowed.dest]);
          break;
        }
        q = d;
      }
    }
    if (phi_dest_[u] != kNoState) {
      ++touched;
      alpha_[phi_dest_[u]] += alpha_u.ScaledByLog(phi_log_weight_[u]);
    }
  }
  last_touched_ = touched;
  total_touched_ += touched;

  SignedLogWeight z = SignedLogWeight::Zero();
  for (const SignedLogWeight& f : flows_) z += f;
  if (z.sign() <= 0) return;
  double sum = 0.0;
  for (int a = 0; a < num_labels_; ++a) {
    const SignedLogWeight& f = flows_[a];
    double v =
        f.sign() > 0 ? std::exp(f.log_magnitude() - z.log_magnitude()) : 0.0;
    p_[a] = v;
    sum += v;
  }
  for (double& v : p_) v /= sum;
}

absl::StatusOr<std::vector<double>> AwmState::Step(
    const std::vector<double>& loss) {
  if (static_cast<int>(loss.size()) != num_labels_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "loss has ", loss.size(), " entries, expected ", num_labels_));
  }
  double expected = 0.0;
  std::vector<double> log_factors(num_labels_);
  for (int a = 0; a < num_labels_; ++a) {
    if (!(loss[a] >= 0.0 && loss[a] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("loss entry ", a, " outside [0,1]: ", loss[a]));
    }
    expected += p_[a] * loss[a];
    log_factors[a] = -eta_ * loss[a];
  }
  return StepWithLogFactors(log_factors, expected);
}

absl::StatusOr<std::vector<double>> AwmState::StepWithLogFactors(
    const std::vector<double>& log_factors, double expected_loss) {
  if (round_ >= horizon_) {
    return absl::FailedPreconditionError(
        absl::StrCat("all ", horizon_, " rounds already played"));
  }
  if (static_cast<int>(log_factors.size()) != num_labels_) {
    return absl::InvalidArgumentError("factor vector has the wrong size");
  }
  const int t = round_ + 1;
  for (StateId u : by_level_[t]) {
    SignedLogWeight alpha = SignedLogWeight::Zero();
    for (int slot : slots_of_state_[u]) {
      alpha += slot_value_[slot].ScaledByLog(log_factors[slot_label_[slot]]);
      slot_value_[slot] = SignedLogWeight::Zero();
    }
    alpha_[u] = alpha;
  }
  applied_log_factors_.push_back(log_factors);
  round_ = t;
  cumulative_loss_ += expected_loss;
  if (t < horizon_) {
    Pass(t);
  } else {
    last_touched_ = 0;
  }
  return p_;
}

int64_t AwmState::LevelArcCount(int t) const {
  if (t < 0 || t >= static_cast<int>(by_level_.size())) return 0;
  int64_t count = 0;
  for (StateId s : by_level_[t]) count += a_.NumArcs(s);
  return count;
}

double AwmState::LogPathWeight(const std::vector<Label>& x) const {
  StateId s = a_.initial();
  double lw = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    int k = FindLocal(s, x[i]);
    while (k < 0) {
      if (phi_dest_[s] == kNoState) return kLogZero;
      lw += phi_log_weight_[s];
      s = phi_dest_[s];
      k = FindLocal(s, x[i]);
    }
    lw += arcs_[s][k].log_weight;
    s = arcs_[s][k].dest;
    if (i < applied_log_factors_.size()) lw += applied_log_factors_[i][x[i]];
  }
  if (a_.Final(s) <= 0.0) return kLogZero;
  return lw + std::log(a_.Final(s));
}

}  // namespace wfa_hedge
