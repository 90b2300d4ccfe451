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

#include "wfa_hedge/approx.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "wfa_hedge/signed_log.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Divergence treated as zero when deciding that an iterate is optimal.
constexpr double kZeroDivergence = 1e-12;

// True if `score` should replace `current` when candidates are visited in
// lexicographic order.
bool Better(double score, double current, bool have) {
  if (!have) return score > kLogZero;
  if (current == kInf) return false;
  if (score == kInf) return true;
  return score > current + 1e-12 * std::max(1.0, std::fabs(current));
}

absl::Status CheckCompetitor(const Wfa& c_t) {
  if (c_t.HasPhi()) {
    return absl::InvalidArgumentError("approximation needs a phi-free C_T");
  }
  if (c_t.initial() == kNoState) {
    return absl::InvalidArgumentError("empty support");
  }
  return absl::OkStatus();
}

}  // namespace

namespace internal {

// C_T paired with the context reached by each prefix. Nodes are (state,
// context) pairs; only positive-weight arcs into co-accessible states are
// kept.
struct ContextGraph {
  struct GraphArc {
    Label label;
    double log_c;
    int dest;
  };
  struct Node {
    StateId state;
    int ctx;
    // kLogZero if not final.
    double log_final;
    std::vector<GraphArc> arcs;
  };

  std::vector<Node> nodes;
  // Topological order of the nodes; node 0 is the root.
  std::vector<int> order;
  double log_z = kLogZero;

  static absl::StatusOr<ContextGraph> Build(const Wfa& c_t,
                                            const NGramModel& shape) {
    if (auto st = CheckCompetitor(c_t); !st.ok()) return st;
    if (c_t.symbols() != shape.symbols()) {
      return absl::InvalidArgumentError("alphabet mismatch with the model");
    }
    auto topo = TopologicalOrder(c_t);
    if (!topo.ok()) return topo.status();
    auto beta = LogBackwardDistances(c_t);
    if (!beta.ok()) return beta.status();
    ContextGraph g;
    g.log_z = (*beta)[c_t.initial()];
    if (g.log_z == kLogZero) return absl::InvalidArgumentError("empty support");
    std::vector<int> rank(c_t.NumStates());
    for (size_t i = 0; i < topo->size(); ++i) rank[(*topo)[i]] = i;

    const int64_t num_ctx = shape.num_contexts();
    std::unordered_map<int64_t, int> index;
    auto node_of = [&](StateId s, int ctx) {
      const int64_t key = s * num_ctx + ctx;
      auto [it, inserted] = index.emplace(key, g.nodes.size());
      if (inserted) {
        const double f = c_t.Final(s);
        g.nodes.push_back(Node{s, ctx, f > 0.0 ? std::log(f) : kLogZero, {}});
      }
      return it->second;
    };
    node_of(c_t.initial(), 0);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      const StateId s = g.nodes[i].state;
      const int ctx = g.nodes[i].ctx;
      std::vector<GraphArc> arcs;
      for (const Arc& arc : c_t.Arcs(s)) {
        if (arc.weight <= 0.0 || (*beta)[arc.dest] == kLogZero) continue;
        const int dest = node_of(arc.dest, shape.NextContext(ctx, arc.label));
        arcs.push_back(GraphArc{arc.label, std::log(arc.weight), dest});
      }
      std::sort(arcs.begin(), arcs.end(),
                [](const GraphArc& x, const GraphArc& y) {
                  return x.label < y.label;
                });
      g.nodes[i].arcs = std::move(arcs);
    }
    g.order.resize(g.nodes.size());
    for (size_t i = 0; i < g.order.size(); ++i) g.order[i] = i;
    std::stable_sort(g.order.begin(), g.order.end(), [&](int x, int y) {
      return rank[g.nodes[x].state] < rank[g.nodes[y].state];
    });
    return g;
  }

  // max over paths of sum (log c - log w) plus the final weight, minus log Z.
  DivergenceValue MaxRatio(const NGramModel& m) const {
    const int n = nodes.size();
    std::vector<double> best(n, kLogZero);
    std::vector<int> choice(n, -2);  // -2 none, -1 stop here, else arc index
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Node& node = nodes[*it];
      bool have = false;
      if (node.log_final != kLogZero) {
        best[*it] = node.log_final;
        choice[*it] = -1;
        have = true;
      }
      for (size_t k = 0; k < node.arcs.size(); ++k) {
        const GraphArc& arc = node.arcs[k];
        if (best[arc.dest] == kLogZero) continue;
        const double w = m.Weight(node.ctx, arc.label);
        const double score =
            w > 0.0 ? arc.log_c - std::log(w) + best[arc.dest] : kInf;
        if (Better(score, best[*it], have)) {
          best[*it] = score;
          choice[*it] = k;
          have = true;
        }
      }
    }
    DivergenceValue out;
    out.value = best[0] == kInf ? kInf : best[0] - log_z;
    int v = 0;
    while (choice[v] >= 0) {
      const GraphArc& arc = nodes[v].arcs[choice[v]];
      out.witness.push_back(arc.label);
      v = arc.dest;
    }
    return out;
  }

  // Log forward weights of C_T alone, per node.
  std::vector<double> LogForward() const {
    std::vector<double> alpha(nodes.size(), kLogZero);
    alpha[0] = 0.0;
    for (int v : order) {
      if (alpha[v] == kLogZero) continue;
      for (const GraphArc& arc : nodes[v].arcs) {
        alpha[arc.dest] = LogAddExp(alpha[arc.dest], alpha[v] + arc.log_c);
      }
    }
    return alpha;
  }

  // Log backward weights per node; equal to beta of the C_T state.
  std::vector<double> LogBackward() const {
    std::vector<double> beta(nodes.size(), kLogZero);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      double b = nodes[*it].log_final;
      for (const GraphArc& arc : nodes[*it].arcs) {
        b = LogAddExp(b, arc.log_c + beta[arc.dest]);
      }
      beta[*it] = b;
    }
    return beta;
  }
};

}  // namespace internal

namespace {

using Graph = internal::ContextGraph;

absl::StatusOr<GradientTable> Subgradient(const NGramModel& m,
                                          const std::vector<Label>& x) {
  GradientTable g(m.num_contexts(), std::vector<double>(m.num_symbols(), 0.0));
  int ctx = 0;
  for (Label a : x) {
    if (a < 0 || a >= m.num_symbols()) {
      return absl::InvalidArgumentError(absl::StrCat("bad label ", a));
    }
    g[ctx][a] += 1.0;
    ctx = m.NextContext(ctx, a);
  }
  for (int c = 0; c < m.num_contexts(); ++c) {
    for (Label a = 0; a < m.num_symbols(); ++a) {
      if (g[c][a] == 0.0) continue;
      const double w = m.Weight(c, a);
      if (!(w > 0.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("zero weight on '", m.ContextName(c), "' -> ",
                         m.symbols().Name(a)));
      }
      g[c][a] = -g[c][a] / w;
    }
  }
  return g;
}

// Common length of the accepting paths of c_t.
absl::StatusOr<int> CommonLength(const Wfa& c_t) {
  auto topo = TopologicalOrder(c_t);
  if (!topo.ok()) return topo.status();
  auto beta = LogBackwardDistances(c_t);
  if (!beta.ok()) return beta.status();
  const int n = c_t.NumStates();
  std::vector<int> lo(n, std::numeric_limits<int>::max());
  std::vector<int> hi(n, -1);
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const StateId s = *it;
    if (c_t.IsFinal(s)) {
      lo[s] = 0;
      hi[s] = 0;
    }
    for (const Arc& arc : c_t.Arcs(s)) {
      if (arc.weight <= 0.0 || hi[arc.dest] < 0) continue;
      lo[s] = std::min(lo[s], lo[arc.dest] + 1);
      hi[s] = std::max(hi[s], hi[arc.dest] + 1);
    }
  }
  const StateId init = c_t.initial();
  if (hi[init] < 0) return absl::InvalidArgumentError("empty support");
  if (lo[init] != hi[init]) {
    return absl::InvalidArgumentError(
        "accepting paths of C_T have different lengths");
  }
  return hi[init];
}

double LogNGramOrderSize(int num_symbols, int order) {
  return order * std::log(static_cast<double>(num_symbols));
}

}  // namespace

absl::StatusOr<DivergenceValue> RenyiDivergenceInf(const Wfa& c_t,
                                                   const NGramModel& m) {
  auto g = Graph::Build(c_t, m);
  if (!g.ok()) return g.status();
  return g->MaxRatio(m);
}

absl::StatusOr<DivergenceValue> RenyiDivergenceInfEnumerated(
    const Wfa& c_t, const NGramModel& m, int64_t limit) {
  if (auto st = CheckCompetitor(c_t); !st.ok()) return st;
  auto support = EnumerateSupport(c_t, limit);
  if (!support.ok()) return support.status();
  if (support->empty()) return absl::InvalidArgumentError("empty support");
  std::vector<double> logs;
  for (const WeightedString& ws : *support) logs.push_back(std::log(ws.weight));
  const double log_z = LogSumExp(logs);
  DivergenceValue out{kLogZero, {}};
  bool have = false;
  for (size_t i = 0; i < support->size(); ++i) {
    const double lq = m.LogProbability((*support)[i].labels);
    const double v = lq == kLogZero ? kInf : logs[i] - log_z - lq;
    // Enumeration is lexicographic, so strict improvement keeps the first.
    if (!have || (v > out.value && out.value != kInf)) {
      out.value = v;
      out.witness = (*support)[i].labels;
      have = true;
    }
  }
  return out;
}

absl::StatusOr<std::vector<Label>> MaxRatioPath(const Wfa& c_t,
                                                const NGramModel& m) {
  auto d = RenyiDivergenceInf(c_t, m);
  if (!d.ok()) return d.status();
  return std::move(d->witness);
}

absl::StatusOr<double> KlDivergence(const Wfa& c_t, const NGramModel& m) {
  auto g = Graph::Build(c_t, m);
  if (!g.ok()) return g.status();
  const std::vector<double> alpha = g->LogForward();
  const std::vector<double> beta = g->LogBackward();
  double kl = 0.0;
  for (size_t v = 0; v < g->nodes.size(); ++v) {
    const Graph::Node& node = g->nodes[v];
    if (alpha[v] == kLogZero) continue;
    if (node.log_final != kLogZero) {
      const double p = std::exp(alpha[v] + node.log_final - g->log_z);
      kl += p * node.log_final;
    }
    for (const auto& arc : node.arcs) {
      const double p =
          std::exp(alpha[v] + arc.log_c + beta[arc.dest] - g->log_z);
      if (p <= 0.0) continue;
      const double w = m.Weight(node.ctx, arc.label);
      if (!(w > 0.0)) return kInf;
      kl += p * (arc.log_c - std::log(w));
    }
  }
  return kl - g->log_z;
}

absl::StatusOr<GradientTable> ProdEgSubgradient(const NGramModel& m,
                                                const std::vector<Label>& x) {
  return Subgradient(m, x);
}

ProdEgSolver::ProdEgSolver(ProdEgSolver&&) = default;
ProdEgSolver& ProdEgSolver::operator=(ProdEgSolver&&) = default;
ProdEgSolver::~ProdEgSolver() = default;

absl::StatusOr<ProdEgSolver> ProdEgSolver::Create(
    const Wfa& c_t, int order, const ProdEgOptions& options) {
  if (options.schedule == ProdEgOptions::Schedule::kFixed &&
      !(options.eta > 0.0 && std::isfinite(options.eta))) {
    return absl::InvalidArgumentError("fixed step size must be positive");
  }
  auto uniform = NGramModel::Uniform(c_t.symbols(), order);
  if (!uniform.ok()) return uniform.status();
  auto g = internal::ContextGraph::Build(c_t, *uniform);
  if (!g.ok()) return g.status();
  ProdEgSolver s;
  s.graph_ = std::make_unique<internal::ContextGraph>(*std::move(g));
  s.options_ = options;
  s.current_ = *std::move(uniform);
  s.sum_.assign(s.current_.num_contexts(),
                std::vector<double>(s.current_.num_symbols(), 0.0));
  s.c_ = options.c > 0.0 ? options.c
                         : std::sqrt(s.current_.num_contexts() *
                                     std::log(static_cast<double>(std::max(
                                         2, s.current_.num_symbols()))) /
                                     2.0);
  return s;
}

absl::Status ProdEgSolver::Update() {
  const DivergenceValue d = graph_->MaxRatio(current_);
  for (int c = 0; c < current_.num_contexts(); ++c) {
    for (Label a = 0; a < current_.num_symbols(); ++a) {
      sum_[c][a] += current_.Weight(c, a);
    }
  }
  ++iterations_;
  if (d.value <= kZeroDivergence) {
    last_eta_ = 0.0;
    return absl::OkStatus();
  }
  auto g = Subgradient(current_, d.witness);
  if (!g.ok()) return g.status();
  double sup = 0.0;
  for (const auto& row : *g) {
    for (double v : row) sup = std::max(sup, std::fabs(v));
  }
  sum_sup_norms_ += sup;
  sum_sq_sup_norms_ += sup * sup;
  max_sup_norm_ = std::max(max_sup_norm_, sup);
  const double eta = options_.schedule == ProdEgOptions::Schedule::kFixed
                         ? options_.eta
                         : c_ / std::sqrt(sum_sq_sup_norms_);
  last_eta_ = eta;
  for (int c = 0; c < current_.num_contexts(); ++c) {
    std::vector<double>& row = *current_.MutableRow(c);
    // Update in the log domain relative to the row maximum.
    std::vector<double> logs(row.size());
    double top = kLogZero;
    for (size_t a = 0; a < row.size(); ++a) {
      logs[a] = row[a] > 0.0 ? std::log(row[a]) - eta * (*g)[c][a] : kLogZero;
      top = std::max(top, logs[a]);
    }
    double total = 0.0;
    for (size_t a = 0; a < row.size(); ++a) {
      row[a] = std::exp(logs[a] - top);
      total += row[a];
    }
    for (double& w : row) w /= total;
  }
  return absl::OkStatus();
}

NGramModel ProdEgSolver::Average() const {
  NGramModel avg = current_;
  if (iterations_ == 0) return avg;
  for (int c = 0; c < avg.num_contexts(); ++c) {
    std::vector<double>& row = *avg.MutableRow(c);
    double total = 0.0;
    for (size_t a = 0; a < row.size(); ++a) {
      row[a] = sum_[c][a] / iterations_;
      total += row[a];
    }
    // Remove accumulated rounding so the row is on the simplex.
    for (double& w : row) w /= total;
  }
  return avg;
}

absl::StatusOr<ProdEgResult> ProdEg(const Wfa& c_t, int order, int iterations,
                                    const ProdEgOptions& options) {
  if (iterations < 1)
    return absl::InvalidArgumentError("iterations must be >= 1");
  auto solver = ProdEgSolver::Create(c_t, order, options);
  if (!solver.ok()) return solver.status();
  for (int s = 0; s < iterations; ++s) {
    if (auto st = solver->Update(); !st.ok()) return st;
  }
  ProdEgResult out{solver->Average(), 0.0, solver->max_sup_norm(),
                   solver->sum_sup_norms(), solver->last_eta()};
  auto d = RenyiDivergenceInf(c_t, out.model);
  if (!d.ok()) return d.status();
  out.objective = d->value;
  return out;
}

double ProdEgGapBound(int num_contexts, int num_symbols, double eta, int tau,
                      double max_partial) {
  return num_contexts * std::log(static_cast<double>(num_symbols)) /
             (eta * tau) +
         2.0 * eta * max_partial;
}

double NGramGapBound(int num_symbols, int order, int horizon,
                     double sum_sup_norms) {
  if (num_symbols < 2 || horizon < 1) return 0.0;
  const double n = num_symbols;
  const double log_num = LogNGramOrderSize(num_symbols, order) +
                         std::log(2.0 * std::log(n) * sum_sup_norms);
  const double log_den = std::log((n - 1.0) * horizon * horizon);
  if (sum_sup_norms <= 0.0) return 0.0;
  return std::exp(0.5 * (log_num - log_den));
}

absl::StatusOr<MlNGramResult> MlNGram(const Wfa& c_t, int order,
                                      const MlNGramOptions& options) {
  if (auto st = CheckCompetitor(c_t); !st.ok()) return st;
  auto shape = NGramModel::Uniform(c_t.symbols(), order);
  if (!shape.ok()) return shape.status();
  bool enumerate = options.method == MlNGramOptions::Method::kEnumerate;
  if (options.method == MlNGramOptions::Method::kAuto) {
    auto log_k = LogCountAcceptingPaths(c_t);
    if (!log_k.ok()) return log_k.status();
    enumerate = *log_k <=
                std::log(static_cast<double>(options.enumeration_limit)) + 1e-9;
  }
  std::vector<std::vector<double>> counts(
      shape->num_contexts(), std::vector<double>(shape->num_symbols(), 0.0));
  if (enumerate) {
    auto support = EnumerateSupport(c_t, options.enumeration_limit);
    if (!support.ok()) return support.status();
    if (support->empty()) return absl::InvalidArgumentError("empty support");
    std::vector<double> logs;
    for (const WeightedString& ws : *support) {
      logs.push_back(std::log(ws.weight));
    }
    const double log_z = LogSumExp(logs);
    for (size_t i = 0; i < support->size(); ++i) {
      const double q = std::exp(logs[i] - log_z);
      int ctx = 0;
      for (Label a : (*support)[i].labels) {
        counts[ctx][a] += q;
        ctx = shape->NextContext(ctx, a);
      }
    }
  } else {
    auto g = Graph::Build(c_t, *shape);
    if (!g.ok()) return g.status();
    const std::vector<double> alpha = g->LogForward();
    const std::vector<double> beta = g->LogBackward();
    for (size_t v = 0; v < g->nodes.size(); ++v) {
      if (alpha[v] == kLogZero) continue;
      const Graph::Node& node = g->nodes[v];
      for (const auto& arc : node.arcs) {
        counts[node.ctx][arc.label] +=
            std::exp(alpha[v] + arc.log_c + beta[arc.dest] - g->log_z);
      }
    }
  }
  MlNGramResult out{*std::move(shape), {}, enumerate};
  for (int c = 0; c < out.model.num_contexts(); ++c) {
    double total = 0.0;
    for (double v : counts[c]) total += v;
    if (total <= 0.0) {
      out.zero_count_contexts.push_back(c);
      continue;
    }
    std::vector<double>& row = *out.model.MutableRow(c);
    for (size_t a = 0; a < row.size(); ++a) row[a] = counts[c][a] / total;
  }
  return out;
}

absl::StatusOr<NGramModel> MlBigramKShiftClosedForm(int num_experts, int k,
                                                    int horizon) {
  if (num_experts < 1) return absl::InvalidArgumentError("need >= 1 expert");
  if (k < 0) return absl::InvalidArgumentError("k must be >= 0");
  if (horizon <= k + 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("horizon ", horizon, " must exceed k + 1 = ", k + 1));
  }
  if (num_experts == 1 && k > 0) {
    return absl::InvalidArgumentError("shifts need at least two experts");
  }
  auto m = NGramModel::Uniform(SymbolTable::Alphabetic(num_experts), 2);
  if (!m.ok()) return m.status();
  const double stay = 1.0 - static_cast<double>(k) / (horizon - 1);
  const double shift =
      num_experts > 1
          ? static_cast<double>(k) / ((horizon - 1.0) * (num_experts - 1.0))
          : 0.0;
  for (int c = 1; c < m->num_contexts(); ++c) {
    const Label prev = m->Context(c)[0];
    for (Label a = 0; a < num_experts; ++a) {
      m->SetWeight(c, a, a == prev ? stay : shift);
    }
  }
  return m;
}

absl::StatusOr<std::vector<int>> MinSymbolCounts(const Wfa& c_t) {
  if (auto st = CheckCompetitor(c_t); !st.ok()) return st;
  auto topo = TopologicalOrder(c_t);
  if (!topo.ok()) return topo.status();
  const int n = c_t.NumStates();
  const int num_symbols = c_t.alphabet_size();
  constexpr int kNone = std::numeric_limits<int>::max();
  std::vector<std::vector<int>> best(n, std::vector<int>(num_symbols, kNone));
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const StateId s = *it;
    if (c_t.IsFinal(s)) std::fill(best[s].begin(), best[s].end(), 0);
    for (const Arc& arc : c_t.Arcs(s)) {
      if (arc.weight <= 0.0) continue;
      for (int j = 0; j < num_symbols; ++j) {
        if (best[arc.dest][j] == kNone) continue;
        best[s][j] =
            std::min(best[s][j], best[arc.dest][j] + (arc.label == j ? 1 : 0));
      }
    }
  }
  if (best[c_t.initial()][0] == kNone && num_symbols > 0) {
    return absl::InvalidArgumentError("empty support");
  }
  return best[c_t.initial()];
}

absl::StatusOr<NGramModel> UnigramRenyiClosedForm(const Wfa& c_t) {
  if (c_t.alphabet_size() != 2) {
    return absl::InvalidArgumentError("closed form needs exactly two symbols");
  }
  if (auto st = CheckCompetitor(c_t); !st.ok()) return st;
  auto horizon = CommonLength(c_t);
  if (!horizon.ok()) return horizon.status();
  // Equal path weights: the heaviest and lightest accepting paths agree.
  auto topo = TopologicalOrder(c_t);
  if (!topo.ok()) return topo.status();
  std::vector<double> hi(c_t.NumStates(), kLogZero);
  std::vector<double> lo(c_t.NumStates(), kInf);
  for (auto it = topo->rbegin(); it != topo->rend(); ++it) {
    const StateId s = *it;
    if (c_t.IsFinal(s)) {
      hi[s] = lo[s] = std::log(c_t.Final(s));
    }
    for (const Arc& arc : c_t.Arcs(s)) {
      if (arc.weight <= 0.0 || hi[arc.dest] == kLogZero) continue;
      const double lw = std::log(arc.weight);
      hi[s] = std::max(hi[s], lw + hi[arc.dest]);
      lo[s] = std::min(lo[s], lw + lo[arc.dest]);
    }
  }
  const StateId init = c_t.initial();
  if (hi[init] - lo[init] > 1e-9 * std::max(1.0, std::fabs(hi[init]))) {
    return absl::InvalidArgumentError(
        "closed form needs equal weights on all accepting paths");
  }
  auto counts = MinSymbolCounts(c_t);
  if (!counts.ok()) return counts.status();
  const int t = *horizon;
  double q[2];
  double score[2];
  for (int j = 0; j < 2; ++j) {
    const int nj = (*counts)[j];
    q[j] = nj >= t ? 1.0 : [&] {
      const double r = std::max(1.0, static_cast<double>(nj) / (t - nj));
      return r / (1.0 + r);
    }();
    score[j] = (nj > 0 ? nj * std::log(q[j]) : 0.0) +
               (t - nj > 0 ? (t - nj) * std::log1p(-q[j]) : 0.0);
  }
  const int j_star = score[1] > score[0] ? 1 : 0;
  auto m = NGramModel::Uniform(c_t.symbols(), 1);
  if (!m.ok()) return m.status();
  m->SetWeight(0, j_star, q[j_star]);
  m->SetWeight(0, 1 - j_star, 1.0 - q[j_star]);
  return m;
}

absl::StatusOr<ModelSelectResult> ModelSelect(const Wfa& c_t, int tau,
                                              int64_t budget,
                                              const ProdEgOptions& options) {
  if (tau < 1) return absl::InvalidArgumentError("tau must be >= 1");
  const int num_symbols = c_t.alphabet_size();
  if (budget < num_symbols) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget ", budget, " is below |Sigma| = ", num_symbols));
  }
  auto horizon = CommonLength(c_t);
  if (!horizon.ok()) return horizon.status();
  const int t = std::max(1, *horizon);
  const double target = std::sqrt(static_cast<double>(t));
  const double log_budget = std::log(static_cast<double>(budget));
  auto within_budget = [&](int n) {
    return LogNGramOrderSize(num_symbols, n) <= log_budget + 1e-12;
  };

  ModelSelectResult out;
  // Doubling phase, evaluating F on the running average after every update.
  int n = 1;
  auto solver = ProdEgSolver::Create(c_t, n, options);
  if (!solver.ok()) return solver.status();
  int s = 0;
  while (s <= tau) {
    if (auto st = solver->Update(); !st.ok()) return st;
    ++s;
    auto f = RenyiDivergenceInf(c_t, solver->Average());
    if (!f.ok()) return f.status();
    const double delta =
        NGramGapBound(num_symbols, n, t, solver->sum_sup_norms());
    if (f->value - delta > target && within_budget(n) && n < t) {
      out.probes.push_back({n, s, f->value, delta, false});
      n = std::min(2 * n, t);
      s = 0;
      solver = ProdEgSolver::Create(c_t, n, options);
      if (!solver.ok()) return solver.status();
    }
  }
  out.max_order = n;

  // Binary search for the smallest feasible order with tau iterations each.
  std::map<int, std::pair<ProdEgResult, double>> runs;
  auto run = [&](int order) -> absl::StatusOr<bool> {
    auto it = runs.find(order);
    if (it == runs.end()) {
      auto r = ProdEg(c_t, order, tau, options);
      if (!r.ok()) return r.status();
      const double delta =
          NGramGapBound(num_symbols, order, t, r->sum_sup_norms);
      it = runs.emplace(order, std::make_pair(*std::move(r), delta)).first;
      const bool ok = it->second.first.objective - delta <= target;
      out.probes.push_back({order, tau, it->second.first.objective, delta, ok});
    }
    return it->second.first.objective - it->second.second <= target;
  };
  int lo = 1;
  int hi = out.max_order;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    auto ok = run(mid);
    if (!ok.ok()) return ok.status();
    if (*ok) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  auto ok = run(lo);
  if (!ok.ok()) return ok.status();
  out.budget_exhausted = !*ok;
  const int chosen = out.budget_exhausted ? 1 : lo;
  auto r = run(chosen);
  if (!r.ok()) return r.status();
  const auto& [result, delta] = runs.at(chosen);
  out.model = result.model;
  out.order = chosen;
  out.objective = result.objective;
  out.gap_bound = delta;
  return out;
}

}  // namespace wfa_hedge
