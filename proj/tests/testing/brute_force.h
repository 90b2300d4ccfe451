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

// Enumeration oracles shared by the unit and acceptance tests. They only use
// the Wfa container, never the algorithms under test.

#ifndef WFA_HEDGE_TESTS_TESTING_BRUTE_FORCE_H_
#define WFA_HEDGE_TESTS_TESTING_BRUTE_FORCE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "wfa_hedge/wfa.h"

namespace wfa_hedge::testing {

using Sequence = std::vector<Label>;
using Matrix = std::vector<std::vector<double>>;

// All strings of `length` symbols over {0..n-1}, in lexicographic order.
inline std::vector<Sequence> AllStrings(int n, int length) {
  std::vector<Sequence> out;
  Sequence x(length, 0);
  while (true) {
    out.push_back(x);
    int i = length - 1;
    while (i >= 0 && x[i] == n - 1) x[i--] = 0;
    if (i < 0) break;
    ++x[i];
  }
  return out;
}

// All strings of length 0..max_length.
inline std::vector<Sequence> AllStringsUpTo(int n, int max_length) {
  std::vector<Sequence> out;
  for (int len = 0; len <= max_length; ++len) {
    for (Sequence& x : AllStrings(n, len)) out.push_back(std::move(x));
  }
  return out;
}

// Sum over all paths labeled x, following failure arcs when a state lacks an
// arc for the next symbol. Final weights are read at the state reached.
inline double BruteEvaluate(const Wfa& a, const Sequence& x) {
  if (a.initial() == kNoState) return 0.0;
  std::map<StateId, double> frontier = {{a.initial(), 1.0}};
  for (Label sym : x) {
    std::map<StateId, double> next;
    for (auto [s, w] : frontier) {
      StateId q = s;
      double weight = w;
      for (int guard = 0; guard <= a.NumStates(); ++guard) {
        bool matched = false;
        for (const Arc& arc : a.Arcs(q)) {
          if (arc.label == sym) {
            next[arc.dest] += weight * arc.weight;
            matched = true;
          }
        }
        if (matched) break;
        const Arc* phi = nullptr;
        for (const Arc& arc : a.Arcs(q)) {
          if (arc.label == kPhiLabel) phi = &arc;
        }
        if (phi == nullptr) break;
        weight *= phi->weight;
        q = phi->dest;
      }
    }
    frontier = std::move(next);
  }
  double total = 0.0;
  for (auto [s, w] : frontier) total += w * a.Final(s);
  return total;
}

struct Support {
  std::vector<Sequence> paths;
  std::vector<double> weights;

  double Total() const {
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
  }
};

// Positive-weight strings of the given length.
inline Support BruteSupport(const Wfa& a, int length) {
  Support s;
  for (Sequence& x : AllStrings(a.alphabet_size(), length)) {
    const double w = BruteEvaluate(a, x);
    if (w > 0.0) {
      s.paths.push_back(std::move(x));
      s.weights.push_back(w);
    }
  }
  return s;
}

// Exponentiated weights over explicit paths with prior weight^eta. Returns
// p_1 .. p_T.
inline Matrix BruteAwm(const Support& s, const Matrix& losses, double eta,
                       int num_experts) {
  const int horizon = losses.size();
  std::vector<double> log_w(s.paths.size());
  for (size_t i = 0; i < s.paths.size(); ++i) {
    log_w[i] = eta * std::log(s.weights[i]);
  }
  Matrix out;
  for (int t = 0; t < horizon; ++t) {
    const double m = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> p(num_experts, 0.0);
    double z = 0.0;
    for (size_t i = 0; i < s.paths.size(); ++i) {
      const double w = std::exp(log_w[i] - m);
      p[s.paths[i][t]] += w;
      z += w;
    }
    for (double& v : p) v /= z;
    out.push_back(p);
    for (size_t i = 0; i < s.paths.size(); ++i) {
      log_w[i] -= eta * losses[t][s.paths[i][t]];
    }
  }
  return out;
}

// Sleeping variant: awake paths are reweighted by exp(-eta l) and rescaled to
// keep their total mass; the returned rows are the awake distributions p^A.
inline Matrix BruteAwakeAwm(const Support& s, const Matrix& losses,
                            const std::vector<std::vector<bool>>& awake,
                            double eta, int num_experts,
                            Matrix* unrestricted = nullptr) {
  const int horizon = losses.size();
  std::vector<double> w(s.paths.size());
  for (size_t i = 0; i < s.paths.size(); ++i) {
    w[i] = std::pow(s.weights[i], eta);
  }
  Matrix out;
  for (int t = 0; t < horizon; ++t) {
    double total = 0.0;
    for (double v : w) total += v;
    std::vector<double> p(num_experts, 0.0);
    for (size_t i = 0; i < s.paths.size(); ++i) p[s.paths[i][t]] += w[i];
    if (unrestricted != nullptr) {
      std::vector<double> u = p;
      for (double& v : u) v /= total;
      unrestricted->push_back(u);
    }
    double awake_mass = 0.0;
    for (int a = 0; a < num_experts; ++a) {
      if (awake[t][a]) awake_mass += p[a];
    }
    std::vector<double> pa(num_experts, 0.0);
    for (int a = 0; a < num_experts; ++a) {
      if (awake[t][a]) pa[a] = p[a] / awake_mass;
    }
    out.push_back(pa);
    double after = 0.0;
    for (size_t i = 0; i < s.paths.size(); ++i) {
      const Label a = s.paths[i][t];
      if (!awake[t][a]) continue;
      w[i] *= std::exp(-eta * losses[t][a]);
      after += w[i];
    }
    for (size_t i = 0; i < s.paths.size(); ++i) {
      if (awake[t][s.paths[i][t]]) w[i] *= awake_mass / after;
    }
  }
  return out;
}

inline double AlgorithmLoss(const Matrix& p, const Matrix& losses) {
  double total = 0.0;
  for (size_t t = 0; t < losses.size(); ++t) {
    for (size_t a = 0; a < losses[t].size(); ++a) {
      total += p[t][a] * losses[t][a];
    }
  }
  return total;
}

inline double PathLoss(const Sequence& x, const Matrix& losses) {
  double total = 0.0;
  for (size_t t = 0; t < x.size(); ++t) total += losses[t][x[t]];
  return total;
}

// max_x  L_alg - L(x) + use_weights * log(q(x) K).
inline double BruteRegret(const Support& s, const Matrix& p,
                          const Matrix& losses, bool use_weights) {
  const double alg = AlgorithmLoss(p, losses);
  const double total = s.Total();
  const double k = s.paths.size();
  double best = -INFINITY;
  for (size_t i = 0; i < s.paths.size(); ++i) {
    double v = alg - PathLoss(s.paths[i], losses);
    if (use_weights) v += std::log(s.weights[i] / total * k);
    best = std::max(best, v);
  }
  return best;
}

// Deterministic prefix tree accepting exactly `strings`, each with weight 1.
inline Wfa TrieWfa(const std::vector<Sequence>& strings, int num_symbols) {
  Wfa a(SymbolTable::Alphabetic(num_symbols));
  a.SetInitial(a.AddState());
  for (const Sequence& x : strings) {
    StateId q = 0;
    for (Label l : x) {
      const Arc* arc = a.FindArc(q, l);
      if (arc == nullptr) {
        const StateId next = a.AddState();
        a.AddArc(q, Arc{l, 1.0, next});
        q = next;
      } else {
        q = arc->dest;
      }
    }
    a.SetFinal(q, 1.0);
  }
  return a;
}

inline Matrix RandomLosses(int num_experts, int horizon, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix out(horizon, std::vector<double>(num_experts));
  for (auto& row : out) {
    for (double& v : row) v = u(rng);
  }
  return out;
}

struct RandomWfaOptions {
  int num_symbols = 3;
  int num_states = 5;
  // Probability of an arc for each (state, symbol).
  double arc_probability = 0.6;
  double final_probability = 0.5;
  // Arcs only go to higher state ids.
  bool acyclic = false;
  // Draw weights from a few values so that arcs can be shared.
  bool coarse_weights = false;
};

// Deterministic automaton with state 0 initial.
inline Wfa RandomWfa(const RandomWfaOptions& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Wfa a(SymbolTable::Alphabetic(o.num_symbols));
  a.AddStates(o.num_states);
  a.SetInitial(0);
  auto weight = [&]() {
    if (o.coarse_weights) return 0.25 * (1 + static_cast<int>(u(rng) * 3));
    return 0.1 + 0.9 * u(rng);
  };
  for (StateId s = 0; s < o.num_states; ++s) {
    for (Label l = 0; l < o.num_symbols; ++l) {
      if (u(rng) >= o.arc_probability) continue;
      const int lo = o.acyclic ? s + 1 : 0;
      if (lo >= o.num_states) continue;
      std::uniform_int_distribution<int> dest(lo, o.num_states - 1);
      a.AddArc(s, Arc{l, weight(), dest(rng)});
    }
    if (u(rng) < o.final_probability || s == o.num_states - 1) {
      a.SetFinal(s, weight());
    }
  }
  return a;
}

// Random automaton where most states copy a common row of arcs, possibly
// with one arc altered, so that conversion has something to share.
inline Wfa RandomSharedRows(std::mt19937_64& rng) {
  RandomWfaOptions opts;
  opts.num_states = 6;
  opts.arc_probability = 0.8;
  opts.coarse_weights = true;
  Wfa a = RandomWfa(opts, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<Arc> row = a.Arcs(1);
  for (StateId s = 2; s < a.NumStates(); ++s) {
    if (u(rng) < 0.3) continue;
    std::vector<Arc> copy = row;
    if (!copy.empty() && u(rng) < 0.5) {
      copy[static_cast<int>(u(rng) * copy.size())].dest =
          static_cast<int>(u(rng) * a.NumStates());
    }
    *a.MutableArcs(s) = copy;
  }
  return a;
}

// Adds failure arcs on a random subset of states, all pointing to lower ids
// or, with `forward`, all to higher ids, so phi never cycles.
inline Wfa AddRandomPhi(Wfa a, double probability, std::mt19937_64& rng,
                        bool forward = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = a.NumStates();
  for (StateId s = 0; s < n; ++s) {
    if (u(rng) >= probability) continue;
    if (forward ? s + 1 >= n : s == 0) continue;
    std::uniform_int_distribution<int> dest(forward ? s + 1 : 0,
                                            forward ? n - 1 : s - 1);
    a.AddArc(s, Arc{kPhiLabel, 0.2 + 0.8 * u(rng), dest(rng)});
  }
  return a;
}

}  // namespace wfa_hedge::testing

#endif  // WFA_HEDGE_TESTS_TESTING_BRUTE_FORCE_H_
