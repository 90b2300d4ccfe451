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

// n-gram approximation of a competitor automaton C_T.
//
// q is the distribution C_T(x) / sum C_T over its support and q_w the
// distribution of an n-gram model over sequences of the same length. The
// approximation quality is D_inf(q || q_w) = max_{q(x) > 0} log q(x)/q_w(x).

#ifndef WFA_HEDGE_APPROX_H_
#define WFA_HEDGE_APPROX_H_

#include <cstdint>
#include <memory>
#include <vector>

#include "absl/status/statusor.h"
#include "wfa_hedge/ngram.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {
namespace internal {
struct ContextGraph;
}  // namespace internal

struct DivergenceValue {
  // +infinity when q_w vanishes on a supported sequence.
  double value;
  std::vector<Label> witness;
};

// Exact D_inf by a max-sum pass over C_T paired with the model contexts.
// The witness is the lexicographically first maximizer.
absl::StatusOr<DivergenceValue> RenyiDivergenceInf(const Wfa& c_t,
                                                   const NGramModel& m);

// Same value by enumerating at most `limit` supported sequences.
absl::StatusOr<DivergenceValue> RenyiDivergenceInfEnumerated(
    const Wfa& c_t, const NGramModel& m, int64_t limit);

// argmax over supp(q) of log q(x)/q_w(x), ties broken lexicographically.
absl::StatusOr<std::vector<Label>> MaxRatioPath(const Wfa& c_t,
                                                const NGramModel& m);

// Relative entropy D(q || q_w).
absl::StatusOr<double> KlDivergence(const Wfa& c_t, const NGramModel& m);

// Same shape as the model rows.
using GradientTable = std::vector<std::vector<double>>;

// Partial derivatives of log q(x)/q_w(x) in the model weights:
// -count_x(ctx, a) / w[a | ctx], zero for n-grams absent from x.
absl::StatusOr<GradientTable> ProdEgSubgradient(const NGramModel& m,
                                                const std::vector<Label>& x);

struct ProdEgOptions {
  enum class Schedule { kAdaptive, kFixed };
  Schedule schedule = Schedule::kAdaptive;
  // Step size for kFixed.
  double eta = 0.1;
  // kAdaptive uses eta_s = c / sqrt(sum_{r <= s} |g_r|_inf^2); c <= 0 selects
  // sqrt(m log N / 2) with m the number of contexts.
  double c = 0.0;
};

// Exponentiated-gradient descent of D_inf over order-n models, one
// multiplicative update per simplex. Starts from the uniform model.
class ProdEgSolver {
 public:
  static absl::StatusOr<ProdEgSolver> Create(const Wfa& c_t, int order,
                                             const ProdEgOptions& options = {});
  ProdEgSolver(ProdEgSolver&&);
  ProdEgSolver& operator=(ProdEgSolver&&);
  ~ProdEgSolver();

  // One iteration: finds the max-ratio path at the current iterate, adds the
  // iterate to the running average and takes the multiplicative step. At an
  // iterate with zero divergence (a global minimum) the step is skipped.
  absl::Status Update();

  int iterations() const { return iterations_; }
  const NGramModel& current() const { return current_; }
  // (1/s) sum_{r <= s} q_r; the uniform model before the first update.
  NGramModel Average() const;

  // sum_r |g_r|_inf and max_r |g_r|_inf over the updates so far.
  double sum_sup_norms() const { return sum_sup_norms_; }
  double max_sup_norm() const { return max_sup_norm_; }
  // Step size used by the last update.
  double last_eta() const { return last_eta_; }
  double c() const { return c_; }

 private:
  ProdEgSolver() = default;

  std::unique_ptr<internal::ContextGraph> graph_;
  ProdEgOptions options_;
  NGramModel current_;
  std::vector<std::vector<double>> sum_;
  int iterations_ = 0;
  double c_ = 0.0;
  double sum_sq_sup_norms_ = 0.0;
  double sum_sup_norms_ = 0.0;
  double max_sup_norm_ = 0.0;
  double last_eta_ = 0.0;
};

struct ProdEgResult {
  // Average iterate and its exact objective.
  NGramModel model;
  double objective;
  // Largest |partial| seen, the L of the convergence bound.
  double max_sup_norm;
  double sum_sup_norms;
  double last_eta;
};

absl::StatusOr<ProdEgResult> ProdEg(const Wfa& c_t, int order, int iterations,
                                    const ProdEgOptions& options = {});

// m log N / (eta tau) + 2 eta L.
double ProdEgGapBound(int num_contexts, int num_symbols, double eta, int tau,
                      double max_partial);

// sqrt(2 N^n log N sum_s |g_s|_inf / ((N - 1) T^2)); 0 when N < 2.
double NGramGapBound(int num_symbols, int order, int horizon,
                     double sum_sup_norms);

struct MlNGramOptions {
  enum class Method { kAuto, kEnumerate, kForwardBackward };
  Method method = Method::kAuto;
  // kAuto enumerates when the support has at most this many sequences.
  int64_t enumeration_limit = 100000;
};

struct MlNGramResult {
  NGramModel model;
  // Contexts with zero expected count; their rows are uniform.
  std::vector<int> zero_count_contexts;
  bool enumerated;
};

// w[a | ctx] = E_q[count(ctx a)] / E_q[count(ctx)], the minimizer of
// D(q || q_w) over order-n models.
absl::StatusOr<MlNGramResult> MlNGram(const Wfa& c_t, int order,
                                      const MlNGramOptions& options = {});

// Maximum-likelihood bigram of the uniform k-shift distribution over
// length-T sequences: stay 1 - k/(T-1), each shift k/((T-1)(N-1)), uniform
// first symbol. Requires T >= k + 2.
absl::StatusOr<NGramModel> MlBigramKShiftClosedForm(int num_experts, int k,
                                                    int horizon);

// D_inf-optimal unigram for a two-symbol C_T with equal path weights, built
// from the smallest occurrence count of each symbol over accepting paths.
absl::StatusOr<NGramModel> UnigramRenyiClosedForm(const Wfa& c_t);

// Smallest number of occurrences of each symbol over accepting paths.
absl::StatusOr<std::vector<int>> MinSymbolCounts(const Wfa& c_t);

struct ModelSelectProbe {
  int order;
  int iterations;
  double objective;
  double gap_bound;
  bool feasible;
};

struct ModelSelectResult {
  NGramModel model;
  int order;
  int max_order;
  double objective;
  double gap_bound;
  // No order in [1, max_order] met the target; `model` is the unigram.
  bool budget_exhausted;
  std::vector<ModelSelectProbe> probes;
};

// Doubling then binary search for the smallest n whose Prod-EG model
// satisfies D_inf - gap_bound <= sqrt(T). Growth stops once N^n exceeds
// `budget`; n never exceeds T. Requires budget >= N.
absl::StatusOr<ModelSelectResult> ModelSelect(
    const Wfa& c_t, int tau, int64_t budget, const ProdEgOptions& options = {});

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_APPROX_H_
