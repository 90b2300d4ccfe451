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

// Seeded loss streams and awake sets, and their CSV forms.

#ifndef WFA_HEDGE_LOSSES_H_
#define WFA_HEDGE_LOSSES_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "wfa_hedge/awm.h"
#include "wfa_hedge/sleeping.h"
#include "wfa_hedge/wfa.h"

namespace wfa_hedge {

// T rows of N losses in [0, 1].
using LossStream = std::vector<std::vector<double>>;

absl::Status ValidateLosses(const LossStream& losses, int num_experts,
                            int horizon);

// Independent uniform [0, 1] losses.
absl::StatusOr<LossStream> GenIidUniform(int num_experts, int horizon,
                                         Rng& rng);

// Rounds are cut into segments of `segment_length`; each segment draws one
// good expert uniformly. Losses are Bernoulli(low_mean) for the good expert
// and Bernoulli(high_mean) for the others.
absl::StatusOr<LossStream> GenPiecewiseStationary(int num_experts, int horizon,
                                                  int segment_length,
                                                  double low_mean,
                                                  double high_mean, Rng& rng);

// Loss 0 on target[t] and uniform [0, 1] elsewhere, so the target sequence
// has total loss 0.
absl::StatusOr<LossStream> GenAdversarialBestPath(
    int num_experts, const std::vector<Label>& target, Rng& rng);

// Uniformly placed shift positions, each moving to a different expert drawn
// uniformly; the first expert is uniform.
absl::StatusOr<std::vector<Label>> RandomKShiftSequence(int num_experts, int k,
                                                        int horizon, Rng& rng);

// Each expert awake with probability `p`; a uniformly drawn expert is forced
// awake when the draw leaves none.
std::vector<AwakeSet> GenRandomAwakeSets(int num_experts, int horizon, double p,
                                         Rng& rng);

// One row per round, comma separated, %.17g.
void WriteLossCsv(const LossStream& losses, std::ostream& out);
absl::StatusOr<LossStream> ReadLossCsv(std::istream& in);

// One row per round: either a bit string ("1011", expert 0 first) or
// space-separated symbol names.
void WriteAwakeCsv(const std::vector<AwakeSet>& awake, std::ostream& out);
absl::StatusOr<std::vector<AwakeSet>> ReadAwakeCsv(std::istream& in,
                                                   const SymbolTable& symbols);

}  // namespace wfa_hedge

#endif  // WFA_HEDGE_LOSSES_H_
