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

#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "wfa_hedge/approx.h"
#include "wfa_hedge/awm.h"
#include "wfa_hedge/ngram.h"
#include "wfa_hedge/phi_wfa.h"
#include "wfa_hedge/wfa_ops.h"

namespace wfa_hedge {
namespace {

constexpr int kHorizon = 64;

std::vector<std::vector<double>> Losses(int n, int horizon) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> out(horizon, std::vector<double>(n));
  for (auto& row : out) {
    for (double& v : row) v = u(rng);
  }
  return out;
}

// Bigram model of the k-shift competitor: dense rows sharing a default.
Wfa SharedRowModel(int n) {
  return NGramToWfa(*MlBigramKShiftClosedForm(n, 2, kHorizon));
}

void BM_AwmStepPlain(benchmark::State& state) {
  const int n = state.range(0);
  const Wfa c = SharedRowModel(n);
  const auto losses = Losses(n, kHorizon);
  for (auto _ : state) {
    state.PauseTiming();
    auto awm = *AwmState::Init(c, kHorizon, 0.3);
    state.ResumeTiming();
    for (const auto& l : losses) benchmark::DoNotOptimize(awm.Step(l));
  }
  state.SetItemsProcessed(state.iterations() * kHorizon);
}
BENCHMARK(BM_AwmStepPlain)->RangeMultiplier(2)->Range(4, 64);

void BM_AwmStepPhi(benchmark::State& state) {
  const int n = state.range(0);
  PhiConvertOptions opts;
  opts.shadowing = true;
  const PhiWfa c = *PhiConvert(SharedRowModel(n), opts);
  const auto losses = Losses(n, kHorizon);
  for (auto _ : state) {
    state.PauseTiming();
    auto awm = *AwmState::InitPhi(c, kHorizon, 0.3);
    state.ResumeTiming();
    for (const auto& l : losses) benchmark::DoNotOptimize(awm.Step(l));
  }
  state.SetItemsProcessed(state.iterations() * kHorizon);
}
BENCHMARK(BM_AwmStepPhi)->RangeMultiplier(2)->Range(4, 64);

void BM_IntersectLength(benchmark::State& state) {
  const int horizon = state.range(0);
  const Wfa c = *BuildKShift(4, 3);
  const Wfa len = *BuildLengthAutomaton(4, horizon);
  for (auto _ : state) benchmark::DoNotOptimize(Intersect(c, len));
}
BENCHMARK(BM_IntersectLength)->RangeMultiplier(4)->Range(16, 1024);

void BM_WeightPush(benchmark::State& state) {
  const int horizon = state.range(0);
  const Wfa c_t =
      *Intersect(*BuildKShift(4, 3), *BuildLengthAutomaton(4, horizon));
  for (auto _ : state) benchmark::DoNotOptimize(WeightPush(c_t));
}
BENCHMARK(BM_WeightPush)->RangeMultiplier(4)->Range(16, 1024);

}  // namespace
}  // namespace wfa_hedge

BENCHMARK_MAIN();
