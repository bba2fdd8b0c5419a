// Copyright 2026 The absa-vote Authors.
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "absa/core.hpp"
#include "absa/regress.hpp"
#include "absa/voting.hpp"
#include "test_util.hpp"

namespace {

constexpr std::size_t kAspects = 14;

std::vector<absa::WorkerGroup> MakeGroups(std::size_t n) {
  absa::SeededRng rng(17);
  std::vector<absa::WorkerGroup> groups(n);
  for (auto& g : groups) {
    for (int w = 1; w <= 5; ++w) {
      std::vector<int> values(kAspects);
      for (auto& v : values) v = static_cast<int>(rng.Below(6));
      g.push_back(testutil::MakeWorker(values, w));
    }
  }
  return groups;
}

void BM_VoteBatchSerial(benchmark::State& state) {
  const auto groups = MakeGroups(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(absa::VoteBatchSerial(groups, kAspects));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_VoteBatchParallel(benchmark::State& state) {
  const auto groups = MakeGroups(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(absa::VoteBatch(groups, kAspects));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BicSelectWith(benchmark::State& state, absa::ExecutionPolicy policy) {
  const int noise = static_cast<int>(state.range(0));
  const auto planted = testutil::MakePlanted(1000, {1.0, 0.5, -0.3, 0.2}, noise, 0.1, 5);
  absa::SelectionOptions options;
  options.policy = policy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        absa::BicSelect(planted.design, planted.design.names, options));
  }
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << (noise + 3)));
}

void BM_BicSelectSerial(benchmark::State& state) {
  BicSelectWith(state, absa::ExecutionPolicy::kSerial);
}
void BM_BicSelectParallel(benchmark::State& state) {
  BicSelectWith(state, absa::ExecutionPolicy::kParallel);
}

}  // namespace

BENCHMARK(BM_VoteBatchSerial)->Arg(1000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_VoteBatchParallel)->Arg(1000)->Arg(100000)->UseRealTime();
BENCHMARK(BM_BicSelectSerial)->Arg(4)->Arg(11)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BicSelectParallel)->Arg(4)->Arg(11)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
