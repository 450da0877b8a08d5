// Copyright 2026 The AFS-Lab Authors.
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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "afs/losses.hpp"

namespace {

std::vector<double> random_logits(std::size_t n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> d(0.0, 2.0);
  std::vector<double> z(n);
  for (double& v : z) v = d(rng);
  return z;
}

void BM_CrossEntropy(benchmark::State& state) {
  const auto z = random_logits(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(afs::ce_loss(z, 3));
}
BENCHMARK(BM_CrossEntropy)->Arg(10)->Arg(100);

void BM_RevisedFocal(benchmark::State& state) {
  const auto z = random_logits(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(afs::rfl_loss(z, 3, 0.25, 0.3, 0.5));
}
BENCHMARK(BM_RevisedFocal)->Arg(10)->Arg(100);

void BM_AfsLoss(benchmark::State& state) {
  const auto z = random_logits(static_cast<std::size_t>(state.range(0)));
  afs::LossConfig cfg;
  cfg.num_classes = z.size();
  for (auto _ : state) benchmark::DoNotOptimize(afs::afs_loss(z, 3, cfg));
}
BENCHMARK(BM_AfsLoss)->Arg(10)->Arg(100);

}  // namespace
