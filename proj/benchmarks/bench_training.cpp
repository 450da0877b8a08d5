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

#include "afs/memory.hpp"
#include "afs/model.hpp"
#include "afs/stream.hpp"
#include "afs/trainer.hpp"

namespace {

// One AFS iteration: 10 stream + 100 replayed + 100 augmented samples.
void BM_TrainStep(benchmark::State& state) {
  afs::SyntheticConfig sc;
  sc.train_per_class = 30;
  sc.test_per_class = 1;
  const auto data = afs::gen_synthetic(sc).first;
  afs::NetworkState model = afs::init_network({{sc.dim, 64, sc.num_classes}, 1});
  std::vector<afs::Sample> batch(data.samples.begin(), data.samples.begin() + 210);
  afs::LossConfig loss;
  for (auto _ : state) {
    benchmark::DoNotOptimize(afs::train_step(model, batch, afs::kAfsRecipe, loss, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}
BENCHMARK(BM_TrainStep);

void BM_ReservoirUpdate(benchmark::State& state) {
  afs::MemoryBuffer memory(200);
  afs::Rng rng(3);
  std::vector<afs::Sample> batch(10, afs::Sample{std::vector<double>(32, 0.5), 1, 0});
  for (auto _ : state) memory.reservoir_update(batch, rng);
}
BENCHMARK(BM_ReservoirUpdate);

void BM_RandomRetrieve(benchmark::State& state) {
  afs::MemoryBuffer memory(200);
  afs::Rng rng(3);
  std::vector<afs::Sample> batch(200, afs::Sample{std::vector<double>(32, 0.5), 1, 0});
  memory.reservoir_update(batch, rng);
  for (auto _ : state) benchmark::DoNotOptimize(memory.random_retrieve(100, rng));
}
BENCHMARK(BM_RandomRetrieve);

}  // namespace
