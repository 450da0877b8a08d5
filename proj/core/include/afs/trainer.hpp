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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "afs/dynmu.hpp"
#include "afs/losses.hpp"
#include "afs/memory.hpp"
#include "afs/metrics.hpp"
#include "afs/model.hpp"
#include "afs/stream.hpp"

namespace afs {

struct TrainConfig {
  std::size_t stream_batch = 10;
  std::size_t retrieve_batch = 100;
  double lr = 0.1;
  double rv_lr = 0.01;
  std::size_t rv_batch = 10;
  bool review = true;
  /// When set, review every `rv_every` stream iterations instead of at task ends.
  std::optional<std::size_t> rv_every;
  LossConfig loss;
  LossRecipe recipe = kAfsRecipe;
  AugmentConfig augment{AugmentKind::kVector};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Train/test data plus the class-to-task assignment shared by all methods.
struct ContinualBenchmark {
  Dataset train;
  Dataset test;
  TaskSplit split;

  std::size_t num_tasks() const { return split.num_tasks(); }
  Dataset test_set(std::size_t task) const { return test.subset(split.tasks.at(task)); }
};

struct RunRecord {
  AccuracyMatrix accuracy;
  /// One entry per task boundary from task 2 on (task 1 has no old classes).
  std::vector<DiagnosticsRecord> diagnostics;
  /// Iterations skipped or executed, for bookkeeping and tests.
  std::size_t sgd_steps = 0;
  std::size_t review_steps = 0;
  double wall_time = 0.0;
};

/// Shuffle seed of task `task`'s stream for run seed `seed`. Every method uses
/// it, so runs sharing a seed see the same stream order.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t task);

/// Fraction of samples whose argmax over all classes equals the label.
double evaluate(const NetworkState& model, const Dataset& test_set);

/// One SGD step on the mean loss over `batch`. Returns the mean loss value.
double train_step(NetworkState& model, std::span<const Sample> batch, const LossRecipe& recipe,
                  const LossConfig& loss, double lr, const MuSchedule* mu = nullptr);

/// One epoch over a seeded shuffle of all memory slots, revised focal loss only.
/// Returns the number of SGD steps taken (0 for an empty buffer).
std::size_t review_pass(NetworkState& model, const MemoryBuffer& memory, double rv_lr,
                        std::size_t rv_batch, const LossConfig& loss, Rng& rng);

/// Replay training loop. Per stream batch: retrieve from memory, append an
/// augmented copy of the retrieved batch, take one SGD step on the mean loss
/// over stream + replay samples, then reservoir-update memory with the stream
/// batch. Reviews and evaluates after every task.
RunRecord train_replay(NetworkState& model, MemoryBuffer& memory, const ContinualBenchmark& bench,
                       const TrainConfig& config);

/// The full AFS method: train_replay with revised focal + virtual distillation.
RunRecord train_afs(NetworkState& model, MemoryBuffer& memory, const ContinualBenchmark& bench,
                    TrainConfig config);

/// Plain experience replay: cross-entropy, no augmentation, no review.
RunRecord train_er_baseline(NetworkState& model, MemoryBuffer& memory,
                            const ContinualBenchmark& bench, TrainConfig config);

/// Incrementally fine-tuned cross-entropy model without memory; entry j is the
/// accuracy on task j right after training task j.
std::vector<double> train_reference(const NetworkSpec& spec, const ContinualBenchmark& bench,
                                    const TrainConfig& config);

/// Multi-epoch i.i.d. training on pooled data (the offline upper bound).
/// With `schedule` set and a revised focal recipe, mu is taken per class from
/// the schedule and refreshed from a score histogram after every epoch.
void train_offline(NetworkState& model, const Dataset& train, std::size_t epochs,
                   const TrainConfig& config, MuSchedule* schedule = nullptr);

}  // namespace afs
