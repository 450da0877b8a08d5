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

#include "afs/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "afs/error.hpp"

namespace afs {
namespace {

std::vector<std::size_t> classes_before(const TaskSplit& split, std::size_t task) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < task; ++t) out.insert(out.end(), split.tasks[t].begin(), split.tasks[t].end());
  return out;
}

void check_dimensions(const NetworkState& model, const ContinualBenchmark& bench,
                      const TrainConfig& config) {
  if (model.input_dim() != bench.train.dim()) throw InvalidInput("trainer: model input width != data width");
  if (model.num_classes() != bench.train.num_classes) throw InvalidInput("trainer: model class count != data class count");
  if (config.loss.num_classes != model.num_classes()) throw InvalidInput("trainer: LossConfig.num_classes != model class count");
  if (bench.split.num_tasks() == 0) throw InvalidInput("trainer: no tasks");
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::size_t task) {
  return seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull * (task + 1);
}

void TrainConfig::validate() const {
  if (stream_batch == 0) throw InvalidConfig("TrainConfig: stream_batch must be >= 1");
  if (rv_batch == 0) throw InvalidConfig("TrainConfig: rv_batch must be >= 1");
  if (!(lr > 0.0)) throw InvalidConfig("TrainConfig: lr must be > 0");
  if (!(rv_lr >= 0.0)) throw InvalidConfig("TrainConfig: rv_lr must be >= 0");
  if (rv_every && *rv_every == 0) throw InvalidConfig("TrainConfig: rv_every must be >= 1");
  loss.validate();
}

double evaluate(const NetworkState& model, const Dataset& test_set) {
  if (test_set.samples.empty()) throw InvalidInput("evaluate: empty test set");
  std::size_t correct = 0;
  for (const Sample& s : test_set.samples) {
    if (predict(model, s.features) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.samples.size());
}

double train_step(NetworkState& model, std::span<const Sample> batch, const LossRecipe& recipe,
                  const LossConfig& loss, double lr, const MuSchedule* mu) {
  if (batch.empty()) return 0.0;
  NetworkGradients grads = model.zeros_like();
  const double scale = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  for (const Sample& s : batch) {
    const ForwardResult fr = forward(model, s.features);
    const double sample_mu = mu ? mu->mu(s.label) : loss.mu;
    const LossOutput out = combined_loss(fr.logits, s.label, recipe, loss, sample_mu);
    total += out.value;
    accumulate_backward(model, fr.trace, out.grad_logits, scale, grads);
  }
  sgd_step(model, grads, lr);
  return total * scale;
}

std::size_t review_pass(NetworkState& model, const MemoryBuffer& memory, double rv_lr,
                        std::size_t rv_batch, const LossConfig& loss, Rng& rng) {
  if (memory.empty()) return 0;
  if (rv_batch == 0) throw InvalidConfig("review_pass: rv_batch must be >= 1");
  const auto slots = memory.slots();
  std::vector<std::size_t> order(slots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  constexpr LossRecipe kReviewRecipe{ClassTerm::kRevisedFocal, RegTerm::kNone};
  std::size_t steps = 0;
  std::vector<Sample> batch;
  for (std::size_t start = 0; start < order.size(); start += rv_batch) {
    batch.clear();
    const std::size_t stop = std::min(order.size(), start + rv_batch);
    for (std::size_t i = start; i < stop; ++i) batch.push_back(slots[order[i]]);
    train_step(model, batch, kReviewRecipe, loss, rv_lr);
    ++steps;
  }
  return steps;
}

RunRecord train_replay(NetworkState& model, MemoryBuffer& memory, const ContinualBenchmark& bench,
                       const TrainConfig& config) {
  config.validate();
  check_dimensions(model, bench, config);
  const auto started = std::chrono::steady_clock::now();

  Rng rng(config.seed);
  RunRecord record;
  record.accuracy = AccuracyMatrix(bench.num_tasks());
  std::size_t iteration = 0;

  std::vector<Dataset> test_sets;
  for (std::size_t t = 0; t < bench.num_tasks(); ++t) test_sets.push_back(bench.test_set(t));

  for (std::size_t task = 0; task < bench.num_tasks(); ++task) {
    const auto stream = batches(bench.train, bench.split, task, config.stream_batch,
                                stream_seed(config.seed, task));
    for (const StreamBatch& b : stream) {
      std::vector<Sample> joint = b.samples;
      if (config.retrieve_batch > 0) {
        const auto replay = memory.random_retrieve(config.retrieve_batch, rng);
        joint.insert(joint.end(), replay.begin(), replay.end());
        if (config.augment.kind != AugmentKind::kNone && !replay.empty()) {
          const auto augmented = augment(replay, config.augment, rng);
          joint.insert(joint.end(), augmented.begin(), augmented.end());
        }
      }
      train_step(model, joint, config.recipe, config.loss, config.lr);
      ++record.sgd_steps;
      memory.reservoir_update(b.samples, rng);
      ++iteration;
      if (config.review && config.rv_every && iteration % *config.rv_every == 0) {
        record.review_steps += review_pass(model, memory, config.rv_lr, config.rv_batch, config.loss, rng);
      }
    }
    if (config.review && !config.rv_every) {
      record.review_steps += review_pass(model, memory, config.rv_lr, config.rv_batch, config.loss, rng);
    }

    for (std::size_t j = 0; j <= task; ++j) {
      record.accuracy.set(task + 1, j + 1, evaluate(model, test_sets[j]));
    }
    if (task > 0) {
      const auto old_classes = classes_before(bench.split, task);
      const auto& new_classes = bench.split.tasks[task];
      const Dataset scanned = bench.train.subset(new_classes);
      DiagnosticsRecord diag = bias_diagnostics(model, scanned.samples, old_classes, new_classes);
      diag.task = task + 1;
      record.diagnostics.push_back(diag);
    }
  }

  record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

RunRecord train_afs(NetworkState& model, MemoryBuffer& memory, const ContinualBenchmark& bench,
                    TrainConfig config) {
  config.recipe = kAfsRecipe;
  return train_replay(model, memory, bench, config);
}

RunRecord train_er_baseline(NetworkState& model, MemoryBuffer& memory,
                            const ContinualBenchmark& bench, TrainConfig config) {
  config.recipe = kCrossEntropyRecipe;
  config.augment.kind = AugmentKind::kNone;
  config.review = false;
  return train_replay(model, memory, bench, config);
}

std::vector<double> train_reference(const NetworkSpec& spec, const ContinualBenchmark& bench,
                                    const TrainConfig& config) {
  config.validate();
  NetworkState model = init_network(spec);
  check_dimensions(model, bench, config);
  std::vector<double> reference;
  for (std::size_t task = 0; task < bench.num_tasks(); ++task) {
    const auto stream = batches(bench.train, bench.split, task, config.stream_batch,
                                stream_seed(config.seed, task));
    for (const StreamBatch& b : stream) {
      train_step(model, b.samples, kCrossEntropyRecipe, config.loss, config.lr);
    }
    reference.push_back(evaluate(model, bench.test_set(task)));
  }
  return reference;
}

void train_offline(NetworkState& model, const Dataset& train, std::size_t epochs,
                   const TrainConfig& config, MuSchedule* schedule) {
  config.validate();
  if (train.samples.empty()) throw InvalidInput("train_offline: empty training set");
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::optional<ScoreHistogram> hist;
  if (schedule) hist.emplace(model.num_classes());

  std::vector<Sample> batch;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    if (hist) hist->reset_epoch();
    for (std::size_t start = 0; start < order.size(); start += config.stream_batch) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + config.stream_batch);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(train.samples[order[i]]);
      if (hist) {
        // Scores come from the same forward pass state the step starts from.
        for (const Sample& s : batch) {
          const double pt = softmax_stable(logits_of(model, s.features))[s.label];
          hist->record_scores(s.label, std::span<const double>(&pt, 1));
        }
      }
      train_step(model, batch, config.recipe, config.loss, config.lr, schedule);
    }
    if (schedule) schedule->update(*hist);
  }
}

}  // namespace afs
