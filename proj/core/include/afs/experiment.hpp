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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afs/metrics.hpp"
#include "afs/stream.hpp"
#include "afs/trainer.hpp"

namespace afs {

/// Which training procedure a run uses.
///
/// kAfs and kEr are the full method and plain replay. kAblation composes a
/// classification term, an optional regulariser and an optional review pass
/// on top of the ablation baseline (replay with large retrieval, augmentation
/// and review, trained with cross-entropy).
struct MethodSpec {
  enum class Kind { kAfs, kEr, kAblation, kOffline };
  Kind kind = Kind::kAfs;
  ClassTerm cls = ClassTerm::kCrossEntropy;
  RegTerm reg = RegTerm::kNone;
  bool review = true;

  /// "afs", "er", "offline", or "ablation:<cls>,<reg>,<rv|norv>" with
  /// cls in {ce, fl, rfl} and reg in {none, lsr, vkd}.
  static MethodSpec parse(const std::string& text);
  /// Run label, e.g. "afs", "er", "baseline+rfl+vkd", "baseline+fl-norv".
  std::string label() const;
  /// Canonical text accepted by parse().
  std::string to_string() const;
};

struct ExperimentConfig {
  enum class Source { kSynthetic, kIdx };
  Source source = Source::kSynthetic;
  SyntheticConfig synthetic;
  std::string idx_train_images, idx_train_labels, idx_test_images, idx_test_labels;
  std::size_t idx_num_classes = 0;

  std::size_t num_tasks = 5;
  std::size_t memory = 200;
  std::vector<std::size_t> hidden{64};
  MethodSpec method;
  TrainConfig train;
  std::size_t offline_epochs = 5;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::string out_dir;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys are rejected.
///
/// Keys: dataset (synthetic|idx), synthetic.classes, synthetic.dim,
/// synthetic.train_per_class, synthetic.test_per_class, synthetic.spread,
/// synthetic.seed, idx.train_images, idx.train_labels, idx.test_images,
/// idx.test_labels, idx.num_classes, num_tasks, memory, hidden (comma list),
/// method, runs, seed, out, offline_epochs, stream_batch, retrieve_batch, lr,
/// rv_lr, rv_batch, rv_every, augment (none|image|vector), jitter_sigma,
/// crop_padding, alpha, gamma, mu, sigma, beta, temperature, epsilon.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
/// Applies one key/value pair; used by the parser and for CLI overrides.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Metrics after task `task` (1-based): A, F (absent for task 1) and I.
struct TaskMetrics {
  std::size_t task = 0;
  double average_accuracy = 0.0;
  std::optional<double> forgetting;
  double intransigence = 0.0;
};

struct RunResult {
  std::string method;
  std::size_t memory = 0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> accuracy;  // lower-triangular rows
  std::vector<double> reference;              // a_j*
  std::vector<TaskMetrics> metrics;
  std::vector<DiagnosticsRecord> diagnostics;
  double wall_time = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> half_width;  // absent with a single run
};

struct ExperimentReport {
  std::string method;
  std::size_t memory = 0;
  std::vector<RunResult> runs;
  bool partial = false;
  std::string failure;

  MetricSummary accuracy() const;
  MetricSummary forgetting() const;
  MetricSummary intransigence() const;
};

/// Builds the benchmark described by the config (synthetic or IDX).
ContinualBenchmark make_benchmark(const ExperimentConfig& config);

/// One seeded run: the configured method plus the intransigence reference.
RunResult run_single(const ExperimentConfig& config, const ContinualBenchmark& bench,
                     std::size_t run_index);

/// Runs config.runs seeds (seed + run index). A failing run stops the
/// experiment; completed runs are kept and the report is flagged partial.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Per-task metrics derived from an accuracy matrix and reference accuracies.
std::vector<TaskMetrics> task_metrics(const AccuracyMatrix& matrix, const std::vector<double>& reference);

enum class ReportFormat { kCsv, kJson };

/// CSV: runs.csv, accuracy.csv, diagnostics.csv, summary.csv.
/// JSON: report.json holding the same data.
/// A partial report additionally gets a PARTIAL marker file.
void emit_report(const ExperimentReport& report, ReportFormat format, const std::string& dir);

/// Serialises the full report (lossless doubles) and reads it back.
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

// CSV headers, exposed for consumers and tests.
inline constexpr const char* kRunsCsvHeader = "method,memory,run,task,A_T,F_T,I_T,wall_time";
inline constexpr const char* kDiagnosticsCsvHeader =
    "method,run,task,mean_weight_old,mean_weight_new,mean_logit_old,mean_logit_new,hsi,asi,esi";
inline constexpr const char* kAccuracyCsvHeader = "method,run,i,j,accuracy";
inline constexpr const char* kSummaryCsvHeader =
    "method,memory,runs,A_mean,A_ci,F_mean,F_ci,I_mean,I_ci";

}  // namespace afs
