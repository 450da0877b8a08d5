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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "afs/losses.hpp"
#include "afs/model.hpp"
#include "afs/sample.hpp"

namespace afs {

/// a(i, j): accuracy on task j's test set after training through task i.
/// Only the lower triangle (j <= i) is meaningful. Indices are 1-based to
/// match the usual notation; storage is 0-based.
class AccuracyMatrix {
 public:
  AccuracyMatrix() = default;
  explicit AccuracyMatrix(std::size_t num_tasks);
  /// Builds from lower-triangular rows: rows[i] holds a(i+1, 1..i+1).
  static AccuracyMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t num_tasks() const { return num_tasks_; }
  void set(std::size_t i, std::size_t j, double accuracy);
  double at(std::size_t i, std::size_t j) const;
  bool has(std::size_t i, std::size_t j) const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t num_tasks_ = 0;
  std::vector<std::optional<double>> cells_;
};

double average_accuracy(const AccuracyMatrix& m, std::size_t T);
double average_forgetting(const AccuracyMatrix& m, std::size_t T);
double average_intransigence(const AccuracyMatrix& m, std::span<const double> reference);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Two-sided Student-t quantile t_{0.975, dof}. Tabulated for dof <= 30,
/// normal approximation (1.959964) above.
double t_quantile_975(std::size_t dof);

/// mean +- t_{0.975, n-1} * s / sqrt(n), s the sample standard deviation.
ConfidenceInterval confidence_interval(std::span<const double> values);

/// Task-recency bias snapshot for one task boundary.
struct DiagnosticsRecord {
  std::size_t task = 0;             // 1-based task just finished
  double mean_weight_old = 0.0;     // head rows + bias, averaged over old classes
  double mean_weight_new = 0.0;
  double mean_logit_old = 0.0;      // logits z_k, k in group, pooled over samples
  double mean_logit_new = 0.0;
  std::array<std::size_t, 3> interval_counts{};  // indexed by DifficultyInterval

  std::size_t count(DifficultyInterval i) const {
    return interval_counts[static_cast<std::size_t>(i)];
  }
};

/// `samples` are scanned for logits; difficulty counts cover only those whose
/// label is in `new_classes`.
DiagnosticsRecord bias_diagnostics(const NetworkState& model, std::span<const Sample> samples,
                                   std::span<const std::size_t> old_classes,
                                   std::span<const std::size_t> new_classes);

}  // namespace afs
