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

#include "afs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afs/error.hpp"

namespace afs {

AccuracyMatrix::AccuracyMatrix(std::size_t num_tasks)
    : num_tasks_(num_tasks), cells_(num_tasks * (num_tasks + 1) / 2) {}

AccuracyMatrix AccuracyMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  AccuracyMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != i + 1) throw InvalidInput("AccuracyMatrix: row " + std::to_string(i + 1) + " must have " + std::to_string(i + 1) + " entries");
    for (std::size_t j = 0; j <= i; ++j) m.set(i + 1, j + 1, rows[i][j]);
  }
  return m;
}

std::size_t AccuracyMatrix::index(std::size_t i, std::size_t j) const {
  if (i < 1 || i > num_tasks_ || j < 1 || j > i) {
    throw InvalidInput("AccuracyMatrix: (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") is outside the lower triangle");
  }
  return (i - 1) * i / 2 + (j - 1);
}

void AccuracyMatrix::set(std::size_t i, std::size_t j, double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InvalidInput("AccuracyMatrix: accuracy must lie in [0, 1]");
  cells_[index(i, j)] = accuracy;
}

bool AccuracyMatrix::has(std::size_t i, std::size_t j) const {
  if (i < 1 || i > num_tasks_ || j < 1 || j > i) return false;
  return cells_[index(i, j)].has_value();
}

double AccuracyMatrix::at(std::size_t i, std::size_t j) const {
  const auto& cell = cells_[index(i, j)];
  if (!cell) {
    throw InvalidInput("AccuracyMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is missing");
  }
  return *cell;
}

double average_accuracy(const AccuracyMatrix& m, std::size_t T) {
  if (T < 1 || T > m.num_tasks()) throw InvalidInput("average_accuracy: T out of range");
  double sum = 0.0;
  for (std::size_t j = 1; j <= T; ++j) sum += m.at(T, j);
  return sum / static_cast<double>(T);
}

double average_forgetting(const AccuracyMatrix& m, std::size_t T) {
  if (T < 2) throw UndefinedMetric("average_forgetting: needs at least two tasks");
  if (T > m.num_tasks()) throw InvalidInput("average_forgetting: T out of range");
  double sum = 0.0;
  for (std::size_t j = 1; j < T; ++j) {
    double best = m.at(j, j);
    for (std::size_t l = j + 1; l < T; ++l) best = std::max(best, m.at(l, j));
    sum += best - m.at(T, j);
  }
  return sum / static_cast<double>(T - 1);
}

double average_intransigence(const AccuracyMatrix& m, std::span<const double> reference) {
  if (reference.size() != m.num_tasks() || reference.empty()) {
    throw InvalidInput("average_intransigence: reference length " + std::to_string(reference.size()) +
                       " != task count " + std::to_string(m.num_tasks()));
  }
  double sum = 0.0;
  for (std::size_t j = 1; j <= reference.size(); ++j) sum += reference[j - 1] - m.at(j, j);
  return sum / static_cast<double>(reference.size());
}

double t_quantile_975(std::size_t dof) {
  static constexpr double kTable[] = {
      12.706204736, 4.302652730, 3.182446305, 2.776445105, 2.570581836, 2.446911851,
      2.364624252,  2.306004135, 2.262157163, 2.228138852, 2.200985160, 2.178812830,
      2.160368656,  2.144786688, 2.131449546, 2.119905299, 2.109815578, 2.100922040,
      2.093024054,  2.085963447, 2.079613845, 2.073873068, 2.068657610, 2.063898562,
      2.059538553,  2.055529439, 2.051830516, 2.048407142, 2.045229642, 2.042272456};
  if (dof == 0) throw UndefinedMetric("t_quantile_975: zero degrees of freedom");
  if (dof <= std::size(kTable)) return kTable[dof - 1];
  return 1.959963985;
}

ConfidenceInterval confidence_interval(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw UndefinedMetric("confidence_interval: needs at least two runs");
  // Shifted by the first value so identical inputs give exactly zero spread.
  const double shift = values.front();
  double d_mean = 0.0;
  for (double v : values) d_mean += v - shift;
  d_mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - shift - d_mean) * (v - shift - d_mean);
  const double s = std::sqrt(ss / static_cast<double>(n - 1));
  return {shift + d_mean, t_quantile_975(n - 1) * s / std::sqrt(static_cast<double>(n))};
}

DiagnosticsRecord bias_diagnostics(const NetworkState& model, std::span<const Sample> samples,
                                   std::span<const std::size_t> old_classes,
                                   std::span<const std::size_t> new_classes) {
  if (old_classes.empty() || new_classes.empty()) {
    throw InvalidInput("bias_diagnostics: class groups must be non-empty");
  }
  for (std::size_t k : old_classes) {
    if (std::find(new_classes.begin(), new_classes.end(), k) != new_classes.end()) {
      throw InvalidInput("bias_diagnostics: class groups overlap");
    }
  }

  auto mean_weight = [&](std::span<const std::size_t> group) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k : group) {
      for (double w : model.class_weight(k)) {
        sum += w;
        ++n;
      }
    }
    return sum / static_cast<double>(n);
  };

  DiagnosticsRecord rec;
  rec.mean_weight_old = mean_weight(old_classes);
  rec.mean_weight_new = mean_weight(new_classes);

  double logit_old = 0.0, logit_new = 0.0;
  for (const Sample& s : samples) {
    const auto z = logits_of(model, s.features);
    for (std::size_t k : old_classes) logit_old += z[k];
    for (std::size_t k : new_classes) logit_new += z[k];
    if (std::find(new_classes.begin(), new_classes.end(), s.label) != new_classes.end()) {
      const double pt = softmax_stable(z)[s.label];
      ++rec.interval_counts[static_cast<std::size_t>(classify_difficulty(pt))];
    }
  }
  if (!samples.empty()) {
    rec.mean_logit_old = logit_old / static_cast<double>(samples.size() * old_classes.size());
    rec.mean_logit_new = logit_new / static_cast<double>(samples.size() * new_classes.size());
  }
  return rec;
}

}  // namespace afs
