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
#include <span>
#include <vector>

namespace afs {

// Per-class revised-focal centre for multi-epoch training. Each epoch the
// target-class scores of every class are binned into 25 buckets of width
// 0.04; mu_k is then placed at the first bucket where the cumulative count
// reaches fraction b of that class's samples. Not used in online runs, where
// old-task samples are unavailable for a full pass.

inline constexpr std::size_t kScoreBins = 25;
inline constexpr double kScoreBinWidth = 0.04;

class ScoreHistogram {
 public:
  explicit ScoreHistogram(std::size_t num_classes, double b = 0.25);

  std::size_t num_classes() const { return bins_.size(); }
  double b() const { return b_; }

  /// Bin i covers [0.04 i, 0.04 (i + 1)); bin 24 also takes 1.0.
  static std::size_t bin_of(double score);

  /// Throws InvalidInput if any score is outside [0, 1] (nothing is recorded then).
  void record_scores(std::size_t cls, std::span<const double> scores);
  void reset_epoch();

  std::size_t count(std::size_t cls) const { return counts_.at(cls); }
  const std::array<std::size_t, kScoreBins>& bins(std::size_t cls) const { return bins_.at(cls); }

 private:
  double b_;
  std::vector<std::array<std::size_t, kScoreBins>> bins_;
  std::vector<std::size_t> counts_;
};

struct MuEstimate {
  std::size_t bin = 0;       // M_k
  double mu = 0.0;           // M_k * 0.04
  bool degenerate = false;   // class received no scores
};

/// Smallest M with sum_{i <= M} bin_i >= cnt * b.
MuEstimate compute_mu(const ScoreHistogram& hist, std::size_t cls);

/// mu_k per class; all zeros until the first update.
class MuSchedule {
 public:
  explicit MuSchedule(std::size_t num_classes) : mu_(num_classes, 0.0) {}

  double mu(std::size_t cls) const { return mu_.at(cls); }
  std::span<const double> values() const { return mu_; }

  /// Recomputes every class with at least one score; degenerate classes keep
  /// their previous value. Returns the number of degenerate classes.
  std::size_t update(const ScoreHistogram& hist);

 private:
  std::vector<double> mu_;
};

}  // namespace afs
