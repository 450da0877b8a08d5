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

#include "afs/dynmu.hpp"

#include <algorithm>
#include <cmath>

#include "afs/error.hpp"

namespace afs {

ScoreHistogram::ScoreHistogram(std::size_t num_classes, double b)
    : b_(b), bins_(num_classes), counts_(num_classes, 0) {
  if (num_classes == 0) throw InvalidConfig("ScoreHistogram: need at least one class");
  if (!(b > 0.0 && b < 1.0)) throw InvalidConfig("ScoreHistogram: b must lie in (0, 1)");
  for (auto& row : bins_) row.fill(0);
}

std::size_t ScoreHistogram::bin_of(double score) {
  if (!(score >= 0.0 && score <= 1.0)) throw InvalidInput("ScoreHistogram: score outside [0, 1]");
  // Multiplying by 25 instead of dividing by 0.04 keeps exact edges such as
  // 0.04 in bin 1 (0.04 / 0.04 evaluates to 0.999... in binary).
  const auto bin = static_cast<std::size_t>(std::floor(score * static_cast<double>(kScoreBins)));
  return bin >= kScoreBins ? kScoreBins - 1 : bin;
}

void ScoreHistogram::record_scores(std::size_t cls, std::span<const double> scores) {
  if (cls >= bins_.size()) throw InvalidInput("ScoreHistogram: class out of range");
  for (double s : scores) bin_of(s);
  for (double s : scores) ++bins_[cls][bin_of(s)];
  counts_[cls] += scores.size();
}

void ScoreHistogram::reset_epoch() {
  for (auto& row : bins_) row.fill(0);
  std::fill(counts_.begin(), counts_.end(), 0);
}

MuEstimate compute_mu(const ScoreHistogram& hist, std::size_t cls) {
  if (cls >= hist.num_classes()) throw InvalidInput("compute_mu: class out of range");
  MuEstimate est;
  const std::size_t cnt = hist.count(cls);
  if (cnt == 0) {
    est.degenerate = true;
    return est;
  }
  const double threshold = static_cast<double>(cnt) * hist.b();
  std::size_t cumulative = 0;
  const auto& bins = hist.bins(cls);
  for (std::size_t m = 0; m < kScoreBins; ++m) {
    cumulative += bins[m];
    if (static_cast<double>(cumulative) >= threshold) {
      est.bin = m;
      break;
    }
  }
  est.mu = static_cast<double>(est.bin) * kScoreBinWidth;
  return est;
}

std::size_t MuSchedule::update(const ScoreHistogram& hist) {
  if (hist.num_classes() != mu_.size()) throw InvalidInput("MuSchedule: class count mismatch");
  std::size_t degenerate = 0;
  for (std::size_t k = 0; k < mu_.size(); ++k) {
    const MuEstimate est = compute_mu(hist, k);
    if (est.degenerate) {
      ++degenerate;
      continue;
    }
    mu_[k] = est.mu;
  }
  return degenerate;
}

}  // namespace afs
