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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "afs/error.hpp"

namespace afs {
namespace {

// Centre of bin i, used to place scores in known bins.
double in_bin(std::size_t i) { return (static_cast<double>(i) + 0.5) * kScoreBinWidth; }

// Direct simulation of the cumulative rule, independent of compute_mu.
std::size_t simulate_threshold_bin(const std::array<std::size_t, kScoreBins>& bins, double b) {
  std::size_t cnt = 0;
  for (std::size_t v : bins) cnt += v;
  std::size_t running = 0;
  for (std::size_t i = 0; i < kScoreBins; ++i) {
    running += bins[i];
    if (static_cast<double>(running) >= static_cast<double>(cnt) * b) return i;
  }
  return kScoreBins - 1;
}

TEST(ScoreHistogram, BinEdges) {
  EXPECT_EQ(ScoreHistogram::bin_of(0.0), 0u);
  EXPECT_EQ(ScoreHistogram::bin_of(0.04), 1u);
  EXPECT_EQ(ScoreHistogram::bin_of(0.0399), 0u);
  EXPECT_EQ(ScoreHistogram::bin_of(0.5), 12u);
  EXPECT_EQ(ScoreHistogram::bin_of(0.96), 24u);
  EXPECT_EQ(ScoreHistogram::bin_of(1.0), 24u);
  for (std::size_t i = 0; i < kScoreBins; ++i) EXPECT_EQ(ScoreHistogram::bin_of(in_bin(i)), i);
}

TEST(ScoreHistogram, RecordAndCount) {
  ScoreHistogram h(3);
  const std::vector<double> s{0.0, 1.0, 0.04, 0.041};
  h.record_scores(1, s);
  EXPECT_EQ(h.count(1), 4u);
  EXPECT_EQ(h.count(0), 0u);
  EXPECT_EQ(h.bins(1)[0], 1u);
  EXPECT_EQ(h.bins(1)[1], 2u);
  EXPECT_EQ(h.bins(1)[24], 1u);
}

TEST(ScoreHistogram, RejectsOutOfRangeAtomically) {
  ScoreHistogram h(2);
  const std::vector<double> bad{0.5, 1.2};
  EXPECT_THROW(h.record_scores(0, bad), InvalidInput);
  EXPECT_EQ(h.count(0), 0u);
  const std::vector<double> nan{NAN};
  EXPECT_THROW(h.record_scores(0, nan), InvalidInput);
  const std::vector<double> neg{-0.01};
  EXPECT_THROW(h.record_scores(0, neg), InvalidInput);
  EXPECT_THROW(h.record_scores(2, std::vector<double>{0.5}), InvalidInput);
}

TEST(ScoreHistogram, RejectsBadB) {
  EXPECT_THROW(ScoreHistogram(2, 0.0), InvalidConfig);
  EXPECT_THROW(ScoreHistogram(2, 1.0), InvalidConfig);
  EXPECT_THROW(ScoreHistogram(0), InvalidConfig);
}

TEST(ComputeMu, AllInFirstBin) {
  ScoreHistogram h(1);
  h.record_scores(0, std::vector<double>(8, 0.01));
  const auto e = compute_mu(h, 0);
  EXPECT_EQ(e.bin, 0u);
  EXPECT_EQ(e.mu, 0.0);
  EXPECT_FALSE(e.degenerate);
}

TEST(ComputeMu, OnePerBinUpToSeven) {
  ScoreHistogram h(1);
  for (std::size_t i = 0; i < 8; ++i) h.record_scores(0, std::vector<double>{in_bin(i)});
  const auto e = compute_mu(h, 0);
  EXPECT_EQ(e.bin, 1u);
  EXPECT_DOUBLE_EQ(e.mu, 0.04);
}

TEST(ComputeMu, AllInLastBin) {
  ScoreHistogram h(1);
  h.record_scores(0, std::vector<double>(5, 1.0));
  const auto e = compute_mu(h, 0);
  EXPECT_EQ(e.bin, 24u);
  EXPECT_DOUBLE_EQ(e.mu, 0.96);
}

TEST(ComputeMu, EmptyClassIsDegenerate) {
  ScoreHistogram h(2);
  const auto e = compute_mu(h, 1);
  EXPECT_TRUE(e.degenerate);
  EXPECT_EQ(e.mu, 0.0);
}

TEST(ComputeMu, SmallBPicksFirstNonEmptyBin) {
  ScoreHistogram h(1, 1e-9);
  h.record_scores(0, std::vector<double>{in_bin(20), in_bin(7), in_bin(9)});
  EXPECT_EQ(compute_mu(h, 0).bin, 7u);
}

TEST(ComputeMu, MatchesSimulationAndIsMonotone) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const double b = 0.05 + 0.9 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    ScoreHistogram h(1, b);
    ScoreHistogram shifted(1, b);
    std::array<std::size_t, kScoreBins> bins{};
    const std::size_t shift = 1 + rng() % 4;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = rng() % kScoreBins;
      ++bins[i];
      h.record_scores(0, std::vector<double>{in_bin(i)});
      shifted.record_scores(0, std::vector<double>{in_bin(std::min(i + shift, kScoreBins - 1))});
    }
    const auto e = compute_mu(h, 0);
    EXPECT_EQ(e.bin, simulate_threshold_bin(bins, b));
    EXPECT_DOUBLE_EQ(e.mu, static_cast<double>(e.bin) * kScoreBinWidth);
    EXPECT_GE(compute_mu(shifted, 0).bin, e.bin);
  }
}

TEST(ResetEpoch, ClearsAndIsIdempotent) {
  ScoreHistogram h(1);
  h.record_scores(0, std::vector<double>{0.9, 0.95});
  h.reset_epoch();
  EXPECT_TRUE(compute_mu(h, 0).degenerate);
  h.reset_epoch();
  EXPECT_EQ(h.count(0), 0u);
  h.record_scores(0, std::vector<double>{0.1});
  EXPECT_EQ(h.count(0), 1u);
  EXPECT_EQ(compute_mu(h, 0).bin, 2u);
}

TEST(MuSchedule, StartsAtZeroAndKeepsDegenerate) {
  MuSchedule s(3);
  for (double m : s.values()) EXPECT_EQ(m, 0.0);
  ScoreHistogram h(3);
  h.record_scores(0, std::vector<double>(4, 0.5));
  h.record_scores(2, std::vector<double>(4, 0.9));
  EXPECT_EQ(s.update(h), 1u);
  EXPECT_DOUBLE_EQ(s.mu(0), 0.48);
  EXPECT_EQ(s.mu(1), 0.0);
  EXPECT_DOUBLE_EQ(s.mu(2), 0.88);
  h.reset_epoch();
  h.record_scores(1, std::vector<double>{0.2});
  EXPECT_EQ(s.update(h), 2u);
  EXPECT_DOUBLE_EQ(s.mu(0), 0.48);
  EXPECT_DOUBLE_EQ(s.mu(1), 0.2);
  EXPECT_DOUBLE_EQ(s.mu(2), 0.88);
}

}  // namespace
}  // namespace afs
