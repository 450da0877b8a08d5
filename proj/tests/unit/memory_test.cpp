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

#include "afs/memory.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "afs/error.hpp"

namespace afs {
namespace {

std::vector<Sample> make_stream(std::size_t n, std::size_t classes = 1) {
  std::vector<Sample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].features = {static_cast<double>(i)};
    out[i].label = i % classes;
    out[i].id = i;
  }
  return out;
}

// Fraction of trials in which each stream sample ends up resident.
std::vector<double> inclusion_frequencies(std::size_t capacity, std::size_t n, int trials,
                                          std::uint64_t seed) {
  const auto stream = make_stream(n);
  std::vector<double> hits(n, 0.0);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    MemoryBuffer m(capacity);
    // Mix batch sizes so per-sample processing inside a batch is exercised.
    std::size_t pos = 0;
    while (pos < n) {
      const std::size_t len = std::min<std::size_t>(1 + pos % 3, n - pos);
      m.reservoir_update(std::span<const Sample>(stream).subspan(pos, len), rng);
      pos += len;
    }
    for (const Sample& s : m.slots()) hits[s.id] += 1.0;
  }
  for (double& h : hits) h /= trials;
  return hits;
}

TEST(Reservoir, UnderCapacityKeepsEverything) {
  MemoryBuffer m(4);
  Rng rng(1);
  const auto s = make_stream(3);
  m.reservoir_update(s, rng);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.seen(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m.slots()[i], s[i]);
}

TEST(Reservoir, SizeNeverExceedsCapacity) {
  MemoryBuffer m(5);
  Rng rng(2);
  const auto s = make_stream(7);
  for (int round = 0; round < 20; ++round) {
    m.reservoir_update(s, rng);
    EXPECT_EQ(m.size(), std::min<std::size_t>(5, m.seen()));
  }
  EXPECT_EQ(m.seen(), 140u);
}

TEST(Reservoir, SlotsComeFromStream) {
  MemoryBuffer m(3);
  Rng rng(3);
  const auto s = make_stream(30);
  m.reservoir_update(s, rng);
  std::set<std::uint64_t> ids;
  for (const Sample& x : m.slots()) {
    ASSERT_LT(x.id, 30u);
    EXPECT_EQ(x, s[x.id]);
    ids.insert(x.id);
  }
  EXPECT_EQ(ids.size(), 3u);
}

TEST(Reservoir, ZeroCapacityRejected) { EXPECT_THROW(MemoryBuffer(0), InvalidConfig); }

TEST(Reservoir, InclusionProbabilityOneOfThree) {
  for (double f : inclusion_frequencies(1, 3, 100000, 11)) EXPECT_NEAR(f, 1.0 / 3.0, 0.01);
}

TEST(Reservoir, InclusionProbabilityTwoOfFour) {
  for (double f : inclusion_frequencies(2, 4, 100000, 12)) EXPECT_NEAR(f, 0.5, 0.01);
}

TEST(Reservoir, InclusionProbabilityFiveOfFifty) {
  for (double f : inclusion_frequencies(5, 50, 100000, 13)) EXPECT_NEAR(f, 0.1, 0.01);
}

TEST(Retrieve, EmptyBufferGivesEmptyBatch) {
  MemoryBuffer m(3);
  Rng rng(4);
  EXPECT_TRUE(m.random_retrieve(10, rng).empty());
}

TEST(Retrieve, OversizedRequestIsPermutation) {
  MemoryBuffer m(6);
  Rng rng(5);
  m.reservoir_update(make_stream(4), rng);
  const auto got = m.random_retrieve(10, rng);
  ASSERT_EQ(got.size(), 4u);
  std::set<std::uint64_t> ids;
  for (const Sample& s : got) ids.insert(s.id);
  EXPECT_EQ(ids, (std::set<std::uint64_t>{0, 1, 2, 3}));
}

TEST(Retrieve, NoDuplicatesAndBufferUnchanged) {
  MemoryBuffer m(20);
  Rng rng(6);
  m.reservoir_update(make_stream(50), rng);
  const std::vector<Sample> before(m.slots().begin(), m.slots().end());
  for (int i = 0; i < 200; ++i) {
    const auto got = m.random_retrieve(7, rng);
    ASSERT_EQ(got.size(), 7u);
    std::set<std::uint64_t> ids;
    for (const Sample& s : got) ids.insert(s.id);
    EXPECT_EQ(ids.size(), 7u);
  }
  EXPECT_TRUE(std::equal(before.begin(), before.end(), m.slots().begin(), m.slots().end()));
  EXPECT_EQ(m.seen(), 50u);
}

TEST(Retrieve, SingleDrawUniform) {
  MemoryBuffer m(4);
  Rng rng(7);
  m.reservoir_update(make_stream(4), rng);
  constexpr int kDraws = 100000;
  std::vector<double> counts(4, 0.0);
  for (int i = 0; i < kDraws; ++i) counts[m.random_retrieve(1, rng).front().id] += 1.0;
  double chi2 = 0.0;
  const double expected = kDraws / 4.0;
  for (double c : counts) {
    EXPECT_NEAR(c / kDraws, 0.25, 0.01);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // Upper 0.001 quantile of chi-square with 3 degrees of freedom.
  EXPECT_LT(chi2, 16.266236196);
}

TEST(Retrieve, BatchDrawUniformOverSlots) {
  MemoryBuffer m(10);
  Rng rng(8);
  m.reservoir_update(make_stream(10), rng);
  constexpr int kDraws = 100000;
  std::vector<double> counts(10, 0.0);
  for (int i = 0; i < kDraws / 3; ++i) {
    for (const Sample& s : m.random_retrieve(3, rng)) counts[s.id] += 1.0;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - total / 10.0) * (c - total / 10.0) / (total / 10.0);
  // Upper 0.001 quantile of chi-square with 9 degrees of freedom.
  EXPECT_LT(chi2, 27.877164871);
}

TEST(Histogram, CountsPerClass) {
  MemoryBuffer m(10);
  Rng rng(9);
  EXPECT_TRUE(m.class_histogram().empty());
  std::vector<Sample> s = make_stream(4);
  s[0].label = 0;
  s[1].label = s[2].label = s[3].label = 1;
  m.reservoir_update(s, rng);
  EXPECT_EQ(m.class_histogram(), (std::map<std::size_t, std::size_t>{{0, 1}, {1, 3}}));
}

TEST(Histogram, SumsToSize) {
  MemoryBuffer m(13);
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    m.reservoir_update(make_stream(9, 4), rng);
    std::size_t total = 0;
    for (const auto& [cls, n] : m.class_histogram()) total += n;
    EXPECT_EQ(total, m.size());
  }
}

}  // namespace
}  // namespace afs
