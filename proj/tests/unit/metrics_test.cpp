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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "afs/error.hpp"

namespace afs {
namespace {

AccuracyMatrix random_matrix(std::size_t T, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> rows(T);
  for (std::size_t i = 0; i < T; ++i) {
    rows[i].resize(i + 1);
    for (double& v : rows[i]) v = u(rng);
  }
  return AccuracyMatrix::from_rows(rows);
}

TEST(AccuracyMatrix, LowerTriangleOnly) {
  AccuracyMatrix m(3);
  EXPECT_FALSE(m.has(2, 1));
  m.set(2, 1, 0.5);
  EXPECT_TRUE(m.has(2, 1));
  EXPECT_DOUBLE_EQ(m.at(2, 1), 0.5);
  EXPECT_THROW(m.set(1, 2, 0.5), InvalidInput);
  EXPECT_THROW(m.set(0, 0, 0.5), InvalidInput);
  EXPECT_THROW(m.set(4, 1, 0.5), InvalidInput);
  EXPECT_THROW(m.set(3, 1, 1.5), InvalidInput);
  EXPECT_THROW(m.at(3, 3), InvalidInput);
  EXPECT_THROW(AccuracyMatrix::from_rows({{0.1, 0.2}}), InvalidInput);
}

TEST(AverageAccuracy, Examples) {
  EXPECT_DOUBLE_EQ(average_accuracy(AccuracyMatrix::from_rows({{0.9}, {0.5, 0.7}}), 2), 0.6);
  EXPECT_DOUBLE_EQ(average_accuracy(AccuracyMatrix::from_rows({{1.0}, {1.0, 1.0}, {1.0, 1.0, 1.0}}), 3), 1.0);
  EXPECT_DOUBLE_EQ(average_accuracy(AccuracyMatrix::from_rows({{0.42}}), 1), 0.42);
  EXPECT_DOUBLE_EQ(average_accuracy(AccuracyMatrix::from_rows({{0.9}, {0.5, 0.7}}), 1), 0.9);
}

TEST(AverageAccuracy, MissingRowRejected) {
  AccuracyMatrix m(2);
  m.set(1, 1, 0.3);
  m.set(2, 2, 0.3);
  EXPECT_THROW(average_accuracy(m, 2), InvalidInput);
  EXPECT_THROW(average_accuracy(m, 3), InvalidInput);
}

TEST(AverageForgetting, Examples) {
  EXPECT_NEAR(average_forgetting(AccuracyMatrix::from_rows({{0.9}, {0.5, 0.7}}), 2), 0.4, 1e-15);
  EXPECT_LT(average_forgetting(AccuracyMatrix::from_rows({{0.5}, {0.8, 0.7}}), 2), 0.0);
  const auto m = AccuracyMatrix::from_rows({{0.9}, {0.7, 0.8}, {0.6, 0.5, 0.9}});
  EXPECT_NEAR(average_forgetting(m, 3), 0.3, 1e-15);
}

TEST(AverageForgetting, UndefinedForOneTask) {
  EXPECT_THROW(average_forgetting(AccuracyMatrix::from_rows({{0.9}}), 1), UndefinedMetric);
}

TEST(AverageIntransigence, Examples) {
  const auto diag2 = AccuracyMatrix::from_rows({{0.9}, {0.1, 0.7}});
  EXPECT_NEAR(average_intransigence(diag2, std::vector<double>{0.9, 0.7}), 0.0, 1e-15);
  EXPECT_NEAR(average_intransigence(diag2, std::vector<double>{0.8, 0.8}), 0.0, 1e-15);
  const auto m = AccuracyMatrix::from_rows({{0.7}, {0.2, 0.6}, {0.1, 0.1, 0.7}});
  EXPECT_NEAR(average_intransigence(m, std::vector<double>{0.8, 0.6, 0.9}), 0.1, 1e-15);
  EXPECT_THROW(average_intransigence(m, std::vector<double>{0.8, 0.6}), InvalidInput);
}

// Independent loop-based forgetting used as the oracle for random matrices.
double naive_forgetting(const std::vector<std::vector<double>>& a) {
  const std::size_t T = a.size();
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < T; ++j) {
    double best = -1.0;
    for (std::size_t l = j; l + 1 < T; ++l) best = std::max(best, a[l][j]);
    sum += best - a[T - 1][j];
  }
  return sum / static_cast<double>(T - 1);
}

TEST(Metrics, RangesOnRandomMatrices) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t T = 1 + rng() % 8;
    const AccuracyMatrix m = random_matrix(T, rng);
    std::vector<double> ref(T);
    for (double& v : ref) v = u(rng);
    const double A = average_accuracy(m, T);
    const double I = average_intransigence(m, ref);
    EXPECT_GE(A, 0.0);
    EXPECT_LE(A, 1.0);
    EXPECT_GE(I, -1.0);
    EXPECT_LE(I, 1.0);
    if (T >= 2) {
      std::vector<std::vector<double>> rows(T);
      for (std::size_t i = 0; i < T; ++i)
        for (std::size_t j = 0; j <= i; ++j) rows[i].push_back(m.at(i + 1, j + 1));
      const double F = average_forgetting(m, T);
      EXPECT_GE(F, -1.0);
      EXPECT_LE(F, 1.0);
      EXPECT_NEAR(F, naive_forgetting(rows), 1e-12);
    }
  }
}

TEST(AverageForgetting, NeverDegradingIsNonPositive) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 2 + rng() % 6;
    std::vector<std::vector<double>> rows(T);
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t j = 0; j <= i; ++j) rows[i].push_back(i == j ? 0.3 + u(rng) : rows[i - 1][j] + u(rng));
    }
    EXPECT_LE(average_forgetting(AccuracyMatrix::from_rows(rows), T), 0.0);
  }
}

TEST(TQuantile, TableValues) {
  EXPECT_NEAR(t_quantile_975(1), 12.706204736, 1e-6);
  EXPECT_NEAR(t_quantile_975(4), 2.776445105, 1e-6);
  EXPECT_NEAR(t_quantile_975(9), 2.262157163, 1e-6);
  EXPECT_NEAR(t_quantile_975(30), 2.042272456, 1e-6);
  EXPECT_NEAR(t_quantile_975(1000), 1.959963985, 1e-9);
  EXPECT_THROW(t_quantile_975(0), UndefinedMetric);
}

TEST(ConfidenceInterval, Examples) {
  const auto same = confidence_interval(std::vector<double>{0.4, 0.4, 0.4});
  EXPECT_DOUBLE_EQ(same.mean, 0.4);
  EXPECT_DOUBLE_EQ(same.half_width, 0.0);
  const auto pair = confidence_interval(std::vector<double>{0.0, 1.0});
  EXPECT_DOUBLE_EQ(pair.mean, 0.5);
  EXPECT_NEAR(pair.half_width, 6.353102368, 1e-6);
  EXPECT_THROW(confidence_interval(std::vector<double>{0.3}), UndefinedMetric);
}

TEST(ConfidenceInterval, ShrinksWithSqrtN) {
  // Both sizes are beyond the table, so the quantile is the same and the
  // half-width scales as s / sqrt(n).
  auto alternating = [](std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
    v.back() = 0.0;
    return v;
  };
  const auto a = alternating(41);
  const auto b = alternating(161);
  auto sd = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  const double ratio = confidence_interval(a).half_width / confidence_interval(b).half_width;
  EXPECT_NEAR(ratio, (sd(a) / sd(b)) * std::sqrt(161.0 / 41.0), 1e-12);
}

NetworkState zero_network(std::size_t dim, std::size_t classes) {
  NetworkState s;
  s.layers = {DenseLayer(dim, 3), DenseLayer(3, classes)};
  return s;
}

TEST(BiasDiagnostics, ZeroNetwork) {
  const NetworkState s = zero_network(2, 4);
  std::vector<Sample> samples{{{1.0, 2.0}, 2, 0}, {{0.5, 0.1}, 3, 1}, {{0.0, 1.0}, 0, 2}};
  const std::vector<std::size_t> old_c{0, 1}, new_c{2, 3};
  const auto d = bias_diagnostics(s, samples, old_c, new_c);
  EXPECT_EQ(d.mean_weight_old, 0.0);
  EXPECT_EQ(d.mean_weight_new, 0.0);
  EXPECT_EQ(d.mean_logit_old, 0.0);
  EXPECT_EQ(d.mean_logit_new, 0.0);
  EXPECT_EQ(d.count(DifficultyInterval::kHard), 2u);
  EXPECT_EQ(d.count(DifficultyInterval::kAmbiguous), 0u);
  EXPECT_EQ(d.count(DifficultyInterval::kEasy), 0u);
}

TEST(BiasDiagnostics, HandSetHead) {
  // Single linear layer, 2 inputs, 3 classes; old = {0}, new = {2}.
  NetworkState s;
  DenseLayer head(2, 3);
  head.weight = {1.0, 2.0, 0.0, 0.0, 4.0, -1.0};
  head.bias = {0.5, 0.0, 3.0};
  s.layers = {head};
  const std::vector<Sample> samples{{{1.0, 0.0}, 2, 0}, {{0.0, 1.0}, 0, 1}};
  const std::vector<std::size_t> old_c{0}, new_c{2};
  const auto d = bias_diagnostics(s, samples, old_c, new_c);
  EXPECT_DOUBLE_EQ(d.mean_weight_old, (1.0 + 2.0 + 0.5) / 3.0);
  EXPECT_DOUBLE_EQ(d.mean_weight_new, (4.0 - 1.0 + 3.0) / 3.0);
  // z(x1) = (1.5, 0, 7), z(x2) = (2.5, 0, 2).
  EXPECT_DOUBLE_EQ(d.mean_logit_old, (1.5 + 2.5) / 2.0);
  EXPECT_DOUBLE_EQ(d.mean_logit_new, (7.0 + 2.0) / 2.0);
  // Only the class-2 sample is counted; p = e^7 / (e^1.5 + 1 + e^7) is easy.
  EXPECT_EQ(d.count(DifficultyInterval::kEasy), 1u);
  EXPECT_EQ(d.count(DifficultyInterval::kHard) + d.count(DifficultyInterval::kAmbiguous), 0u);
}

TEST(BiasDiagnostics, CountsSumToNewClassSamples) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  NetworkState s = zero_network(3, 5);
  for (auto& l : s.layers)
    for (double& w : l.weight) w = n(rng);
  std::vector<Sample> samples;
  std::size_t new_count = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const std::size_t label = rng() % 5;
    if (label >= 3) ++new_count;
    samples.push_back({{n(rng), n(rng), n(rng)}, label, i});
  }
  const std::vector<std::size_t> old_c{0, 1, 2}, new_c{3, 4};
  const auto d = bias_diagnostics(s, samples, old_c, new_c);
  EXPECT_EQ(d.interval_counts[0] + d.interval_counts[1] + d.interval_counts[2], new_count);
}

TEST(BiasDiagnostics, RejectsBadGroups) {
  const NetworkState s = zero_network(2, 4);
  const std::vector<Sample> samples;
  const std::vector<std::size_t> empty, a{0, 1}, b{1, 2};
  EXPECT_THROW(bias_diagnostics(s, samples, empty, a), InvalidInput);
  EXPECT_THROW(bias_diagnostics(s, samples, a, empty), InvalidInput);
  EXPECT_THROW(bias_diagnostics(s, samples, a, b), InvalidInput);
}

}  // namespace
}  // namespace afs
