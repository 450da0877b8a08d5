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

#include <numeric>

#include "afs/error.hpp"

namespace afs {

MemoryBuffer::MemoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidConfig("MemoryBuffer: capacity must be >= 1");
  slots_.reserve(capacity);
}

void MemoryBuffer::reservoir_update(std::span<const Sample> batch, Rng& rng) {
  for (const Sample& s : batch) {
    if (slots_.size() < capacity_) {
      slots_.push_back(s);
    } else {
      std::uniform_int_distribution<std::uint64_t> pick(0, seen_);
      const std::uint64_t j = pick(rng);
      if (j < capacity_) slots_[j] = s;
    }
    ++seen_;
  }
}

std::vector<Sample> MemoryBuffer::random_retrieve(std::size_t count, Rng& rng) const {
  const std::size_t n = std::min(count, slots_.size());
  std::vector<std::size_t> order(slots_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first n positions are a uniform n-subset in random order.
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(slots_[order[i]]);
  return out;
}

std::map<std::size_t, std::size_t> MemoryBuffer::class_histogram() const {
  std::map<std::size_t, std::size_t> counts;
  for (const Sample& s : slots_) ++counts[s.label];
  return counts;
}

}  // namespace afs
