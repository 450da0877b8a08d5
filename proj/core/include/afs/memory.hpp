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
#include <map>
#include <span>
#include <vector>

#include "afs/sample.hpp"

namespace afs {

/// Fixed-capacity replay memory filled by reservoir sampling.
///
/// After n stream samples have been offered, each of them is resident with
/// probability min(1, capacity / n). Samples are stored by value.
class MemoryBuffer {
 public:
  explicit MemoryBuffer(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  /// Number of stream samples offered so far.
  std::uint64_t seen() const { return seen_; }
  std::span<const Sample> slots() const { return slots_; }

  /// Offers each sample in turn: append while below capacity, otherwise draw
  /// j uniformly from [0, seen] and overwrite slot j when j < capacity.
  void reservoir_update(std::span<const Sample> batch, Rng& rng);

  /// Uniform draw without replacement of min(count, size()) stored samples.
  /// An empty buffer yields an empty batch.
  std::vector<Sample> random_retrieve(std::size_t count, Rng& rng) const;

  std::map<std::size_t, std::size_t> class_histogram() const;

 private:
  std::size_t capacity_;
  std::vector<Sample> slots_;
  std::uint64_t seen_ = 0;
};

}  // namespace afs
