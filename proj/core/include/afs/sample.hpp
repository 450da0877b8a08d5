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
#include <random>
#include <vector>

namespace afs {

/// Engine used for every seeded draw in the library.
using Rng = std::mt19937_64;

/// One labelled feature vector. `id` is stable across copies so replayed
/// samples can be traced back to their stream position.
struct Sample {
  std::vector<double> features;
  std::size_t label = 0;
  std::uint64_t id = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

}  // namespace afs
