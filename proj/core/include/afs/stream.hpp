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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "afs/sample.hpp"

namespace afs {

enum class Split { kTrain, kTest };

struct Dataset {
  std::vector<Sample> samples;
  std::size_t num_classes = 0;
  Split split = Split::kTrain;

  std::size_t dim() const { return samples.empty() ? 0 : samples.front().features.size(); }
  /// Throws InvalidInput when labels or feature widths are inconsistent.
  void validate() const;
  /// Samples whose label is in `classes`, in dataset order.
  Dataset subset(std::span<const std::size_t> classes) const;
};

/// Disjoint class groups, one per task, assigned in ascending class order.
struct TaskSplit {
  std::vector<std::vector<std::size_t>> tasks;

  std::size_t num_tasks() const { return tasks.size(); }
  /// Index of the task owning `label`; throws InvalidInput when none does.
  std::size_t task_of(std::size_t label) const;
};

struct StreamBatch {
  std::vector<Sample> samples;
  std::size_t task_id = 0;
  std::size_t batch_index = 0;
};

/// Task i receives classes [i*C/N, (i+1)*C/N). C must be divisible by N.
TaskSplit split_tasks(std::size_t num_classes, std::size_t num_tasks);
TaskSplit split_tasks(const Dataset& dataset, std::size_t num_tasks);

/// Single pass over the samples of one task: seeded shuffle, then chunks of
/// `batch_size` (the last may be short).
std::vector<StreamBatch> batches(const Dataset& dataset, const TaskSplit& split,
                                 std::size_t task_id, std::size_t batch_size, std::uint64_t seed);

// IDX files: big-endian magic (0x00000803 for unsigned-byte images with three
// dimensions, 0x00000801 for unsigned-byte labels), big-endian 32-bit sizes,
// then the raw payload. Pixels are scaled to [0, 1] by dividing by 255.
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Loads an image/label pair. num_classes defaults to max label + 1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::size_t num_classes = 0, Split split = Split::kTrain);

/// Parses in-memory IDX payloads; used by load_idx.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                  std::size_t num_classes = 0, Split split = Split::kTrain);

/// Writes `dataset` as an IDX pair. Features must form rows x cols images
/// with values in [0, 1]; they are quantised to round(255 * v).
void write_idx(const Dataset& dataset, std::size_t rows, std::size_t cols,
               const std::string& images_path, const std::string& labels_path);

struct SyntheticConfig {
  std::size_t num_classes = 10;
  std::size_t dim = 32;
  std::size_t train_per_class = 500;
  std::size_t test_per_class = 100;
  double spread = 0.35;
  std::uint64_t seed = 0;
};

/// Isotropic Gaussian classes around seeded random unit-norm means.
/// Returns {train, test}; both are drawn independently from the same means.
std::pair<Dataset, Dataset> gen_synthetic(const SyntheticConfig& config);

enum class AugmentKind { kNone, kImage, kVector };

struct AugmentConfig {
  AugmentKind kind = AugmentKind::kNone;
  double jitter_sigma = 0.05;  // vector jitter standard deviation
  std::size_t crop_padding = 4;
};

/// Returns an augmented copy of `batch` with labels and ids unchanged.
/// kImage: random horizontal flip (p = 0.5) then a random crop after zero
/// padding; requires square feature vectors. kVector: additive Gaussian jitter.
std::vector<Sample> augment(std::span<const Sample> batch, const AugmentConfig& config, Rng& rng);

/// Mirrors a square single-channel image left to right.
std::vector<double> flip_horizontal(std::span<const double> image, std::size_t side);

}  // namespace afs
