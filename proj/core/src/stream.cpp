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

#include "afs/stream.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include "afs/error.hpp"

namespace afs {
namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> buf, std::size_t offset, const char* file) {
  if (offset + 4 > buf.size()) {
    throw FormatError(std::string(file) + ": truncated header at offset " + std::to_string(offset));
  }
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void write_be32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  os.write(bytes, 4);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

void Dataset::validate() const {
  const std::size_t d = dim();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label >= num_classes) {
      throw InvalidInput("Dataset: sample " + std::to_string(i) + " label out of range");
    }
    if (samples[i].features.size() != d) {
      throw InvalidInput("Dataset: sample " + std::to_string(i) + " has inconsistent width");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> classes) const {
  Dataset out;
  out.num_classes = num_classes;
  out.split = split;
  for (const Sample& s : samples) {
    if (std::find(classes.begin(), classes.end(), s.label) != classes.end()) {
      out.samples.push_back(s);
    }
  }
  return out;
}

std::size_t TaskSplit::task_of(std::size_t label) const {
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (std::find(tasks[t].begin(), tasks[t].end(), label) != tasks[t].end()) return t;
  }
  throw InvalidInput("TaskSplit: label " + std::to_string(label) + " belongs to no task");
}

TaskSplit split_tasks(std::size_t num_classes, std::size_t num_tasks) {
  if (num_tasks == 0 || num_classes == 0 || num_classes % num_tasks != 0) {
    throw InvalidConfig("split_tasks: " + std::to_string(num_classes) +
                        " classes cannot be split evenly into " + std::to_string(num_tasks) +
                        " tasks");
  }
  const std::size_t per = num_classes / num_tasks;
  TaskSplit split;
  split.tasks.resize(num_tasks);
  for (std::size_t t = 0; t < num_tasks; ++t) {
    split.tasks[t].resize(per);
    std::iota(split.tasks[t].begin(), split.tasks[t].end(), t * per);
  }
  return split;
}

TaskSplit split_tasks(const Dataset& dataset, std::size_t num_tasks) {
  return split_tasks(dataset.num_classes, num_tasks);
}

std::vector<StreamBatch> batches(const Dataset& dataset, const TaskSplit& split,
                                 std::size_t task_id, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw InvalidConfig("batches: batch_size must be >= 1");
  if (task_id >= split.num_tasks()) throw InvalidInput("batches: task id out of range");
  const auto& classes = split.tasks[task_id];

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    if (std::find(classes.begin(), classes.end(), dataset.samples[i].label) != classes.end()) {
      idx.push_back(i);
    }
  }
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<StreamBatch> out;
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    StreamBatch b;
    b.task_id = task_id;
    b.batch_index = out.size();
    const std::size_t stop = std::min(idx.size(), start + batch_size);
    for (std::size_t i = start; i < stop; ++i) b.samples.push_back(dataset.samples[idx[i]]);
    out.push_back(std::move(b));
  }
  return out;
}

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                  std::size_t num_classes, Split split) {
  const std::uint32_t image_magic = read_be32(images, 0, "images");
  if (image_magic != kIdxImageMagic) {
    throw FormatError("images: bad magic at offset 0 (expected 0x00000803)");
  }
  const std::uint32_t label_magic = read_be32(labels, 0, "labels");
  if (label_magic != kIdxLabelMagic) {
    throw FormatError("labels: bad magic at offset 0 (expected 0x00000801)");
  }
  const std::size_t count = read_be32(images, 4, "images");
  const std::size_t rows = read_be32(images, 8, "images");
  const std::size_t cols = read_be32(images, 12, "images");
  const std::size_t label_count = read_be32(labels, 4, "labels");
  if (count != label_count) {
    throw FormatError("labels: count " + std::to_string(label_count) + " at offset 4 does not match " +
                      std::to_string(count) + " images");
  }
  const std::size_t dim = rows * cols;
  constexpr std::size_t kImageHeader = 16;
  constexpr std::size_t kLabelHeader = 8;
  if (images.size() < kImageHeader + count * dim) {
    throw FormatError("images: truncated payload at offset " + std::to_string(images.size()));
  }
  if (labels.size() < kLabelHeader + count) {
    throw FormatError("labels: truncated payload at offset " + std::to_string(labels.size()));
  }

  Dataset ds;
  ds.split = split;
  ds.samples.resize(count);
  std::size_t max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Sample& s = ds.samples[i];
    s.id = i;
    s.label = labels[kLabelHeader + i];
    max_label = std::max(max_label, s.label);
    s.features.resize(dim);
    const std::uint8_t* px = images.data() + kImageHeader + i * dim;
    for (std::size_t k = 0; k < dim; ++k) s.features[k] = px[k] / 255.0;
  }
  ds.num_classes = num_classes != 0 ? num_classes : (count == 0 ? 0 : max_label + 1);
  if (count != 0 && max_label >= ds.num_classes) {
    throw FormatError("labels: label " + std::to_string(max_label) + " exceeds class count");
  }
  return ds;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 std::size_t num_classes, Split split) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);
  return parse_idx(images, labels, num_classes, split);
}

void write_idx(const Dataset& dataset, std::size_t rows, std::size_t cols,
               const std::string& images_path, const std::string& labels_path) {
  const std::size_t dim = rows * cols;
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IoError("write_idx: cannot open output files");
  write_be32(img, kIdxImageMagic);
  write_be32(img, static_cast<std::uint32_t>(dataset.samples.size()));
  write_be32(img, static_cast<std::uint32_t>(rows));
  write_be32(img, static_cast<std::uint32_t>(cols));
  write_be32(lab, kIdxLabelMagic);
  write_be32(lab, static_cast<std::uint32_t>(dataset.samples.size()));
  for (const Sample& s : dataset.samples) {
    if (s.features.size() != dim) throw InvalidInput("write_idx: feature width != rows * cols");
    if (s.label > 255) throw InvalidInput("write_idx: label does not fit in one byte");
    for (double v : s.features) {
      const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
      img.put(static_cast<char>(static_cast<std::uint8_t>(q)));
    }
    lab.put(static_cast<char>(static_cast<std::uint8_t>(s.label)));
  }
  if (!img || !lab) throw IoError("write_idx: write failed");
}

std::pair<Dataset, Dataset> gen_synthetic(const SyntheticConfig& config) {
  if (config.num_classes == 0 || config.dim == 0 || config.train_per_class == 0) {
    throw InvalidConfig("gen_synthetic: class count, dim and per-class count must be positive");
  }
  if (!(config.spread >= 0.0)) throw InvalidConfig("gen_synthetic: spread must be >= 0");

  Rng rng(config.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> means(config.num_classes, std::vector<double>(config.dim));
  for (auto& m : means) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : m) {
        v = unit(rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : m) v /= norm;
  }

  auto draw = [&](std::size_t per_class, Split split, std::uint64_t id_base) {
    Dataset ds;
    ds.num_classes = config.num_classes;
    ds.split = split;
    ds.samples.reserve(per_class * config.num_classes);
    for (std::size_t k = 0; k < config.num_classes; ++k) {
      for (std::size_t i = 0; i < per_class; ++i) {
        Sample s;
        s.label = k;
        s.id = id_base + ds.samples.size();
        s.features.resize(config.dim);
        for (std::size_t d = 0; d < config.dim; ++d) {
          s.features[d] = means[k][d] + config.spread * unit(rng);
        }
        ds.samples.push_back(std::move(s));
      }
    }
    return ds;
  };
  Dataset train = draw(config.train_per_class, Split::kTrain, 0);
  Dataset test = draw(config.test_per_class, Split::kTest, 1u << 30);
  return {std::move(train), std::move(test)};
}

std::vector<double> flip_horizontal(std::span<const double> image, std::size_t side) {
  if (image.size() != side * side) throw InvalidConfig("flip_horizontal: image is not side x side");
  std::vector<double> out(image.size());
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) out[r * side + c] = image[r * side + (side - 1 - c)];
  }
  return out;
}

std::vector<Sample> augment(std::span<const Sample> batch, const AugmentConfig& config, Rng& rng) {
  std::vector<Sample> out(batch.begin(), batch.end());
  switch (config.kind) {
    case AugmentKind::kNone:
      break;
    case AugmentKind::kVector: {
      if (config.jitter_sigma == 0.0) break;
      std::normal_distribution<double> noise(0.0, config.jitter_sigma);
      for (Sample& s : out) {
        for (double& v : s.features) v += noise(rng);
      }
      break;
    }
    case AugmentKind::kImage: {
      std::bernoulli_distribution coin(0.5);
      const std::size_t pad = config.crop_padding;
      std::uniform_int_distribution<std::size_t> shift(0, 2 * pad);
      for (Sample& s : out) {
        const auto side = static_cast<std::size_t>(std::llround(std::sqrt(s.features.size())));
        if (side * side != s.features.size()) {
          throw InvalidConfig("augment: image augmentation needs square feature vectors");
        }
        if (coin(rng)) s.features = flip_horizontal(s.features, side);
        // Crop a side x side window from the zero-padded image; offset (pad, pad) is identity.
        const std::size_t dr = shift(rng), dc = shift(rng);
        std::vector<double> cropped(s.features.size(), 0.0);
        for (std::size_t r = 0; r < side; ++r) {
          const std::ptrdiff_t src_r = static_cast<std::ptrdiff_t>(r + dr) - static_cast<std::ptrdiff_t>(pad);
          if (src_r < 0 || src_r >= static_cast<std::ptrdiff_t>(side)) continue;
          for (std::size_t c = 0; c < side; ++c) {
            const std::ptrdiff_t src_c = static_cast<std::ptrdiff_t>(c + dc) - static_cast<std::ptrdiff_t>(pad);
            if (src_c < 0 || src_c >= static_cast<std::ptrdiff_t>(side)) continue;
            cropped[r * side + c] = s.features[static_cast<std::size_t>(src_r) * side + static_cast<std::size_t>(src_c)];
          }
        }
        s.features = std::move(cropped);
      }
      break;
    }
  }
  return out;
}

}  // namespace afs
