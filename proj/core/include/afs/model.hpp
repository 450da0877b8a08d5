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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace afs {

/// Layer widths from input to class head, e.g. {32, 64, 10}.
struct NetworkSpec {
  std::vector<std::size_t> layer_widths;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Affine map y = W x + b with W stored row-major [out x in].
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t row, std::size_t col) { return weight[row * in + col]; }
  double w(std::size_t row, std::size_t col) const { return weight[row * in + col]; }
  std::span<const double> row(std::size_t r) const { return {weight.data() + r * in, in}; }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Parameters of the MLP classifier: ReLU hidden layers and a linear head.
///
/// The same type doubles as the container for parameter gradients.
struct NetworkState {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t num_classes() const { return layers.empty() ? 0 : layers.back().out; }
  std::size_t parameter_count() const;

  /// Class-k weight vector of the head, with its bias appended as the last entry.
  std::vector<double> class_weight(std::size_t k) const;

  /// Same shapes, all parameters zero.
  NetworkState zeros_like() const;

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

using NetworkGradients = NetworkState;

/// Pre-activations and activations captured during forward().
///
/// activations[0] is the input; activations[l + 1] is the output of layer l
/// (ReLU for hidden layers, identity for the head, so the last entry holds the logits).
struct ForwardTrace {
  std::vector<std::vector<double>> pre_activations;
  std::vector<std::vector<double>> activations;

  std::span<const double> input() const { return activations.front(); }
  std::span<const double> logits() const { return activations.back(); }
  /// Input to the class head, f(x).
  std::span<const double> features() const { return activations[activations.size() - 2]; }
};

struct ForwardResult {
  std::vector<double> logits;
  ForwardTrace trace;
};

/// Uniform fan-in-scaled weights, zero biases. Hidden layers use the bound
/// sqrt(6/fan_in) suited to ReLU; the output layer uses 1/sqrt(fan_in).
NetworkState init_network(const NetworkSpec& spec);

ForwardResult forward(const NetworkState& state, std::span<const double> input);

/// Logits only, without retaining the trace.
std::vector<double> logits_of(const NetworkState& state, std::span<const double> input);

NetworkGradients backward(const NetworkState& state, const ForwardTrace& trace,
                          std::span<const double> grad_logits);

/// acc += scale * backward(state, trace, grad_logits), without allocating a
/// fresh gradient container per sample.
void accumulate_backward(const NetworkState& state, const ForwardTrace& trace,
                         std::span<const double> grad_logits, double scale,
                         NetworkGradients& acc);

void sgd_step(NetworkState& state, const NetworkGradients& gradients, double learning_rate);

/// Argmax with ties resolved towards the lowest index.
std::size_t argmax(std::span<const double> values);
std::size_t predict(const NetworkState& state, std::span<const double> input);

// Checkpoint text format (version 1):
//
//   afs-checkpoint 1
//   layers <L>
//   layer <in> <out>        (repeated L times, each followed by)
//   <in*out weights, row-major, space separated>
//   <out biases>
//
// Values are printed as hexadecimal floating point, so a round trip is exact.
void save_checkpoint(const NetworkState& state, std::ostream& os);
NetworkState load_checkpoint(std::istream& is);
void save_checkpoint(const NetworkState& state, const std::string& path);
NetworkState load_checkpoint(const std::string& path);

}  // namespace afs
