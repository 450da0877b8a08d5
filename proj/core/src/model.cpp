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

#include "afs/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "afs/error.hpp"

namespace afs {
namespace {

void affine(const DenseLayer& layer, std::span<const double> x, std::vector<double>& y) {
  y.assign(layer.bias.begin(), layer.bias.end());
  for (std::size_t r = 0; r < layer.out; ++r) {
    const double* w = layer.weight.data() + r * layer.in;
    double acc = 0.0;
    for (std::size_t c = 0; c < layer.in; ++c) acc += w[c] * x[c];
    y[r] += acc;
  }
}

void check_same_shape(const NetworkState& a, const NetworkState& b, const char* what) {
  bool ok = a.layers.size() == b.layers.size();
  for (std::size_t l = 0; ok && l < a.layers.size(); ++l) {
    ok = a.layers[l].in == b.layers[l].in && a.layers[l].out == b.layers[l].out;
  }
  if (!ok) throw InvalidInput(std::string(what) + ": parameter shape mismatch");
}

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') throw FormatError("checkpoint: bad number '" + token + "'");
  return v;
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_widths.size() < 2) throw InvalidConfig("NetworkSpec: need at least input and output widths");
  for (std::size_t w : layer_widths) {
    if (w == 0) throw InvalidConfig("NetworkSpec: layer widths must be positive");
  }
}

std::size_t NetworkState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

std::vector<double> NetworkState::class_weight(std::size_t k) const {
  const DenseLayer& head = layers.back();
  if (k >= head.out) throw InvalidInput("class_weight: class index out of range");
  std::vector<double> w(head.row(k).begin(), head.row(k).end());
  w.push_back(head.bias[k]);
  return w;
}

NetworkState NetworkState::zeros_like() const {
  NetworkState z;
  z.layers.reserve(layers.size());
  for (const auto& l : layers) z.layers.emplace_back(l.in, l.out);
  return z;
}

NetworkState init_network(const NetworkSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  NetworkState state;
  for (std::size_t l = 0; l + 1 < spec.layer_widths.size(); ++l) {
    DenseLayer layer(spec.layer_widths[l], spec.layer_widths[l + 1]);
    const bool hidden = l + 2 < spec.layer_widths.size();
    const double bound = (hidden ? std::sqrt(6.0) : 1.0) / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : layer.weight) w = dist(rng);
    state.layers.push_back(std::move(layer));
  }
  return state;
}

ForwardResult forward(const NetworkState& state, std::span<const double> input) {
  if (state.layers.empty()) throw InvalidInput("forward: empty network");
  if (input.size() != state.input_dim()) {
    throw InvalidInput("forward: input has " + std::to_string(input.size()) +
                       " features, network expects " + std::to_string(state.input_dim()));
  }
  ForwardResult r;
  auto& trace = r.trace;
  trace.activations.reserve(state.layers.size() + 1);
  trace.pre_activations.reserve(state.layers.size());
  trace.activations.emplace_back(input.begin(), input.end());
  for (std::size_t l = 0; l < state.layers.size(); ++l) {
    std::vector<double> z;
    affine(state.layers[l], trace.activations.back(), z);
    std::vector<double> a = z;
    if (l + 1 < state.layers.size()) {
      for (double& v : a) v = v > 0.0 ? v : 0.0;
    }
    trace.pre_activations.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  r.logits = trace.activations.back();
  return r;
}

std::vector<double> logits_of(const NetworkState& state, std::span<const double> input) {
  if (state.layers.empty()) throw InvalidInput("forward: empty network");
  if (input.size() != state.input_dim()) throw InvalidInput("forward: input dimension mismatch");
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  for (std::size_t l = 0; l < state.layers.size(); ++l) {
    affine(state.layers[l], x, y);
    if (l + 1 < state.layers.size()) {
      for (double& v : y) v = v > 0.0 ? v : 0.0;
    }
    std::swap(x, y);
  }
  return x;
}

void accumulate_backward(const NetworkState& state, const ForwardTrace& trace,
                         std::span<const double> grad_logits, double scale,
                         NetworkGradients& acc) {
  const std::size_t depth = state.layers.size();
  if (trace.activations.size() != depth + 1 || trace.pre_activations.size() != depth) {
    throw InvalidInput("backward: trace depth does not match network");
  }
  for (std::size_t l = 0; l < depth; ++l) {
    if (trace.activations[l].size() != state.layers[l].in ||
        trace.pre_activations[l].size() != state.layers[l].out) {
      throw InvalidInput("backward: stale trace (layer shape mismatch)");
    }
  }
  if (grad_logits.size() != state.num_classes()) {
    throw InvalidInput("backward: gradient length does not match class count");
  }
  check_same_shape(state, acc, "backward");

  std::vector<double> delta(grad_logits.begin(), grad_logits.end());
  std::vector<double> prev;
  for (std::size_t l = depth; l-- > 0;) {
    const DenseLayer& layer = state.layers[l];
    DenseLayer& g = acc.layers[l];
    const auto& x = trace.activations[l];
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double d = scale * delta[r];
      if (d == 0.0) continue;
      double* gw = g.weight.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) gw[c] += d * x[c];
      g.bias[r] += d;
    }
    if (l == 0) break;
    prev.assign(layer.in, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      const double d = delta[r];
      if (d == 0.0) continue;
      const double* w = layer.weight.data() + r * layer.in;
      for (std::size_t c = 0; c < layer.in; ++c) prev[c] += w[c] * d;
    }
    // ReLU derivative of the layer below; zero at the kink.
    const auto& z = trace.pre_activations[l - 1];
    for (std::size_t c = 0; c < prev.size(); ++c) {
      if (!(z[c] > 0.0)) prev[c] = 0.0;
    }
    std::swap(delta, prev);
  }
}

NetworkGradients backward(const NetworkState& state, const ForwardTrace& trace,
                          std::span<const double> grad_logits) {
  NetworkGradients g = state.zeros_like();
  accumulate_backward(state, trace, grad_logits, 1.0, g);
  return g;
}

void sgd_step(NetworkState& state, const NetworkGradients& gradients, double learning_rate) {
  if (!(learning_rate >= 0.0)) throw InvalidInput("sgd_step: learning rate must be >= 0");
  check_same_shape(state, gradients, "sgd_step");
  for (std::size_t l = 0; l < state.layers.size(); ++l) {
    auto& p = state.layers[l];
    const auto& g = gradients.layers[l];
    for (std::size_t i = 0; i < p.weight.size(); ++i) p.weight[i] -= learning_rate * g.weight[i];
    for (std::size_t i = 0; i < p.bias.size(); ++i) p.bias[i] -= learning_rate * g.bias[i];
  }
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("argmax: empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::size_t predict(const NetworkState& state, std::span<const double> input) {
  return argmax(logits_of(state, input));
}

void save_checkpoint(const NetworkState& state, std::ostream& os) {
  os << "afs-checkpoint 1\n";
  os << "layers " << state.layers.size() << '\n';
  for (const auto& l : state.layers) {
    os << "layer " << l.in << ' ' << l.out << '\n';
    for (std::size_t i = 0; i < l.weight.size(); ++i) os << (i ? " " : "") << hex(l.weight[i]);
    os << '\n';
    for (std::size_t i = 0; i < l.bias.size(); ++i) os << (i ? " " : "") << hex(l.bias[i]);
    os << '\n';
  }
  if (!os) throw IoError("checkpoint: write failed");
}

NetworkState load_checkpoint(std::istream& is) {
  auto expect = [&](const std::string& word) {
    std::string tok;
    if (!(is >> tok) || tok != word) {
      throw FormatError("checkpoint: expected '" + word + "' near offset " +
                        std::to_string(static_cast<long long>(is.tellg())));
    }
  };
  expect("afs-checkpoint");
  int version = 0;
  if (!(is >> version) || version != 1) throw FormatError("checkpoint: unsupported version");
  expect("layers");
  std::size_t count = 0;
  if (!(is >> count)) throw FormatError("checkpoint: missing layer count");
  NetworkState state;
  for (std::size_t l = 0; l < count; ++l) {
    expect("layer");
    std::size_t in = 0, out = 0;
    if (!(is >> in >> out) || in == 0 || out == 0) throw FormatError("checkpoint: bad layer shape");
    DenseLayer layer(in, out);
    std::string tok;
    for (double& w : layer.weight) {
      if (!(is >> tok)) throw FormatError("checkpoint: truncated weights");
      w = parse_double(tok);
    }
    for (double& b : layer.bias) {
      if (!(is >> tok)) throw FormatError("checkpoint: truncated biases");
      b = parse_double(tok);
    }
    if (!state.layers.empty() && state.layers.back().out != in) {
      throw FormatError("checkpoint: layer " + std::to_string(l) + " input width mismatch");
    }
    state.layers.push_back(std::move(layer));
  }
  return state;
}

void save_checkpoint(const NetworkState& state, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("checkpoint: cannot open '" + path + "' for writing");
  save_checkpoint(state, os);
}

NetworkState load_checkpoint(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("checkpoint: cannot open '" + path + "'");
  return load_checkpoint(is);
}

}  // namespace afs
