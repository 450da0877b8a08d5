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

#include "afs/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "afs/error.hpp"

namespace afs {
namespace {

void check_logits(std::span<const double> logits, std::size_t target) {
  if (logits.empty()) throw InvalidInput("loss: empty logit vector");
  if (target >= logits.size()) {
    throw InvalidInput("loss: target " + std::to_string(target) + " out of range for " +
                       std::to_string(logits.size()) + " classes");
  }
}

double clamp_probability(double p) { return std::clamp(p, kMinProbability, 1.0); }

// Every loss that depends on the logits only through p_t has gradient
// dL/dz_k = (dL/dp_t * p_t) * (delta_tk - p_k). `scaled_derivative` is the
// first factor.
LossOutput through_target_probability(std::vector<double> probs, std::size_t target,
                                      double value, double scaled_derivative) {
  LossOutput out;
  out.value = value;
  out.p_target = probs[target];
  out.grad_logits = std::move(probs);
  for (std::size_t k = 0; k < out.grad_logits.size(); ++k) {
    const double delta = k == target ? 1.0 : 0.0;
    out.grad_logits[k] = scaled_derivative * (delta - out.grad_logits[k]);
  }
  return out;
}

std::vector<double> log_softmax_tempered(std::span<const double> logits, double temperature) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp((z - top) / temperature);
  const double log_norm = std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = (logits[i] - top) / temperature - log_norm;
  return out;
}

}  // namespace

void LossConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig("LossConfig: " + what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be finite and >= 0");
  if (!(mu >= 0.0 && mu <= 1.0)) fail("mu must lie in [0, 1]");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma must be > 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be finite and >= 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) fail("temperature must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0, 1)");
  if (num_classes < 2) fail("num_classes must be >= 2");
}

std::string_view to_string(DifficultyInterval interval) {
  switch (interval) {
    case DifficultyInterval::kHard:
      return "HSI";
    case DifficultyInterval::kAmbiguous:
      return "ASI";
    case DifficultyInterval::kEasy:
      return "ESI";
  }
  return "?";
}

std::vector<double> softmax_tempered(std::span<const double> logits, double temperature) {
  if (logits.empty()) throw InvalidInput("softmax: empty logit vector");
  if (!(temperature > 0.0)) throw InvalidInput("softmax: temperature must be > 0");
  for (double z : logits) {
    if (!std::isfinite(z)) throw InvalidInput("softmax: non-finite logit");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::vector<double> softmax_stable(std::span<const double> logits) {
  return softmax_tempered(logits, 1.0);
}

DifficultyInterval classify_difficulty(double p_target) {
  if (!(p_target >= 0.0 && p_target <= 1.0)) {
    throw InvalidInput("classify_difficulty: p_t must lie in [0, 1]");
  }
  if (p_target < 0.3) return DifficultyInterval::kHard;
  if (p_target <= 0.6) return DifficultyInterval::kAmbiguous;
  return DifficultyInterval::kEasy;
}

double rfl_weight(double p_target, double alpha, double mu, double sigma) {
  if (!(sigma > 0.0)) throw InvalidConfig("rfl_weight: sigma must be > 0");
  const double d = p_target - mu;
  return alpha * std::exp(-d * d / sigma);
}

LossOutput ce_loss(std::span<const double> logits, std::size_t target) {
  check_logits(logits, target);
  auto probs = softmax_stable(logits);
  const double pt = clamp_probability(probs[target]);
  return through_target_probability(std::move(probs), target, -std::log(pt), -1.0);
}

LossOutput focal_loss(std::span<const double> logits, std::size_t target, double alpha,
                      double gamma) {
  check_logits(logits, target);
  if (!(gamma >= 0.0)) throw InvalidConfig("focal_loss: gamma must be >= 0");
  auto probs = softmax_stable(logits);
  const double pt = clamp_probability(probs[target]);
  const double q = 1.0 - pt;
  const double log_pt = std::log(pt);
  const double value = -alpha * std::pow(q, gamma) * log_pt;

  // dL/dp_t * p_t = -alpha * (q^gamma - gamma q^(gamma-1) p_t log p_t).
  // As q -> 0 the second term behaves like q^gamma, so it vanishes for gamma > 0.
  double scaled;
  if (q > 0.0) {
    scaled = -alpha * (std::pow(q, gamma) - gamma * std::pow(q, gamma - 1.0) * pt * log_pt);
  } else {
    scaled = gamma == 0.0 ? -alpha : 0.0;
  }
  return through_target_probability(std::move(probs), target, value, scaled);
}

LossOutput rfl_loss(std::span<const double> logits, std::size_t target, double alpha, double mu,
                    double sigma) {
  check_logits(logits, target);
  auto probs = softmax_stable(logits);
  const double pt = clamp_probability(probs[target]);
  const double w = rfl_weight(pt, alpha, mu, sigma);
  const double log_pt = std::log(pt);
  const double scaled = w * (2.0 * pt * (pt - mu) * log_pt / sigma - 1.0);
  return through_target_probability(std::move(probs), target, -w * log_pt, scaled);
}

std::vector<double> virtual_teacher(std::size_t target, std::size_t num_classes, double epsilon) {
  if (num_classes < 2) throw InvalidConfig("virtual_teacher: num_classes must be >= 2");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InvalidConfig("virtual_teacher: epsilon must lie in [0, 1)");
  }
  if (target >= num_classes) throw InvalidInput("virtual_teacher: target out of range");
  std::vector<double> v(num_classes, epsilon / static_cast<double>(num_classes - 1));
  v[target] = 1.0 - epsilon;
  return v;
}

LossOutput distill_loss(std::span<const double> logits, std::span<const double> teacher_probs,
                        double temperature) {
  if (logits.size() != teacher_probs.size()) {
    throw InvalidInput("distill_loss: teacher and student sizes differ");
  }
  if (!(temperature > 0.0)) throw InvalidConfig("distill_loss: temperature must be > 0");
  auto student = softmax_tempered(logits, temperature);
  const auto log_student = log_softmax_tempered(logits, temperature);
  const double t2 = temperature * temperature;

  LossOutput out;
  double cross = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) cross -= teacher_probs[i] * log_student[i];
  out.value = t2 * cross;
  out.grad_logits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad_logits[i] = temperature * (student[i] - teacher_probs[i]);
  }
  return out;
}

LossOutput vkd_loss(std::span<const double> logits, std::size_t target, double temperature,
                    double epsilon, std::size_t num_classes) {
  check_logits(logits, target);
  if (logits.size() != num_classes) throw InvalidInput("vkd_loss: logit count != num_classes");
  const auto v = virtual_teacher(target, num_classes, epsilon);
  const auto teacher = softmax_tempered(v, temperature);
  auto out = distill_loss(logits, teacher, temperature);
  out.p_target = softmax_stable(logits)[target];
  return out;
}

LossOutput lsr_loss(std::span<const double> logits, std::size_t target, double epsilon) {
  check_logits(logits, target);
  const auto v = virtual_teacher(target, logits.size(), epsilon);
  auto out = distill_loss(logits, v, 1.0);
  out.p_target = softmax_stable(logits)[target];
  return out;
}

LossOutput afs_loss(std::span<const double> logits, std::size_t target, const LossConfig& config) {
  return combined_loss(logits, target, kAfsRecipe, config, config.mu);
}

std::string_view to_string(ClassTerm term) {
  switch (term) {
    case ClassTerm::kCrossEntropy:
      return "ce";
    case ClassTerm::kFocal:
      return "fl";
    case ClassTerm::kRevisedFocal:
      return "rfl";
  }
  return "?";
}

std::string_view to_string(RegTerm term) {
  switch (term) {
    case RegTerm::kNone:
      return "none";
    case RegTerm::kLabelSmoothing:
      return "lsr";
    case RegTerm::kVirtualDistill:
      return "vkd";
  }
  return "?";
}

LossOutput combined_loss(std::span<const double> logits, std::size_t target,
                         const LossRecipe& recipe, const LossConfig& config) {
  return combined_loss(logits, target, recipe, config, config.mu);
}

LossOutput combined_loss(std::span<const double> logits, std::size_t target,
                         const LossRecipe& recipe, const LossConfig& config, double mu) {
  LossOutput out;
  switch (recipe.cls) {
    case ClassTerm::kCrossEntropy:
      out = ce_loss(logits, target);
      break;
    case ClassTerm::kFocal:
      out = focal_loss(logits, target, config.alpha, config.gamma);
      break;
    case ClassTerm::kRevisedFocal:
      out = rfl_loss(logits, target, config.alpha, mu, config.sigma);
      break;
  }
  if (recipe.reg == RegTerm::kNone || config.beta == 0.0) return out;

  const LossOutput reg = recipe.reg == RegTerm::kVirtualDistill
                             ? vkd_loss(logits, target, config.temperature, config.epsilon,
                                        logits.size())
                             : lsr_loss(logits, target, config.epsilon);
  out.value += config.beta * reg.value;
  for (std::size_t k = 0; k < out.grad_logits.size(); ++k) {
    out.grad_logits[k] += config.beta * reg.grad_logits[k];
  }
  return out;
}

}  // namespace afs
