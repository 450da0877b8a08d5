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
#include <span>
#include <string_view>
#include <vector>

namespace afs {

/// Probabilities below this floor are clamped before taking a logarithm.
inline constexpr double kMinProbability = 1e-12;

/// All loss hyper-parameters. Defaults are the published AFS settings.
struct LossConfig {
  double alpha = 0.25;        // scale of the focal / revised-focal weight
  double gamma = 2.0;         // focal-loss focusing exponent
  double mu = 0.3;            // centre of the revised-focal Gaussian weight
  double sigma = 0.5;         // width of the revised-focal Gaussian weight
  double beta = 0.1;          // strength of virtual distillation
  double temperature = 20.0;  // distillation temperature
  double epsilon = 0.01;      // virtual-teacher smoothing
  std::size_t num_classes = 10;

  /// Throws InvalidConfig when any field is outside its domain.
  void validate() const;
};

/// Difficulty band of a sample, keyed on its target-class probability.
enum class DifficultyInterval {
  kHard,       // p_t in [0, 0.3)
  kAmbiguous,  // p_t in [0.3, 0.6]
  kEasy,       // p_t in (0.6, 1]
};

std::string_view to_string(DifficultyInterval interval);

/// Value and gradient with respect to the logits of one per-sample loss.
struct LossOutput {
  double value = 0.0;
  std::vector<double> grad_logits;
  double p_target = 0.0;
};

/// Softmax with max-subtraction. Throws InvalidInput on empty or non-finite input.
std::vector<double> softmax_stable(std::span<const double> logits);

/// Softmax of logits / temperature.
std::vector<double> softmax_tempered(std::span<const double> logits, double temperature);

DifficultyInterval classify_difficulty(double p_target);

/// Gaussian re-weighting factor of the revised focal loss:
/// alpha * exp(-(p_t - mu)^2 / sigma).
double rfl_weight(double p_target, double alpha, double mu, double sigma);

LossOutput ce_loss(std::span<const double> logits, std::size_t target);

LossOutput focal_loss(std::span<const double> logits, std::size_t target, double alpha,
                      double gamma);

/// Revised focal loss: -alpha * exp(-(p_t - mu)^2 / sigma) * log(p_t).
///
/// The weight depends on p_t, so the gradient carries the derivative of the
/// Gaussian as well as that of the logarithm. For the target logit it reduces
/// to w * (2 p_t (p_t - mu) log p_t / sigma - 1) * (1 - p_t); non-target
/// logits follow from dp_t/dz_k = -p_t p_k.
LossOutput rfl_loss(std::span<const double> logits, std::size_t target, double alpha, double mu,
                    double sigma);

/// Virtual-teacher logits: 1 - epsilon on the target, epsilon / (C - 1) elsewhere.
std::vector<double> virtual_teacher(std::size_t target, std::size_t num_classes, double epsilon);

/// Tempered cross-entropy against a fixed teacher distribution, scaled by T^2:
/// -T^2 * sum_i teacher_i * log softmax(z / T)_i. Gradient: T * (p^T - teacher).
LossOutput distill_loss(std::span<const double> logits, std::span<const double> teacher_probs,
                        double temperature);

/// Virtual knowledge distillation. The teacher distribution is
/// softmax(virtual_teacher / T); the result already carries the T^2 factor.
LossOutput vkd_loss(std::span<const double> logits, std::size_t target, double temperature,
                    double epsilon, std::size_t num_classes);

/// Label-smoothing regulariser: cross-entropy against the smoothed label
/// vector itself (distill_loss at T = 1 with teacher = virtual_teacher).
LossOutput lsr_loss(std::span<const double> logits, std::size_t target, double epsilon);

/// rfl_loss + beta * vkd_loss.
LossOutput afs_loss(std::span<const double> logits, std::size_t target, const LossConfig& config);

// ---------------------------------------------------------------------------
// Loss composition used by the trainer and the ablation runner.

enum class ClassTerm { kCrossEntropy, kFocal, kRevisedFocal };
enum class RegTerm { kNone, kLabelSmoothing, kVirtualDistill };

struct LossRecipe {
  ClassTerm cls = ClassTerm::kRevisedFocal;
  RegTerm reg = RegTerm::kVirtualDistill;

  friend bool operator==(const LossRecipe&, const LossRecipe&) = default;
};

inline constexpr LossRecipe kAfsRecipe{ClassTerm::kRevisedFocal, RegTerm::kVirtualDistill};
inline constexpr LossRecipe kCrossEntropyRecipe{ClassTerm::kCrossEntropy, RegTerm::kNone};

std::string_view to_string(ClassTerm term);
std::string_view to_string(RegTerm term);

/// class_term + beta * reg_term. `mu` overrides config.mu for the revised
/// focal term when a per-class schedule is active.
LossOutput combined_loss(std::span<const double> logits, std::size_t target,
                         const LossRecipe& recipe, const LossConfig& config);
LossOutput combined_loss(std::span<const double> logits, std::size_t target,
                         const LossRecipe& recipe, const LossConfig& config, double mu);

}  // namespace afs
