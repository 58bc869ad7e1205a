// Copyright 2026 The boxekg Authors
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

#ifndef BOXEKG_LOSS_HPP_
#define BOXEKG_LOSS_HPP_

#include <optional>
#include <span>
#include <vector>

namespace boxekg {

enum class LossKind { kNegativeSampling, kSelfAdversarial, kCrossEntropy };

struct LossConfig {
  LossKind kind = LossKind::kNegativeSampling;
  // gamma; used by the negative-sampling kinds.
  double margin = 5.0;
  // alpha; used by the self-adversarial kind only.
  double adversarial_temperature = 1.0;

  // Throws UsageError for a negative margin or non-positive temperature.
  void check() const;
};

// Loss value with derivatives with respect to the positive and each
// negative score.
struct LossValue {
  double loss = 0.0;
  double d_positive = 0.0;
  std::vector<double> d_negatives;
};

// -log sigmoid(gamma - s_pos) - sum_i w_i log sigmoid(s_i - gamma), with
// w_i = 1/K, or w_i = softmax_i(-alpha * s_i) when `adversarial_temperature`
// is set. Self-adversarial weights are treated as constants when
// differentiating. Lower scores are more plausible.
LossValue negative_sampling_loss(double positive, std::span<const double> negatives,
                                 double margin,
                                 std::optional<double> adversarial_temperature = {});

// -log of the softmax probability of the positive among
// {positive} u negatives, computed on negated scores.
LossValue cross_entropy_loss(double positive, std::span<const double> negatives);

double ns_loss(double positive, std::span<const double> negatives, double margin,
               std::optional<double> adversarial_temperature = {});
double ce_loss(double positive, std::span<const double> negatives);

// Dispatches on config.kind.
LossValue evaluate_loss(const LossConfig& config, double positive,
                        std::span<const double> negatives);

}  // namespace boxekg

#endif  // BOXEKG_LOSS_HPP_
