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

#include "boxekg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "boxekg/errors.hpp"

namespace boxekg {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_finite(double v) {
  if (!std::isfinite(v)) throw NumericError("non-finite score passed to loss");
}

}  // namespace

void LossConfig::check() const {
  if (!(margin >= 0.0)) throw UsageError("loss margin must be >= 0");
  if (kind == LossKind::kSelfAdversarial && !(adversarial_temperature > 0.0)) {
    throw UsageError("adversarial temperature must be > 0");
  }
}

LossValue negative_sampling_loss(double positive, std::span<const double> negatives,
                                 double margin, std::optional<double> temperature) {
  if (negatives.empty()) throw UsageError("negative sampling loss needs >= 1 negative");
  require_finite(positive);
  for (double s : negatives) require_finite(s);

  const std::size_t k = negatives.size();
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  if (temperature) {
    double top = -std::numeric_limits<double>::infinity();
    for (double s : negatives) top = std::max(top, -*temperature * s);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      weights[i] = std::exp(-*temperature * negatives[i] - top);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;
  }

  LossValue out;
  // -log sigmoid(z) = softplus(-z)
  out.loss = softplus(positive - margin);
  out.d_positive = sigmoid(positive - margin);
  out.d_negatives.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.loss += weights[i] * softplus(margin - negatives[i]);
    out.d_negatives[i] = -weights[i] * sigmoid(margin - negatives[i]);
  }
  return out;
}

LossValue cross_entropy_loss(double positive, std::span<const double> negatives) {
  if (negatives.empty()) throw UsageError("cross-entropy loss needs >= 1 negative");
  require_finite(positive);
  for (double s : negatives) require_finite(s);

  double top = -positive;
  for (double s : negatives) top = std::max(top, -s);
  double total = std::exp(-positive - top);
  for (double s : negatives) total += std::exp(-s - top);
  const double log_z = top + std::log(total);

  LossValue out;
  out.loss = positive + log_z;
  out.d_positive = 1.0 - std::exp(-positive - log_z);
  out.d_negatives.resize(negatives.size());
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    out.d_negatives[i] = -std::exp(-negatives[i] - log_z);
  }
  return out;
}

double ns_loss(double positive, std::span<const double> negatives, double margin,
               std::optional<double> temperature) {
  return negative_sampling_loss(positive, negatives, margin, temperature).loss;
}

double ce_loss(double positive, std::span<const double> negatives) {
  return cross_entropy_loss(positive, negatives).loss;
}

LossValue evaluate_loss(const LossConfig& config, double positive,
                        std::span<const double> negatives) {
  switch (config.kind) {
    case LossKind::kNegativeSampling:
      return negative_sampling_loss(positive, negatives, config.margin);
    case LossKind::kSelfAdversarial:
      return negative_sampling_loss(positive, negatives, config.margin,
                                    config.adversarial_temperature);
    case LossKind::kCrossEntropy:
      return cross_entropy_loss(positive, negatives);
  }
  throw UsageError("unknown loss kind");
}

}  // namespace boxekg
