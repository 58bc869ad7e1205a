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

// Finite-difference gradient checker. The reference objective is rebuilt
// from the scalar oracle scorer and scalar loss formulas, so it shares no
// code with the analytic backward pass.

#ifndef BOXEKG_TESTS_GRADCHECK_HPP_
#define BOXEKG_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "boxekg/loss.hpp"
#include "boxekg/model.hpp"
#include "boxekg/random.hpp"
#include "oracles.hpp"

namespace boxekg::oracle {

inline double log_sigmoid_neg(double x) {  // -log(sigmoid(x))
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// Per-example negative weights, frozen at the unperturbed parameters. The
// self-adversarial weights are constants for the analytic gradient, so the
// reference must hold them fixed too.
inline std::vector<std::vector<double>> frozen_weights(const ModelParams& m,
                                                       const std::vector<TrainingExample>& batch,
                                                       const LossConfig& loss,
                                                       const Matrix* features) {
  std::vector<std::vector<double>> out;
  for (const auto& ex : batch) {
    const std::size_t k = ex.negatives.size();
    std::vector<double> w(k, k ? 1.0 / static_cast<double>(k) : 0.0);
    if (loss.kind == LossKind::kSelfAdversarial && k) {
      double top = -1e300;
      std::vector<double> a(k);
      for (std::size_t i = 0; i < k; ++i) {
        a[i] = -loss.adversarial_temperature * score(m, ex.negatives[i], features);
        top = std::max(top, a[i]);
      }
      double z = 0.0;
      for (auto& v : a) z += (v = std::exp(v - top));
      for (std::size_t i = 0; i < k; ++i) w[i] = a[i] / z;
    }
    out.push_back(std::move(w));
  }
  return out;
}

inline double reference_loss(const ModelParams& m, const std::vector<TrainingExample>& batch,
                             const LossConfig& loss, const Matrix* features,
                             const std::vector<std::vector<double>>& weights) {
  double total = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& ex = batch[b];
    const double pos = score(m, ex.positive, features);
    double l = 0.0;
    if (loss.kind == LossKind::kCrossEntropy) {
      std::vector<double> all{-pos};
      for (const auto& f : ex.negatives) all.push_back(-score(m, f, features));
      const double top = *std::max_element(all.begin(), all.end());
      double z = 0.0;
      for (double v : all) z += std::exp(v - top);
      l = pos + top + std::log(z);
    } else {
      l = log_sigmoid_neg(loss.margin - pos);
      for (std::size_t i = 0; i < ex.negatives.size(); ++i) {
        l += weights[b][i] * log_sigmoid_neg(score(m, ex.negatives[i], features) - loss.margin);
      }
    }
    total += ex.weight * l;
  }
  return total;
}

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst;
  double analytic_loss = 0.0;
  double reference_loss = 0.0;
};

// Relative error |a - n| / max(|a|, |n|, 1e-6) over every parameter.
inline GradCheck check_gradients(const ModelParams& model,
                                 const std::vector<TrainingExample>& batch,
                                 const LossConfig& loss, const Matrix* features,
                                 double h = 1e-4) {
  const auto analytic = loss_and_gradients(model, batch, loss, features);
  const auto weights = frozen_weights(model, batch, loss, features);
  ModelParams probe = model;
  GradCheck out;
  out.analytic_loss = analytic.loss;
  out.reference_loss = reference_loss(model, batch, loss, features, weights);
  auto objective = [&] { return reference_loss(probe, batch, loss, features, weights); };

  std::vector<Matrix*> targets;
  std::vector<std::string> names;
  probe.for_each_tensor([&](const std::string& name, Matrix& t) {
    targets.push_back(&t);
    names.push_back(name);
  });
  std::vector<const Matrix*> grads;
  analytic.gradients.for_each_tensor(
      [&](const std::string&, const Matrix& t) { grads.push_back(&t); });

  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (Eigen::Index i = 0; i < targets[t]->size(); ++i) {
      const double numeric = central_difference(objective, targets[t]->data()[i], h);
      const double a = grads[t]->data()[i];
      const double rel =
          std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-6});
      ++out.coordinates;
      if (rel > out.max_relative_error) {
        out.max_relative_error = rel;
        out.worst = names[t] + "[" + std::to_string(i) + "] analytic=" + std::to_string(a) +
                    " numeric=" + std::to_string(numeric);
      }
    }
  }
  return out;
}

struct GradInstance {
  ModelParams model;
  std::optional<Matrix> features;
  std::vector<TrainingExample> batch;
};

// Random small model and batch whose scored coordinates all sit at least
// `min_gap` away from any kink. Parameters are spread wider than the default
// initialization so both distance branches are exercised.
inline GradInstance random_grad_instance(std::uint64_t seed, ModelMode mode,
                                         double min_gap = 1e-3) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed * 1000003 + attempt);
    const std::size_t n = 3 + rng.uniform_index(3);  // 3..5
    const std::size_t d = 2 + rng.uniform_index(7);  // 2..8
    const std::size_t classes = 2 + rng.uniform_index(2);
    const std::size_t relations = 1 + rng.uniform_index(2);
    ModelConfig cfg;
    cfg.dim = d;
    cfg.mode = mode;
    cfg.norm = rng.bernoulli(0.5) ? NormOrder::kL2 : NormOrder::kL1;
    if (mode == ModelMode::kMlpBoxE) {
      cfg.feature_dim = 3;
      cfg.hidden = {5};
      cfg.embedding_scale = 0.5;
    }
    GradInstance inst{init_model(n, classes, relations, cfg, rng.next()), std::nullopt, {}};
    inst.model.for_each_tensor([&](const std::string& name, Matrix& t) {
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        t.data()[i] = name.ends_with("size") ? rng.uniform(-2.0, 1.5) : rng.uniform(-1.0, 1.0);
      }
    });
    if (mode == ModelMode::kMlpBoxE) {
      Matrix x(static_cast<Eigen::Index>(n), 3);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
      inst.features = std::move(x);
    }
    auto entity = [&] { return static_cast<EntityId>(rng.uniform_index(n)); };
    auto relation = [&] { return static_cast<RelationId>(rng.uniform_index(relations)); };
    std::vector<Fact> scored;
    for (int b = 0; b < 4; ++b) {
      TrainingExample ex;
      ex.weight = rng.uniform(0.2, 1.0);
      if (b % 2 == 0) {
        const auto c = static_cast<ClassId>(rng.uniform_index(classes));
        const EntityId e = entity();
        ex.positive = UnaryFact{c, e};
        for (std::size_t k = 0; k < classes; ++k) {
          if (static_cast<ClassId>(k) != c) ex.negatives.push_back(UnaryFact{ClassId(k), e});
        }
      } else {
        const BinaryFact pos{relation(), entity(), entity()};
        ex.positive = pos;
        for (int k = 0; k < 3; ++k) {
          BinaryFact neg = pos;
          (rng.bernoulli(0.5) ? neg.head : neg.tail) = entity();
          ex.negatives.push_back(neg);
        }
      }
      scored.push_back(ex.positive);
      scored.insert(scored.end(), ex.negatives.begin(), ex.negatives.end());
      inst.batch.push_back(std::move(ex));
    }
    const Matrix* x = inst.features ? &*inst.features : nullptr;
    if (kink_gap(inst.model, scored, x) >= min_gap) return inst;
  }
}

}  // namespace boxekg::oracle

#endif  // BOXEKG_TESTS_GRADCHECK_HPP_
