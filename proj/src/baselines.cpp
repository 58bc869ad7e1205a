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

#include "boxekg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "boxekg/errors.hpp"
#include "boxekg/evaluation.hpp"
#include "boxekg/random.hpp"
#include "boxekg/training.hpp"

namespace boxekg {
namespace {

ClassId argmax_row(const Matrix& m, Eigen::Index row) {
  ClassId best = 0;
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = static_cast<ClassId>(c);
  }
  return best;
}

}  // namespace

LabelDistribution label_propagation(std::size_t n, std::size_t n_c,
                                    std::span<const BinaryFact> edges,
                                    std::span<const UnaryFact> seeds,
                                    const LabelPropagationConfig& config) {
  if (seeds.empty()) throw UsageError("label propagation needs at least one labeled node");
  if (n_c == 0) throw UsageError("label propagation needs at least one class");

  std::vector<std::vector<EntityId>> adj(n);
  for (const auto& e : edges) {
    if (e.head == e.tail) continue;
    adj[e.head].push_back(e.tail);
    adj[e.tail].push_back(e.head);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(n_c);
  LabelDistribution out;
  Matrix y = Matrix::Constant(rows, cols, 1.0 / static_cast<double>(n_c));
  std::vector<bool> clamped(n, false);
  for (const auto& s : seeds) {
    y.row(s.entity).setZero();
    y(s.entity, s.cls) = 1.0;
    clamped[s.entity] = true;
  }

  out.unreachable.assign(n, true);
  std::deque<EntityId> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (clamped[i]) {
      out.unreachable[i] = false;
      queue.push_back(static_cast<EntityId>(i));
    }
  }
  while (!queue.empty()) {
    const EntityId v = queue.front();
    queue.pop_front();
    for (EntityId u : adj[v]) {
      if (out.unreachable[u]) {
        out.unreachable[u] = false;
        queue.push_back(u);
      }
    }
  }

  Matrix next = y;
  for (std::size_t it = 0; it < config.max_iters; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (clamped[i] || adj[i].empty()) continue;
      next.row(i).setZero();
      for (EntityId u : adj[i]) next.row(i) += y.row(u);
      next.row(i) /= static_cast<double>(adj[i].size());
      change = std::max(change, (next.row(i) - y.row(i)).cwiseAbs().maxCoeff());
    }
    std::swap(y, next);
    next = y;
    ++out.iterations;
    out.max_changes.push_back(change);
    if (change < config.tolerance) break;
  }

  out.probabilities = std::move(y);
  out.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.predictions[i] = argmax_row(out.probabilities, static_cast<Eigen::Index>(i));
  }
  return out;
}

LabelDistribution label_propagation(const Dataset& dataset,
                                    const LabelPropagationConfig& config) {
  return label_propagation(dataset.vocab.num_entities(), dataset.vocab.num_classes(),
                           dataset.edges, dataset.labels.train, config);
}

std::map<EntityId, ClassId> to_prediction_map(const LabelDistribution& dist) {
  return to_prediction_map(dist.predictions);
}

std::map<EntityId, ClassId> to_prediction_map(const std::vector<ClassId>& predictions) {
  std::map<EntityId, ClassId> out;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out.emplace(static_cast<EntityId>(i), predictions[i]);
  }
  return out;
}

MlpClassifier mlp_classifier_train(const Matrix& features, std::span<const UnaryFact> labels,
                                   std::size_t num_classes, const MlpClassifierConfig& config,
                                   std::uint64_t seed, std::span<const UnaryFact> validation) {
  if (features.rows() == 0 || features.cols() == 0) throw UsageError("MLP baseline needs features");
  if (labels.empty()) throw UsageError("MLP baseline needs labels");
  if (num_classes < 1) throw UsageError("MLP baseline needs classes");
  if (config.batch_size < 1) throw UsageError("batch size must be >= 1");

  Rng rng(seed);
  std::vector<std::size_t> sizes{static_cast<std::size_t>(features.cols())};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(num_classes);

  MlpClassifier clf{Mlp::random(sizes, rng), 0};
  MlpClassifier best = clf;
  double best_acc = -1.0;
  auto valid_accuracy = [&](const MlpClassifier& c) {
    return accuracy(to_prediction_map(mlp_classifier_predict(c, features)), validation);
  };
  if (!validation.empty()) best_acc = valid_accuracy(clf);

  AdamState adam(AdamConfig{config.learning_rate});
  std::vector<UnaryFact> order(labels.begin(), labels.end());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(std::span<UnaryFact>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const auto b = static_cast<Eigen::Index>(end - start);
      Matrix x(b, features.cols());
      for (Eigen::Index i = 0; i < b; ++i) x.row(i) = features.row(order[start + i].entity);
      Mlp::Trace trace;
      const Matrix logits = clf.net.forward(x, &trace);
      // d(mean CE)/dlogits = (softmax - onehot) / b
      Matrix d = logits;
      for (Eigen::Index i = 0; i < b; ++i) {
        const double top = d.row(i).maxCoeff();
        d.row(i) = (d.row(i).array() - top).exp().matrix();
        d.row(i) /= d.row(i).sum();
        d(i, order[start + i].cls) -= 1.0;
      }
      d /= static_cast<double>(b);
      Mlp grad(sizes);
      clf.net.backward(trace, d, grad);
      std::vector<Matrix*> p;
      std::vector<const Matrix*> g;
      for (std::size_t l = 0; l < clf.net.layers.size(); ++l) {
        p.push_back(&clf.net.layers[l].weight);
        p.push_back(&clf.net.layers[l].bias);
        g.push_back(&grad.layers[l].weight);
        g.push_back(&grad.layers[l].bias);
      }
      adam.step(p, g);
    }
    clf.best_epoch = epoch;
    if (!validation.empty()) {
      const double acc = valid_accuracy(clf);
      if (acc > best_acc) {
        best_acc = acc;
        best = clf;
      }
    }
  }
  return validation.empty() ? clf : best;
}

std::vector<ClassId> mlp_classifier_predict(const MlpClassifier& classifier,
                                            const Matrix& features) {
  const Matrix logits = classifier.net.forward(features);
  std::vector<ClassId> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out[i] = argmax_row(logits, i);
  return out;
}

}  // namespace boxekg
