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

#ifndef BOXEKG_BASELINES_HPP_
#define BOXEKG_BASELINES_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "boxekg/kg.hpp"
#include "boxekg/mlp.hpp"
#include "boxekg/tensor.hpp"

namespace boxekg {

struct LabelPropagationConfig {
  std::size_t max_iters = 1000;
  double tolerance = 1e-6;
};

struct LabelDistribution {
  Matrix probabilities;             // |E| x |C|, rows sum to 1
  std::vector<ClassId> predictions;  // argmax, ties -> lowest class
  // No path from any seed label; such rows stay uniform.
  std::vector<bool> unreachable;
  std::size_t iterations = 0;
  // Largest absolute entry change of each iteration.
  std::vector<double> max_changes;
};

// Iterates Y <- D^-1 A Y on the undirected graph with relations and
// multi-edges collapsed, re-clamping the seed rows to one-hot after each
// step. Unlabeled rows start uniform. Throws UsageError with no seeds.
LabelDistribution label_propagation(std::size_t num_entities, std::size_t num_classes,
                                    std::span<const BinaryFact> edges,
                                    std::span<const UnaryFact> seeds,
                                    const LabelPropagationConfig& config = {});

// Seeds are the training labels.
LabelDistribution label_propagation(const Dataset& dataset,
                                    const LabelPropagationConfig& config = {});

std::map<EntityId, ClassId> to_prediction_map(const LabelDistribution& dist);

// ---------------------------------------------------------------------------

struct MlpClassifierConfig {
  std::vector<std::size_t> hidden = {512, 512};
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
};

struct MlpClassifier {
  Mlp net;  // k -> hidden... -> |C| logits
  // Epoch whose weights were kept (validation peak), or the last epoch.
  std::size_t best_epoch = 0;
};

// Softmax cross-entropy with Adam over the labeled rows only. When
// `validation` is non-empty the weights of the best validation epoch are
// kept. Throws UsageError without features or labels.
MlpClassifier mlp_classifier_train(const Matrix& features, std::span<const UnaryFact> labels,
                                   std::size_t num_classes, const MlpClassifierConfig& config,
                                   std::uint64_t seed,
                                   std::span<const UnaryFact> validation = {});

// argmax of the logits for every row; ties -> lowest class.
std::vector<ClassId> mlp_classifier_predict(const MlpClassifier& classifier,
                                            const Matrix& features);

std::map<EntityId, ClassId> to_prediction_map(const std::vector<ClassId>& predictions);

}  // namespace boxekg

#endif  // BOXEKG_BASELINES_HPP_
