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

#ifndef BOXEKG_TRAINING_HPP_
#define BOXEKG_TRAINING_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxekg/kg.hpp"
#include "boxekg/loss.hpp"
#include "boxekg/model.hpp"
#include "boxekg/random.hpp"

namespace boxekg {

struct NegSampleConfig {
  // Per positive fact. Unary facts corrupt the class, binary facts corrupt
  // the head or the tail (chosen uniformly).
  std::size_t num_negatives = 100;
  // With cross-entropy, unary facts are scored against every other class
  // instead of sampled ones.
  bool full_class_softmax = true;
};

// Draws `count` corruptions of `fact`. Training negatives are not filtered
// against known facts. Throws UsageError when no corruption exists (a single
// class, or a single entity).
std::vector<Fact> sample_negatives(const Fact& fact, std::size_t num_entities,
                                   std::size_t num_classes, std::size_t count, Rng& rng);

// ---------------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed list of tensors.
class AdamState {
 public:
  explicit AdamState(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  std::size_t steps() const { return steps_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

  // Accumulators are allocated on the first call; later calls must pass the
  // same shapes in the same order. Throws DimensionError otherwise.
  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

 private:
  AdamConfig config_;
  std::size_t steps_ = 0;
  std::vector<Matrix> m_, v_;
};

void adam_step(AdamState& state, ModelParams& params, const ModelParams& grads);

// ---------------------------------------------------------------------------

enum class StoppingMetric { kNone, kValidAccuracy, kValidMrr };

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 512;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;
  LossConfig loss;
  NegSampleConfig negatives;
  // Train on the training label split as unary facts.
  bool use_classes = true;
  // Train on edges as binary facts.
  bool use_edges = true;
  // Relative weight of a unary example against a binary one.
  double unary_weight = 1.0;
  // Early stopping: the returned parameters are those of the best
  // validation epoch. Evaluated every `eval_every` epochs.
  StoppingMetric stopping = StoppingMetric::kNone;
  std::size_t patience = 50;
  std::size_t eval_every = 1;
  // Edges scored for kValidMrr (filtered against all dataset edges).
  std::vector<BinaryFact> validation_edges;

  void check() const;
};

struct LogRecord {
  std::size_t epoch;
  std::string split;
  std::string metric;
  double value;
};

struct TrainingLog {
  std::vector<LogRecord> records;
  std::size_t epochs_run = 0;
  // Epoch whose parameters were returned (0 = initialization).
  std::size_t best_epoch = 0;
  std::optional<double> best_metric;
  bool diverged = false;

  // Mean training loss per epoch, in order.
  std::vector<double> epoch_losses() const;
  // `epoch,split,metric,value` lines with a header.
  std::string to_csv() const;
};

struct TrainResult {
  ModelParams params;
  TrainingLog log;
};

// Joint training over training labels (unary facts) and edges (binary
// facts). Each epoch shuffles all facts with the seeded generator, cuts
// batches, samples negatives and applies one Adam step per batch. On a
// non-finite loss training stops and the last finite parameters are
// returned with log.diverged set.
TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& config);

// Same, starting from given parameters.
TrainResult train_from(const Dataset& dataset, ModelParams initial, const TrainConfig& config);

}  // namespace boxekg

#endif  // BOXEKG_TRAINING_HPP_
