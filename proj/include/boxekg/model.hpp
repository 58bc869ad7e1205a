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

#ifndef BOXEKG_MODEL_HPP_
#define BOXEKG_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boxekg/box.hpp"
#include "boxekg/kg.hpp"
#include "boxekg/loss.hpp"
#include "boxekg/mlp.hpp"
#include "boxekg/tensor.hpp"

namespace boxekg {

enum class ModelMode { kBoxE, kMlpBoxE };

struct ModelConfig {
  std::size_t dim = 128;
  NormOrder norm = NormOrder::kL2;
  ModelMode mode = ModelMode::kBoxE;
  // Factor applied to the point and bump embeddings before the MLP outputs
  // are added. Only used in MLP-BoxE mode.
  double embedding_scale = 1.0;
  // Hidden layer sizes of both feature MLPs.
  std::vector<std::size_t> hidden = {1000, 1000};
  // Input feature dimension k; MLP-BoxE mode only.
  std::size_t feature_dim = 0;

  bool feature_mode() const { return mode == ModelMode::kMlpBoxE; }
  // Throws UsageError when inconsistent.
  void check() const;
  bool operator==(const ModelConfig&) const = default;
};

// Trainable boxes: the extent on each axis is softplus(size_raw), so the
// box can never invert.
struct BoxSet {
  Matrix center;    // n x d
  Matrix size_raw;  // n x d

  std::size_t size() const { return static_cast<std::size_t>(center.rows()); }
  Box box(std::size_t i) const;
  bool operator==(const BoxSet&) const = default;
};

double softplus(double x);
double inverse_softplus(double y);

struct ModelParams {
  ModelConfig config;
  Matrix point_emb;  // |E| x d
  Matrix bump_emb;   // |E| x d
  BoxSet class_boxes;
  BoxSet head_boxes;
  BoxSet tail_boxes;
  std::optional<Mlp> point_mlp;
  std::optional<Mlp> bump_mlp;

  std::size_t num_entities() const { return static_cast<std::size_t>(point_emb.rows()); }
  std::size_t num_classes() const { return class_boxes.size(); }
  std::size_t num_relations() const { return head_boxes.size(); }

  // Same shapes, all zeros.
  ModelParams zeros_like() const;

  // Visits every tensor with a stable name, in a fixed order.
  template <typename Fn>
  void for_each_tensor(Fn&& fn) {
    visit(*this, fn);
  }
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const {
    visit(*this, fn);
  }

  bool operator==(const ModelParams&) const = default;

 private:
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn& fn) {
    fn("point_emb", self.point_emb);
    fn("bump_emb", self.bump_emb);
    fn("class_center", self.class_boxes.center);
    fn("class_size", self.class_boxes.size_raw);
    fn("head_center", self.head_boxes.center);
    fn("head_size", self.head_boxes.size_raw);
    fn("tail_center", self.tail_boxes.center);
    fn("tail_size", self.tail_boxes.size_raw);
    auto visit_mlp = [&](const char* prefix, auto& mlp) {
      if (!mlp) return;
      for (std::size_t l = 0; l < mlp->layers.size(); ++l) {
        const std::string base = std::string(prefix) + "." + std::to_string(l);
        fn(base + ".weight", mlp->layers[l].weight);
        fn(base + ".bias", mlp->layers[l].bias);
      }
    };
    visit_mlp("point_mlp", self.point_mlp);
    visit_mlp("bump_mlp", self.bump_mlp);
  }
};

// Embeddings and box centers ~ U(-0.5/sqrt(d), 0.5/sqrt(d)); box extents
// start at 0.05 (width upper - lower + 1 = 1.05); MLPs use fan-in scaled
// uniform init.
ModelParams init_model(std::size_t num_entities, std::size_t num_classes,
                       std::size_t num_relations, const ModelConfig& config,
                       std::uint64_t seed);

struct EntityRepresentation {
  Vector position;
  Vector bump;
};

// Position and bump of one entity: the stored rows in BoxE mode,
// scale * embedding + MLP(features) in MLP-BoxE mode.
EntityRepresentation entity_representation(const ModelParams& model, EntityId entity,
                                           const Matrix* features = nullptr);

// Positions and bumps of all entities, computed once.
struct Representations {
  Matrix positions;
  Matrix bumps;
};
Representations compute_representations(const ModelParams& model,
                                         const Matrix* features = nullptr);

// Materialized boxes, so repeated scoring need not rebuild them.
struct BoxCache {
  std::vector<Box> classes, heads, tails;
  explicit BoxCache(const ModelParams& model);
};

double score_fact(const ModelParams& model, const Fact& fact,
                  const Matrix* features = nullptr);
double score_fact(const Representations& reps, const BoxCache& boxes, NormOrder norm,
                  const Fact& fact);

// A positive fact with its negatives; the loss of this example is scaled by
// `weight` in the batch total.
struct TrainingExample {
  Fact positive;
  std::vector<Fact> negatives;
  double weight = 1.0;
};

struct LossAndGradients {
  double loss = 0.0;
  ModelParams gradients;
};

// Exact gradients of sum_i weight_i * loss_i over the batch with respect to
// every parameter. Throws NumericError naming the offending fact or tensor
// when a non-finite value appears.
LossAndGradients loss_and_gradients(const ModelParams& model,
                                    std::span<const TrainingExample> batch,
                                    const LossConfig& loss,
                                    const Matrix* features = nullptr);

// Batch loss only (no gradients); same value as loss_and_gradients().loss.
double batch_loss(const ModelParams& model, std::span<const TrainingExample> batch,
                  const LossConfig& loss, const Matrix* features = nullptr);

// --- checkpoints -------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

// Writes config, vocabulary and all tensors as JSON with round-trip exact
// doubles.
void save_model(const std::filesystem::path& path, const ModelParams& model,
                const Vocabulary& vocab);

struct LoadedModel {
  ModelParams params;
  Vocabulary vocab;
};

// Throws DataError on version mismatch, corrupt files, or tensor shapes that
// disagree with the stored config and vocabulary.
LoadedModel load_model(const std::filesystem::path& path);

std::string to_string(ModelMode mode);
std::string to_string(NormOrder norm);

}  // namespace boxekg

#endif  // BOXEKG_MODEL_HPP_
