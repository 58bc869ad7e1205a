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

#include <gtest/gtest.h>

#include "boxekg/baselines.hpp"
#include "boxekg/errors.hpp"
#include "boxekg/evaluation.hpp"
#include "boxekg/random.hpp"

namespace boxekg {
namespace {

TEST(LabelPropagation, PathGraphFixedPoint) {
  // a - b - c with a in class 0 and c in class 1: b = (0.5, 0.5).
  const std::vector<BinaryFact> edges{{0, 0, 1}, {0, 1, 2}};
  const std::vector<UnaryFact> seeds{{0, 0}, {1, 2}};
  const auto lp = label_propagation(3, 2, edges, seeds);
  EXPECT_NEAR(lp.probabilities(1, 0), 0.5, 1e-6);
  EXPECT_NEAR(lp.probabilities(1, 1), 0.5, 1e-6);
  EXPECT_EQ(lp.predictions[1], 0);
  EXPECT_EQ(lp.predictions[0], 0);
  EXPECT_EQ(lp.predictions[2], 1);
}

TEST(LabelPropagation, LongerPathMatchesLinearInterpolation) {
  // Harmonic solution on a path with clamped ends is linear.
  std::vector<BinaryFact> edges;
  for (EntityId i = 0; i + 1 < 6; ++i) edges.push_back({0, i, i + 1});
  const std::vector<UnaryFact> seeds{{0, 0}, {1, 5}};
  LabelPropagationConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.max_iters = 100000;
  const auto lp = label_propagation(6, 2, edges, seeds, cfg);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(lp.probabilities(i, 1), i / 5.0, 1e-9);
}

TEST(LabelPropagation, FullyLabeledGraphKeepsLabels) {
  const std::vector<BinaryFact> edges{{0, 0, 1}, {1, 1, 2}, {0, 2, 0}};
  const std::vector<UnaryFact> seeds{{2, 0}, {0, 1}, {1, 2}};
  const auto lp = label_propagation(3, 3, edges, seeds);
  EXPECT_EQ(lp.predictions, (std::vector<ClassId>{2, 0, 1}));
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(lp.probabilities.row(i).sum(), 1.0);
}

TEST(LabelPropagation, DisconnectedComponentIsUniformAndFlagged) {
  const std::vector<BinaryFact> edges{{0, 0, 1}, {0, 2, 3}};
  const std::vector<UnaryFact> seeds{{1, 0}};
  const auto lp = label_propagation(4, 3, edges, seeds);
  EXPECT_FALSE(lp.unreachable[1]);
  EXPECT_TRUE(lp.unreachable[2]);
  EXPECT_TRUE(lp.unreachable[3]);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(lp.probabilities(3, j), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(lp.predictions[1], 1);
}

TEST(LabelPropagation, RowsSumToOneAndMaxChangeDecreases) {
  SyntheticConfig sc;
  sc.num_entities = 80;
  sc.num_classes = 3;
  sc.default_rule_probability = 0.1;
  sc.noise_edges = 40;
  sc.seed = 5;
  const Dataset ds = generate_synthetic(sc);
  const auto lp = label_propagation(ds);
  for (Eigen::Index i = 0; i < lp.probabilities.rows(); ++i) {
    EXPECT_NEAR(lp.probabilities.row(i).sum(), 1.0, 1e-9);
  }
  // Connectivity is not guaranteed, but unreachable rows never change.
  for (std::size_t k = 2; k < lp.max_changes.size(); ++k) {
    EXPECT_LE(lp.max_changes[k], lp.max_changes[k - 1] + 1e-12) << k;
  }
}

TEST(LabelPropagation, IgnoresFeaturesAndRelations) {
  SyntheticConfig sc;
  sc.seed = 6;
  Dataset ds = generate_synthetic(sc);
  const auto base = label_propagation(ds);
  ds.features->setRandom();
  for (auto& e : ds.edges) e.relation = 0;
  std::sort(ds.edges.begin(), ds.edges.end());
  ds.edges.erase(std::unique(ds.edges.begin(), ds.edges.end()), ds.edges.end());
  const auto again = label_propagation(ds);
  EXPECT_EQ(base.probabilities, again.probabilities);
}

TEST(LabelPropagation, NoSeedsIsError) {
  const std::vector<BinaryFact> edges{{0, 0, 1}};
  EXPECT_THROW(label_propagation(2, 2, edges, {}), UsageError);
}

Matrix separable_features(std::vector<UnaryFact>& labels, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(static_cast<Eigen::Index>(n), 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng.uniform(-1, 1);
    const ClassId c = x(i, 0) + 0.5 * x(i, 1) > 0 ? 1 : 0;
    x(i, 0) += c ? 0.2 : -0.2;  // margin
    labels.push_back({c, static_cast<EntityId>(i)});
  }
  return x;
}

TEST(MlpClassifier, SeparableInstanceReachesNinetyNine) {
  std::vector<UnaryFact> labels;
  const Matrix x = separable_features(labels, 200, 1);
  MlpClassifierConfig cfg;
  cfg.hidden = {32, 32};
  cfg.epochs = 500;
  cfg.batch_size = 32;
  const auto clf = mlp_classifier_train(x, labels, 2, cfg, 7);
  const auto acc = accuracy(to_prediction_map(mlp_classifier_predict(clf, x)), labels);
  EXPECT_GE(acc, 0.99);
}

TEST(MlpClassifier, ConstantFeaturesCarryNoSignal) {
  std::vector<UnaryFact> labels;
  for (EntityId i = 0; i < 90; ++i) labels.push_back({i % 3 == 0 ? 1 : 0, i});
  const Matrix x = Matrix::Constant(90, 3, 0.7);
  MlpClassifierConfig cfg;
  cfg.hidden = {16, 16};
  cfg.epochs = 50;
  const auto clf = mlp_classifier_train(x, labels, 2, cfg, 1);
  const auto acc = accuracy(to_prediction_map(mlp_classifier_predict(clf, x)), labels);
  EXPECT_LE(acc, 60.0 / 90.0 + 0.02);
}

TEST(MlpClassifier, DeterministicPerSeed) {
  std::vector<UnaryFact> labels;
  const Matrix x = separable_features(labels, 60, 2);
  MlpClassifierConfig cfg;
  cfg.hidden = {8, 8};
  cfg.epochs = 20;
  const auto a = mlp_classifier_train(x, labels, 2, cfg, 3);
  const auto b = mlp_classifier_train(x, labels, 2, cfg, 3);
  EXPECT_EQ(a.net, b.net);
  EXPECT_EQ(mlp_classifier_predict(a, x), mlp_classifier_predict(b, x));
}

TEST(MlpClassifier, MissingFeaturesIsError) {
  const std::vector<UnaryFact> labels{{0, 0}};
  EXPECT_THROW(mlp_classifier_train(Matrix(), labels, 1, {}, 0), UsageError);
}

}  // namespace
}  // namespace boxekg
