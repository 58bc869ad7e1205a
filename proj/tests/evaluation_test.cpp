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

#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "boxekg/errors.hpp"
#include "boxekg/evaluation.hpp"
#include "boxekg/random.hpp"
#include "boxekg/training.hpp"
#include "oracles.hpp"

namespace boxekg {
namespace {

// One-dimensional model where the tail-corruption score of r(0, t) is
// |position(t)| up to a negligible box extent.
ModelParams line_model(std::vector<double> positions) {
  ModelConfig cfg;
  cfg.dim = 1;
  auto m = init_model(positions.size(), 1, 1, cfg, 0);
  for (std::size_t i = 0; i < positions.size(); ++i) m.point_emb(i, 0) = positions[i];
  m.bump_emb.setZero();
  m.head_boxes.center(0, 0) = positions[0];
  m.tail_boxes.center(0, 0) = 0.0;
  m.head_boxes.size_raw(0, 0) = m.tail_boxes.size_raw(0, 0) = -60.0;
  return m;
}

TEST(RankFact, BestScoreRanksFirst) {
  const auto m = line_model({0.1, 0.5, 0.9});
  EXPECT_EQ(rank_fact(m, {{0, 0, 0}, CorruptSide::kTail}), 1u);
  EXPECT_DOUBLE_EQ(metrics_from_ranks({1}).mrr, 1.0);
}

TEST(RankFact, FilteredCandidateIsSkipped) {
  const auto m = line_model({0.1, 0.05, 0.9});
  const std::vector<BinaryFact> known{{0, 0, 1}};
  const FactFilter filter(known);
  EXPECT_EQ(rank_fact(m, {{0, 0, 0}, CorruptSide::kTail}), 2u);
  EXPECT_EQ(rank_fact(m, {{0, 0, 0}, CorruptSide::kTail}, &filter), 1u);
}

TEST(RankFact, TiesCountHalf) {
  const auto m = line_model({0.3, 0.3, 0.3, 0.3, 0.3});
  // Four tied candidates: 1 + floor(4 / 2).
  EXPECT_EQ(rank_fact(m, {{0, 0, 0}, CorruptSide::kTail}), 3u);
}

TEST(Metrics, Arithmetic) {
  const auto all_one = metrics_from_ranks({1, 1, 1});
  EXPECT_DOUBLE_EQ(all_one.mr, 1.0);
  EXPECT_DOUBLE_EQ(all_one.mrr, 1.0);
  EXPECT_DOUBLE_EQ(all_one.hits.at(10), 1.0);
  const auto m = metrics_from_ranks({1, 4});
  EXPECT_DOUBLE_EQ(m.mr, 2.5);
  EXPECT_DOUBLE_EQ(m.mrr, 0.625);
  EXPECT_DOUBLE_EQ(m.hits.at(1), 0.5);
  EXPECT_DOUBLE_EQ(m.hits.at(3), 0.5);
  EXPECT_DOUBLE_EQ(m.hits.at(10), 1.0);
  EXPECT_THROW(metrics_from_ranks({}), UsageError);
}

TEST(Metrics, OrderIndependent) {
  std::vector<std::size_t> ranks{3, 1, 7, 12, 2, 2, 40};
  const auto a = metrics_from_ranks(ranks);
  std::reverse(ranks.begin(), ranks.end());
  const auto b = metrics_from_ranks(ranks);
  EXPECT_EQ(a.mr, b.mr);
  EXPECT_EQ(a.mrr, b.mrr);
  EXPECT_EQ(a.hits, b.hits);
}

TEST(Metrics, TableRow) {
  EXPECT_EQ(metrics_table_header(), "model\tMR\tMRR\tH@10");
  EXPECT_NE(metrics_table_row("boxe", metrics_from_ranks({1, 4})).find("boxe\t2.5"),
            std::string::npos);
}

struct Trained {
  Dataset ds;
  ModelParams params;
};

Trained trained_model(ModelMode mode, std::uint64_t seed) {
  SyntheticConfig sc;
  sc.num_entities = 10;
  sc.num_classes = 2;
  sc.num_relations = 2;
  sc.feature_dim = 3;
  sc.default_rule_probability = 0.3;
  sc.noise_edges = 4;
  sc.seed = seed;
  Dataset ds = drop_edges(generate_synthetic(sc), {0.2, seed}).dataset;
  ModelConfig mc;
  mc.dim = 8;
  mc.mode = mode;
  if (mode == ModelMode::kMlpBoxE) {
    mc.feature_dim = 3;
    mc.hidden = {8};
    mc.embedding_scale = 0.5;
  }
  TrainConfig tc;
  tc.epochs = 50;
  tc.learning_rate = 1e-2;
  tc.negatives.num_negatives = 4;
  tc.seed = seed;
  auto res = train(ds, mc, tc);
  return {std::move(ds), std::move(res.params)};
}

TEST(RankingMetrics, MatchesBruteForceRankForRank) {
  for (auto mode : {ModelMode::kBoxE, ModelMode::kMlpBoxE}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto t = trained_model(mode, seed);
      const Matrix* x = mode == ModelMode::kMlpBoxE ? &*t.ds.features : nullptr;
      std::vector<BinaryFact> eval = t.ds.dropped_edges;
      eval.insert(eval.end(), t.ds.edges.begin(), t.ds.edges.begin() + 3);
      std::set<BinaryFact> known(t.ds.edges.begin(), t.ds.edges.end());
      known.insert(t.ds.dropped_edges.begin(), t.ds.dropped_edges.end());
      FactFilter filter(t.ds.edges);
      filter.add(t.ds.dropped_edges);
      for (std::size_t threads : {1u, 3u}) {
        const auto unfiltered = ranking_metrics(t.params, eval, nullptr, x, threads);
        EXPECT_EQ(unfiltered.ranks, oracle::brute_force_ranks(t.params, eval, {}, x));
        const auto filtered = ranking_metrics(t.params, eval, &filter, x, threads);
        EXPECT_EQ(filtered.ranks, oracle::brute_force_ranks(t.params, eval, known, x));
      }
    }
  }
}

TEST(ClassifyNodes, CenterOfOneBox) {
  ModelConfig cfg;
  cfg.dim = 2;
  auto m = init_model(1, 3, 1, cfg, 0);
  m.point_emb << 4.0, -1.0;
  m.class_boxes.center.row(1) << 4.0, -1.0;
  m.class_boxes.center.row(0) << 0.0, 0.0;
  m.class_boxes.center.row(2) << 9.0, 9.0;
  const std::vector<EntityId> ids{0};
  EXPECT_EQ(classify_nodes(m, ids).at(0), 1);
}

TEST(ClassifyNodes, TieGoesToLowerClass) {
  ModelConfig cfg;
  cfg.dim = 1;
  auto m = init_model(1, 2, 1, cfg, 0);
  m.point_emb(0, 0) = 0.0;
  m.class_boxes.center(0, 0) = 2.0;
  m.class_boxes.center(1, 0) = -2.0;
  m.class_boxes.size_raw.setConstant(0.3);
  const std::vector<EntityId> ids{0};
  EXPECT_EQ(classify_nodes(m, ids).at(0), 0);
}

TEST(ClassifyNodes, MatchesIndependentArgmin) {
  for (auto mode : {ModelMode::kBoxE, ModelMode::kMlpBoxE}) {
    const auto t = trained_model(mode, 7);
    const Matrix* x = mode == ModelMode::kMlpBoxE ? &*t.ds.features : nullptr;
    std::vector<EntityId> ids(10);
    std::iota(ids.begin(), ids.end(), 0);
    const auto pred = classify_nodes(t.params, ids, x);
    for (EntityId e : ids) {
      ClassId best = 0;
      double best_score = oracle::score(t.params, UnaryFact{0, e}, x);
      for (ClassId c = 1; c < 2; ++c) {
        const double s = oracle::score(t.params, UnaryFact{c, e}, x);
        if (s < best_score) best_score = s, best = c;
      }
      EXPECT_EQ(pred.at(e), best);
    }
  }
}

TEST(Accuracy, Basics) {
  const std::vector<UnaryFact> gold{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const std::map<EntityId, ClassId> same{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  const std::map<EntityId, ClassId> one{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  EXPECT_DOUBLE_EQ(accuracy(same, gold), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(one, gold), 0.25);
  EXPECT_THROW(accuracy(same, std::vector<UnaryFact>{}), UsageError);
}

TEST(Accuracy, RandomPredictorOverTwentyFourClasses) {
  Rng rng(99);
  std::vector<UnaryFact> gold;
  std::map<EntityId, ClassId> pred;
  for (EntityId e = 0; e < 10000; ++e) {
    gold.push_back({static_cast<ClassId>(e % 24), e});
    pred[e] = static_cast<ClassId>(rng.uniform_index(24));
  }
  EXPECT_NEAR(accuracy(pred, gold), 1.0 / 24.0, 0.01);
}

}  // namespace
}  // namespace boxekg
