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

#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "boxekg/errors.hpp"
#include "boxekg/kg.hpp"
#include "boxekg/random.hpp"

namespace fs = std::filesystem;

namespace boxekg {
namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("boxekg_kg_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& body) const {
    std::ofstream(path_ / name) << body;
    return path_ / name;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset from_edges(std::size_t n, std::vector<BinaryFact> edges) {
  Dataset ds;
  ds.vocab = Vocabulary::numbered(n, 1, 1);
  std::sort(edges.begin(), edges.end());
  ds.edges = std::move(edges);
  return ds;
}

std::vector<std::size_t> degrees(const Dataset& ds) {
  std::vector<std::size_t> deg(ds.vocab.num_entities(), 0);
  for (const auto& e : ds.edges) {
    ++deg[e.head];
    if (e.tail != e.head) ++deg[e.tail];
  }
  return deg;
}

TEST(LoadDataset, MinimalInput) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "a\tr\tb\n");
  paths.train_labels = dir.write("labels.tsv", "a\tc1\n");
  const Dataset ds = load_dataset(paths);
  EXPECT_EQ(ds.vocab.num_entities(), 2u);
  EXPECT_EQ(ds.vocab.num_relations(), 1u);
  EXPECT_EQ(ds.vocab.num_classes(), 1u);
  EXPECT_EQ(ds.edges.size(), 1u);
  EXPECT_EQ(ds.labels.train.size(), 1u);
}

TEST(LoadDataset, IndexAssignmentIsDeterministic) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "zeta\tr2\talpha\nbeta\tr1\tzeta\n");
  const Dataset a = load_dataset(paths), b = load_dataset(paths);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.vocab.entities(), (std::vector<std::string>{"alpha", "beta", "zeta"}));
}

TEST(LoadDataset, DuplicateEdgesWarnAndDeduplicate) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "a\tr\tb\na\tr\tb\n");
  std::vector<std::string> warnings;
  const Dataset ds = load_dataset(paths, &warnings);
  EXPECT_EQ(ds.edges.size(), 1u);
  EXPECT_FALSE(warnings.empty());
}

TEST(LoadDataset, MalformedLineNamesFileAndLine) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "a\tr\tb\nonly_two\tfields\n");
  try {
    load_dataset(paths);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("edges.tsv:2"), std::string::npos) << e.what();
  }
}

TEST(LoadDataset, ConflictingLabelsAreRejected) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "a\tr\tb\n");
  paths.train_labels = dir.write("train.tsv", "a\tc1\n");
  paths.valid_labels = dir.write("valid.tsv", "a\tc2\n");
  EXPECT_THROW(load_dataset(paths), DataError);
}

TEST(LoadDataset, FeatureRowCountMismatchIsRejected) {
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", "a\tr\tb\n");
  paths.features = dir.write("features.txt", "k=2\na\t1,2\n");
  EXPECT_THROW(load_dataset(paths), DataError);
}

TEST(LoadDataset, MissingFileIsDataError) {
  DatasetPaths paths;
  paths.edges = "/nonexistent/boxekg/edges.tsv";
  EXPECT_THROW(load_dataset(paths), DataError);
}

TEST(LoadDataset, SaveLoadRoundTrip) {
  SyntheticConfig cfg;
  cfg.num_entities = 30;
  cfg.seed = 4;
  const Dataset ds = drop_edges(generate_synthetic(cfg), {0.2, 1}).dataset;
  TempDir dir;
  save_dataset(ds, dir.path());
  const Dataset back = load_dataset(DatasetPaths::in_directory(dir.path()));
  EXPECT_EQ(back.vocab, ds.vocab);
  EXPECT_EQ(back.edges, ds.edges);
  EXPECT_EQ(back.dropped_edges, ds.dropped_edges);
  EXPECT_EQ(back.labels, ds.labels);
  ASSERT_TRUE(back.features.has_value());
  EXPECT_EQ(*back.features, *ds.features);
}

TEST(LoadDataset, TableOneShapeLoadsAndValidates) {
  // 52,678 nodes, 121,836 edges, 24 classes, 29 relations.
  const std::size_t n = 52678, m = 121836, classes = 24, relations = 29;
  Rng rng(2024);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    edges.emplace(i % relations, i, (i + 1) % n);
  }
  while (edges.size() < m) {
    edges.emplace(rng.uniform_index(relations), rng.uniform_index(n), rng.uniform_index(n));
  }
  std::string body;
  for (const auto& [r, h, t] : edges) {
    body += "e" + std::to_string(h) + "\tr" + std::to_string(r) + "\te" + std::to_string(t) + "\n";
  }
  std::string labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels += "e" + std::to_string(i) + "\tc" + std::to_string(i % classes) + "\n";
  }
  TempDir dir;
  DatasetPaths paths;
  paths.edges = dir.write("edges.tsv", body);
  paths.train_labels = dir.write("labels.tsv", labels);
  const Dataset ds = load_dataset(paths);
  EXPECT_EQ(ds.vocab.num_entities(), n);
  EXPECT_EQ(ds.edges.size(), m);
  EXPECT_EQ(ds.vocab.num_classes(), classes);
  EXPECT_EQ(ds.vocab.num_relations(), relations);
  EXPECT_TRUE(validate(ds).ok());
}

TEST(Validate, ValidDatasetHasNoViolations) {
  SyntheticConfig cfg;
  cfg.seed = 9;
  EXPECT_TRUE(validate(generate_synthetic(cfg)).ok());
}

TEST(Validate, SplitOverlapNamesEntity) {
  SyntheticConfig cfg;
  cfg.seed = 9;
  Dataset ds = generate_synthetic(cfg);
  const UnaryFact shared = ds.labels.train.front();
  ds.labels.test.push_back(shared);
  const auto report = validate(ds);
  ASSERT_FALSE(report.ok());
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.kind == ViolationKind::kLabelSplitOverlap &&
        v.detail.find(ds.vocab.entity_name(shared.entity)) != std::string::npos) {
      found = true;
    }
  }
  EXPECT_TRUE(found) << report.to_records();
}

TEST(Validate, NonFiniteFeatureNamesRow) {
  SyntheticConfig cfg;
  cfg.seed = 9;
  Dataset ds = generate_synthetic(cfg);
  (*ds.features)(7, 1) = std::numeric_limits<double>::quiet_NaN();
  const auto report = validate(ds);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::kNonFiniteFeature);
  EXPECT_NE(report.violations.front().detail.find("7"), std::string::npos);
}

TEST(Validate, OutOfBoundsIndex) {
  Dataset ds = from_edges(2, {{0, 0, 5}});
  const auto report = validate(ds);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, ViolationKind::kIndexOutOfBounds);
}

TEST(Validate, IsolatedNodesAreInformational) {
  const Dataset ds = from_edges(3, {{0, 0, 1}});
  const auto report = validate(ds);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(report.isolated_entities, std::vector<EntityId>{2});
}

TEST(DropEdges, ZeroFractionIsIdentity) {
  const Dataset ds = from_edges(3, {{0, 0, 1}, {0, 1, 2}, {0, 2, 0}});
  const auto res = drop_edges(ds, {0.0, 1});
  EXPECT_EQ(res.dataset.edges, ds.edges);
  EXPECT_TRUE(res.dataset.dropped_edges.empty());
  EXPECT_TRUE(res.report.target_reached);
}

TEST(DropEdges, StarGraphCannotDrop) {
  const Dataset ds = from_edges(4, {{0, 0, 1}, {0, 0, 2}, {0, 0, 3}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = drop_edges(ds, {0.34, seed});
    EXPECT_EQ(res.report.requested, 1u);
    EXPECT_EQ(res.report.removed, 0u);
    EXPECT_FALSE(res.report.target_reached);
    EXPECT_EQ(res.dataset.edges, ds.edges);
  }
}

TEST(DropEdges, TriangleDropsExactlyOne) {
  const Dataset ds = from_edges(3, {{0, 0, 1}, {0, 1, 2}, {0, 2, 0}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto res = drop_edges(ds, {0.34, seed});
    EXPECT_EQ(res.report.removed, 1u);
    EXPECT_EQ(res.dataset.dropped_edges.size(), 1u);
    for (auto d : degrees(res.dataset)) EXPECT_GE(d, 1u);
  }
}

TEST(DropEdges, PreservesDegreeAndPartitionsEdges) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(15);
    std::set<BinaryFact> edges;
    const std::size_t m = 1 + rng.uniform_index(3 * n);
    for (std::size_t i = 0; i < m; ++i) {
      edges.insert({static_cast<RelationId>(rng.uniform_index(2)),
                    static_cast<EntityId>(rng.uniform_index(n)),
                    static_cast<EntityId>(rng.uniform_index(n))});
    }
    Dataset ds = from_edges(n, {edges.begin(), edges.end()});
    ds.vocab = Vocabulary::numbered(n, 1, 2);
    const auto before = degrees(ds);
    const DropSpec spec{rng.uniform(0.0, 0.95), rng.next()};
    const auto res = drop_edges(ds, spec);
    const auto after = degrees(res.dataset);
    for (std::size_t v = 0; v < n; ++v) {
      if (before[v] > 0) {
        EXPECT_GE(after[v], 1u);
      }
    }
    std::set<BinaryFact> merged(res.dataset.edges.begin(), res.dataset.edges.end());
    for (const auto& e : res.dataset.dropped_edges) EXPECT_TRUE(merged.insert(e).second);
    EXPECT_EQ(merged, edges);
    EXPECT_EQ(res.report.removed, res.dataset.dropped_edges.size());
    EXPECT_LE(res.report.removed, res.report.requested);
    const auto again = drop_edges(ds, spec);
    EXPECT_EQ(again.dataset.edges, res.dataset.edges);
  }
}

TEST(DropEdges, RejectsBadFraction) {
  const Dataset ds = from_edges(2, {{0, 0, 1}});
  EXPECT_THROW(drop_edges(ds, {1.0, 0}), UsageError);
  EXPECT_THROW(drop_edges(ds, {-0.1, 0}), UsageError);
}

TEST(Synthetic, TinyInstanceIsValid) {
  SyntheticConfig cfg;
  cfg.num_entities = 2;
  cfg.num_classes = 1;
  cfg.num_relations = 1;
  cfg.feature_dim = 1;
  cfg.train_fraction = 1.0;
  cfg.valid_fraction = 0.0;
  const Dataset ds = generate_synthetic(cfg);
  EXPECT_EQ(ds.labels.all().size(), 2u);
  EXPECT_TRUE(validate(ds).ok());
}

TEST(Synthetic, SameSeedSameBytes) {
  SyntheticConfig cfg;
  cfg.seed = 123;
  cfg.noise_edges = 20;
  TempDir dir;
  save_dataset(generate_synthetic(cfg), dir.path() / "a");
  save_dataset(generate_synthetic(cfg), dir.path() / "b");
  for (const char* f : {"edges.tsv", "labels_train.tsv", "labels_valid.tsv", "labels_test.tsv",
                        "features.txt"}) {
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
  }
}

TEST(Synthetic, CertainRuleProducesFullClosure) {
  SyntheticConfig cfg;
  cfg.num_entities = 20;
  cfg.num_classes = 2;
  cfg.num_relations = 2;
  cfg.rules = {{0, 1, 1, 1.0}};
  cfg.seed = 8;
  const Dataset ds = generate_synthetic(cfg);
  const auto cls = label_vector(ds);
  std::size_t count = 0;
  for (const auto& e : ds.edges) {
    EXPECT_EQ(e.relation, 1);
    EXPECT_EQ(cls[e.head], 0);
    EXPECT_EQ(cls[e.tail], 1);
    ++count;
  }
  EXPECT_EQ(count, 100u);
}

TEST(Synthetic, ClassesAreBalanced) {
  SyntheticConfig cfg;
  cfg.num_entities = 40;
  cfg.num_classes = 4;
  const auto cls = label_vector(generate_synthetic(cfg));
  std::map<ClassId, int> counts;
  for (auto c : cls) ++counts[c];
  for (const auto& [c, k] : counts) EXPECT_EQ(k, 10);
}

}  // namespace
}  // namespace boxekg
