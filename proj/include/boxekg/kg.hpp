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

#ifndef BOXEKG_KG_HPP_
#define BOXEKG_KG_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "boxekg/tensor.hpp"

namespace boxekg {

// Dense indices into the vocabulary.
using EntityId = std::int32_t;
using ClassId = std::int32_t;
using RelationId = std::int32_t;

// c(e)
struct UnaryFact {
  ClassId cls = 0;
  EntityId entity = 0;
  auto operator<=>(const UnaryFact&) const = default;
};

// r(h, t)
struct BinaryFact {
  RelationId relation = 0;
  EntityId head = 0;
  EntityId tail = 0;
  auto operator<=>(const BinaryFact&) const = default;
};

using Fact = std::variant<UnaryFact, BinaryFact>;

// Packs a binary fact into a single key for hash sets.
inline std::uint64_t fact_key(const BinaryFact& f) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(f.relation)) << 42) ^
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(f.head)) << 21) ^
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(f.tail));
}

// Names of entities, classes and relations, each indexed densely in
// lexicographic order.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Sorts and deduplicates each name list.
  static Vocabulary from_names(std::vector<std::string> entities,
                               std::vector<std::string> classes,
                               std::vector<std::string> relations);

  // Anonymous vocabulary with generated zero-padded names ("e0", "c0", "r0").
  static Vocabulary numbered(std::size_t num_entities, std::size_t num_classes,
                             std::size_t num_relations);

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_relations() const { return relations_.size(); }

  const std::string& entity_name(EntityId id) const { return entities_.at(id); }
  const std::string& class_name(ClassId id) const { return classes_.at(id); }
  const std::string& relation_name(RelationId id) const { return relations_.at(id); }

  const std::vector<std::string>& entities() const { return entities_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<std::string>& relations() const { return relations_; }

  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<ClassId> find_class(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;

  bool operator==(const Vocabulary& other) const {
    return entities_ == other.entities_ && classes_ == other.classes_ &&
           relations_ == other.relations_;
  }

 private:
  void rebuild_index();

  std::vector<std::string> entities_, classes_, relations_;
  std::unordered_map<std::string, std::int32_t> entity_index_, class_index_,
      relation_index_;
};

struct LabelSplits {
  std::vector<UnaryFact> train, valid, test;

  // Union of all three splits, sorted by entity.
  std::vector<UnaryFact> all() const;
  bool operator==(const LabelSplits&) const = default;
};

struct Dataset {
  Vocabulary vocab;
  // Sorted and duplicate-free.
  std::vector<BinaryFact> edges;
  LabelSplits labels;
  // One row per entity when present.
  std::optional<Matrix> features;
  // Edges held out for link-prediction evaluation; disjoint from `edges`.
  std::vector<BinaryFact> dropped_edges;

  bool operator==(const Dataset& other) const;
};

struct DatasetPaths {
  std::filesystem::path edges;
  std::optional<std::filesystem::path> train_labels, valid_labels, test_labels;
  std::optional<std::filesystem::path> features;
  std::optional<std::filesystem::path> dropped_edges;

  // Standard file names inside a dataset directory; optional files are set
  // only if they exist.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Parses the edge/label/feature files. The vocabulary is the sorted union of
// every name mentioned in any file. Duplicate facts are dropped with a
// warning appended to `warnings` (if given). Throws DataError on malformed
// input, naming the file and line.
Dataset load_dataset(const DatasetPaths& paths,
                     std::vector<std::string>* warnings = nullptr);

// Writes edges.tsv, labels_{train,valid,test}.tsv, and when present
// features.txt and dropped.tsv into `dir` (created if needed).
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// Serializers for the individual file formats.
std::string format_edges(const Vocabulary& vocab, const std::vector<BinaryFact>& edges);
std::string format_labels(const Vocabulary& vocab, const std::vector<UnaryFact>& labels);
std::string format_features(const Vocabulary& vocab, const Matrix& features);

// Reads an edge file against an existing vocabulary (e.g. a checkpoint's).
// Unknown names are a DataError.
std::vector<BinaryFact> load_edges_with_vocab(const std::filesystem::path& path,
                                              const Vocabulary& vocab);
std::vector<UnaryFact> load_labels_with_vocab(const std::filesystem::path& path,
                                              const Vocabulary& vocab);

// --- validation -----------------------------------------------------------

enum class ViolationKind {
  kIndexOutOfBounds,
  kDuplicateFact,
  kLabelSplitOverlap,
  kConflictingLabel,
  kNonFiniteFeature,
  kFeatureShape,
  kDroppedOverlap,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  // Entities with no incident edge. Informational; not a violation.
  std::vector<EntityId> isolated_entities;

  bool ok() const { return violations.empty(); }
  // One `key: value` record per line.
  std::string to_records() const;
};

ValidationReport validate(const Dataset& dataset);

// `key: value` summary of sizes (entities, edges, labels per split, ...).
std::string dataset_stats(const Dataset& dataset);

// --- edge dropping ---------------------------------------------------------

struct DropSpec {
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

struct DropReport {
  std::size_t requested = 0;
  std::size_t removed = 0;
  // False when the isolation constraint prevented reaching `requested`.
  bool target_reached = true;
};

struct DropResult {
  Dataset dataset;
  DropReport report;
};

// Removes floor(fraction * |edges|) edges, visiting them in seeded random
// order and skipping any edge whose removal would leave one of its endpoints
// without incident edges (undirected view). Removed edges are appended to
// dropped_edges.
DropResult drop_edges(const Dataset& dataset, const DropSpec& spec);

// --- synthetic data ----------------------------------------------------------

// Every pair (h, t), h != t, with class(h) = head_class and
// class(t) = tail_class receives edge r(h, t) with this probability.
struct PlantedRule {
  ClassId head_class = 0;
  RelationId relation = 0;
  ClassId tail_class = 0;
  double probability = 0.0;
};

struct SyntheticConfig {
  std::size_t num_entities = 100;
  std::size_t num_classes = 4;
  std::size_t num_relations = 4;
  // Feature dimension; 0 disables features.
  std::size_t feature_dim = 8;
  // Empty means one homophilous rule per class, (c, c mod R, c), with
  // probability `default_rule_probability`.
  std::vector<PlantedRule> rules;
  double default_rule_probability = 0.1;
  // Uniformly random extra edges.
  std::size_t noise_edges = 0;
  // Class means lie on a sphere of this radius; features add unit noise.
  double feature_radius = 2.0;
  // Fraction of entities whose features are drawn around their class mean;
  // the rest are drawn around the origin and carry no class signal.
  double informative_feature_fraction = 1.0;
  double train_fraction = 0.6;
  double valid_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Entity i is named "e<i>" (zero padded); classes are balanced. Throws
// UsageError for degenerate configurations.
Dataset generate_synthetic(const SyntheticConfig& config);

// Class of each entity over all label splits; -1 when unlabeled.
std::vector<ClassId> label_vector(const Dataset& dataset);

}  // namespace boxekg

#endif  // BOXEKG_KG_HPP_
