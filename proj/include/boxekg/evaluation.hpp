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

#ifndef BOXEKG_EVALUATION_HPP_
#define BOXEKG_EVALUATION_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "boxekg/kg.hpp"
#include "boxekg/model.hpp"

namespace boxekg {

enum class CorruptSide { kHead, kTail };

struct RankingTask {
  BinaryFact fact;
  CorruptSide side = CorruptSide::kTail;
};

// Set of facts known to be true, excluded from the candidate pool.
class FactFilter {
 public:
  FactFilter() = default;
  explicit FactFilter(std::span<const BinaryFact> facts) { add(facts); }

  void add(std::span<const BinaryFact> facts) {
    for (const auto& f : facts) keys_.insert(fact_key(f));
  }
  bool contains(const BinaryFact& f) const { return keys_.count(fact_key(f)) != 0; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_set<std::uint64_t> keys_;
};

// Rank of the true fact among itself and every substitution of the
// corrupted side by another entity, after removing candidates in `filter`:
//   1 + #(candidates scoring strictly lower) + floor(#(ties) / 2).
std::size_t rank_fact(const ModelParams& model, const RankingTask& task,
                      const FactFilter* filter = nullptr, const Matrix* features = nullptr);

// Same, reusing precomputed representations and boxes.
std::size_t rank_fact(const Representations& reps, const BoxCache& boxes, NormOrder norm,
                      const RankingTask& task, const FactFilter* filter);

struct Metrics {
  double mr = 0.0;
  double mrr = 0.0;
  std::map<int, double> hits;  // k -> fraction of ranks <= k
  std::size_t count = 0;
  std::vector<std::size_t> ranks;

  // `key: value` records.
  std::string to_records() const;
};

// MR / MRR / Hits@{1,3,10} from raw ranks. Throws UsageError on an empty set.
Metrics metrics_from_ranks(std::vector<std::size_t> ranks);

// Ranks every fact with head and then tail corruption. `threads` > 1 splits
// the tasks across workers; results are identical for any thread count.
Metrics ranking_metrics(const ModelParams& model, std::span<const BinaryFact> eval_facts,
                        const FactFilter* filter = nullptr, const Matrix* features = nullptr,
                        std::size_t threads = 1);

// argmin over classes of the unary score; ties go to the lowest index.
// Throws UsageError when the model has no classes.
std::map<EntityId, ClassId> classify_nodes(const ModelParams& model,
                                           std::span<const EntityId> entities,
                                           const Matrix* features = nullptr);

// Fraction of gold labels predicted exactly. Throws UsageError if a gold
// entity has no prediction or `gold` is empty.
double accuracy(const std::map<EntityId, ClassId>& predictions,
                std::span<const UnaryFact> gold);

// Convenience: classify the gold entities and score them.
double classification_accuracy(const ModelParams& model, std::span<const UnaryFact> gold,
                               const Matrix* features = nullptr);

// Delimited row in MR/MRR/H@10 column order, e.g. for result tables.
std::string metrics_table_header();
std::string metrics_table_row(const std::string& name, const Metrics& m);

}  // namespace boxekg

#endif  // BOXEKG_EVALUATION_HPP_
