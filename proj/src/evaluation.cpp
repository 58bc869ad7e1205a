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

#include "boxekg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "boxekg/errors.hpp"

namespace boxekg {

std::size_t rank_fact(const Representations& reps, const BoxCache& boxes, NormOrder norm,
                      const RankingTask& task, const FactFilter* filter) {
  const double true_score = score_fact(reps, boxes, norm, task.fact);
  if (!std::isfinite(true_score)) throw NumericError("non-finite score in ranking");
  const auto n = static_cast<EntityId>(reps.positions.rows());
  const EntityId original = task.side == CorruptSide::kHead ? task.fact.head : task.fact.tail;
  std::size_t better = 0, tied = 0;
  for (EntityId e = 0; e < n; ++e) {
    if (e == original) continue;
    BinaryFact candidate = task.fact;
    (task.side == CorruptSide::kHead ? candidate.head : candidate.tail) = e;
    if (filter && filter->contains(candidate)) continue;
    const double s = score_fact(reps, boxes, norm, candidate);
    if (s < true_score) {
      ++better;
    } else if (s == true_score) {
      ++tied;
    }
  }
  return 1 + better + tied / 2;
}

std::size_t rank_fact(const ModelParams& model, const RankingTask& task,
                      const FactFilter* filter, const Matrix* features) {
  const auto reps = compute_representations(model, features);
  const BoxCache boxes(model);
  return rank_fact(reps, boxes, model.config.norm, task, filter);
}

Metrics metrics_from_ranks(std::vector<std::size_t> ranks) {
  if (ranks.empty()) throw UsageError("cannot compute metrics over an empty evaluation set");
  Metrics m;
  m.count = ranks.size();
  // Integer sum first so the reduction does not depend on order.
  std::size_t rank_sum = 0;
  double rr_sum = 0.0;
  std::vector<std::size_t> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  for (auto r : sorted) {
    rank_sum += r;
    rr_sum += 1.0 / static_cast<double>(r);
  }
  m.mr = static_cast<double>(rank_sum) / static_cast<double>(m.count);
  m.mrr = rr_sum / static_cast<double>(m.count);
  for (int k : {1, 3, 10}) {
    const auto hit = std::count_if(ranks.begin(), ranks.end(),
                                   [k](std::size_t r) { return r <= static_cast<std::size_t>(k); });
    m.hits[k] = static_cast<double>(hit) / static_cast<double>(m.count);
  }
  m.ranks = std::move(ranks);
  return m;
}

Metrics ranking_metrics(const ModelParams& model, std::span<const BinaryFact> eval_facts,
                        const FactFilter* filter, const Matrix* features, std::size_t threads) {
  if (eval_facts.empty()) throw UsageError("empty evaluation set");
  const auto reps = compute_representations(model, features);
  const BoxCache boxes(model);
  const NormOrder norm = model.config.norm;
  std::vector<std::size_t> ranks(2 * eval_facts.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const RankingTask task{eval_facts[i / 2],
                             i % 2 == 0 ? CorruptSide::kHead : CorruptSide::kTail};
      ranks[i] = rank_fact(reps, boxes, norm, task, filter);
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, ranks.size()));
  if (threads == 1) {
    work(0, ranks.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (ranks.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(ranks.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return metrics_from_ranks(std::move(ranks));
}

std::string Metrics::to_records() const {
  std::ostringstream os;
  os.precision(10);
  os << "count: " << count << "\n";
  os << "mr: " << mr << "\n";
  os << "mrr: " << mrr << "\n";
  for (const auto& [k, v] : hits) os << "hits@" << k << ": " << v << "\n";
  return os.str();
}

std::map<EntityId, ClassId> classify_nodes(const ModelParams& model,
                                           std::span<const EntityId> entities,
                                           const Matrix* features) {
  if (model.num_classes() == 0) throw UsageError("model has no classes");
  const auto reps = compute_representations(model, features);
  const BoxCache boxes(model);
  std::map<EntityId, ClassId> out;
  for (EntityId e : entities) {
    if (e < 0 || static_cast<std::size_t>(e) >= model.num_entities()) {
      throw std::out_of_range("entity index " + std::to_string(e) + " out of range");
    }
    ClassId best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < model.num_classes(); ++c) {
      const double s = score_fact(reps, boxes, model.config.norm,
                                  UnaryFact{static_cast<ClassId>(c), e});
      if (s < best_score) {
        best_score = s;
        best = static_cast<ClassId>(c);
      }
    }
    out[e] = best;
  }
  return out;
}

double accuracy(const std::map<EntityId, ClassId>& predictions,
                std::span<const UnaryFact> gold) {
  if (gold.empty()) throw UsageError("accuracy over an empty label set");
  std::size_t correct = 0;
  for (const auto& g : gold) {
    auto it = predictions.find(g.entity);
    if (it == predictions.end()) {
      throw UsageError("no prediction for entity " + std::to_string(g.entity));
    }
    if (it->second == g.cls) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(gold.size());
}

double classification_accuracy(const ModelParams& model, std::span<const UnaryFact> gold,
                               const Matrix* features) {
  std::vector<EntityId> entities;
  entities.reserve(gold.size());
  for (const auto& g : gold) entities.push_back(g.entity);
  return accuracy(classify_nodes(model, entities, features), gold);
}

std::string metrics_table_header() { return "model\tMR\tMRR\tH@10"; }

std::string metrics_table_row(const std::string& name, const Metrics& m) {
  std::ostringstream os;
  os.precision(6);
  os << name << "\t" << m.mr << "\t" << m.mrr << "\t" << m.hits.at(10);
  return os.str();
}

}  // namespace boxekg
