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

// Independent reference implementations used as test oracles. Nothing here
// calls into the scoring, ranking or gradient code under test.

#ifndef BOXEKG_TESTS_ORACLES_HPP_
#define BOXEKG_TESTS_ORACLES_HPP_

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <vector>

#include "boxekg/kg.hpp"
#include "boxekg/model.hpp"

namespace boxekg::oracle {

// Piecewise point-to-interval distance, written straight from the corners.
inline double distance(double p, double lower, double upper) {
  const double c = (lower + upper) / 2.0;
  const double w = upper - lower + 1.0;
  const double kappa = 0.5 * (w - 1.0) * (w - 1.0 / w);
  if (lower <= p && p <= upper) return std::fabs(p - c) / w;
  return std::fabs(p - c) * w - kappa;
}

inline double norm(const std::vector<double>& v, NormOrder order) {
  double s = 0.0;
  for (double x : v) s += order == NormOrder::kL1 ? std::fabs(x) : x * x;
  return order == NormOrder::kL1 ? s : std::sqrt(s);
}

inline double soft_plus(double x) { return std::log(1.0 + std::exp(x)); }

// Scalar-loop MLP forward pass for one input row. `min_preactivation`
// tracks the smallest |pre-activation| of any hidden unit (ReLU kink gap).
inline std::vector<double> mlp_forward(const Mlp& mlp, std::vector<double> x,
                                       double* min_preactivation = nullptr) {
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const auto& W = mlp.layers[l].weight;
    std::vector<double> y(static_cast<std::size_t>(W.rows()));
    for (Eigen::Index o = 0; o < W.rows(); ++o) {
      double acc = mlp.layers[l].bias(0, o);
      for (Eigen::Index i = 0; i < W.cols(); ++i) acc += W(o, i) * x[i];
      const bool hidden = l + 1 < mlp.layers.size();
      if (hidden && min_preactivation) {
        *min_preactivation = std::min(*min_preactivation, std::fabs(acc));
      }
      y[o] = (hidden && acc < 0.0) ? 0.0 : acc;
    }
    x = std::move(y);
  }
  return x;
}

struct Rep {
  std::vector<double> position, bump;
};

inline Rep representation(const ModelParams& m, EntityId e, const Matrix* features,
                          double* min_preactivation = nullptr) {
  const std::size_t d = m.config.dim;
  Rep r{std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t j = 0; j < d; ++j) {
    r.position[j] = m.point_emb(e, j);
    r.bump[j] = m.bump_emb(e, j);
  }
  if (m.config.mode == ModelMode::kMlpBoxE) {
    std::vector<double> x(static_cast<std::size_t>(features->cols()));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (*features)(e, i);
    const auto fp = mlp_forward(*m.point_mlp, x, min_preactivation);
    const auto fb = mlp_forward(*m.bump_mlp, x, min_preactivation);
    for (std::size_t j = 0; j < d; ++j) {
      r.position[j] = m.config.embedding_scale * r.position[j] + fp[j];
      r.bump[j] = m.config.embedding_scale * r.bump[j] + fb[j];
    }
  }
  return r;
}

inline double box_term(const std::vector<double>& point, const BoxSet& boxes, std::size_t i,
                       NormOrder order) {
  std::vector<double> dist(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    const double half = soft_plus(boxes.size_raw(i, j)) / 2.0;
    dist[j] = distance(point[j], boxes.center(i, j) - half, boxes.center(i, j) + half);
  }
  return norm(dist, order);
}

inline double score(const ModelParams& m, const Fact& fact, const Matrix* features) {
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    return box_term(representation(m, u->entity, features).position, m.class_boxes, u->cls,
                    m.config.norm);
  }
  const auto& b = std::get<BinaryFact>(fact);
  const Rep h = representation(m, b.head, features);
  const Rep t = representation(m, b.tail, features);
  std::vector<double> hp(h.position.size()), tp(t.position.size());
  for (std::size_t j = 0; j < hp.size(); ++j) {
    hp[j] = h.position[j] + t.bump[j];
    tp[j] = t.position[j] + h.bump[j];
  }
  return box_term(hp, m.head_boxes, b.relation, m.config.norm) +
         box_term(tp, m.tail_boxes, b.relation, m.config.norm);
}

// Smallest distance of any scored coordinate from a non-differentiable
// point: a box face, a box center, or a ReLU kink.
inline double kink_gap(const ModelParams& m, const std::vector<Fact>& facts,
                       const Matrix* features) {
  double gap = std::numeric_limits<double>::infinity();
  auto visit = [&](const std::vector<double>& point, const BoxSet& boxes, std::size_t i) {
    for (std::size_t j = 0; j < point.size(); ++j) {
      const double off = std::fabs(point[j] - boxes.center(i, j));
      const double half = soft_plus(boxes.size_raw(i, j)) / 2.0;
      gap = std::min({gap, off, std::fabs(off - half)});
    }
  };
  for (const auto& fact : facts) {
    if (const auto* u = std::get_if<UnaryFact>(&fact)) {
      visit(representation(m, u->entity, features, &gap).position, m.class_boxes, u->cls);
      continue;
    }
    const auto& b = std::get<BinaryFact>(fact);
    const Rep h = representation(m, b.head, features, &gap);
    const Rep t = representation(m, b.tail, features, &gap);
    std::vector<double> hp(h.position.size()), tp(t.position.size());
    for (std::size_t j = 0; j < hp.size(); ++j) {
      hp[j] = h.position[j] + t.bump[j];
      tp[j] = t.position[j] + h.bump[j];
    }
    visit(hp, m.head_boxes, b.relation);
    visit(tp, m.tail_boxes, b.relation);
  }
  return gap;
}

// Enumerates every candidate of both corruption sides; rank rule
// 1 + strictly better + floor(ties / 2) over unfiltered candidates.
inline std::vector<std::size_t> brute_force_ranks(const ModelParams& m,
                                                  const std::vector<BinaryFact>& facts,
                                                  const std::set<BinaryFact>& known,
                                                  const Matrix* features) {
  std::vector<std::size_t> ranks;
  const auto n = static_cast<EntityId>(m.num_entities());
  for (const auto& f : facts) {
    for (int side = 0; side < 2; ++side) {
      const double truth = score(m, f, features);
      std::size_t better = 0, ties = 0;
      for (EntityId e = 0; e < n; ++e) {
        BinaryFact c = f;
        (side == 0 ? c.head : c.tail) = e;
        if (c == f || known.count(c)) continue;
        const double s = score(m, c, features);
        if (s < truth) ++better;
        if (s == truth) ++ties;
      }
      ranks.push_back(1 + better + ties / 2);
    }
  }
  return ranks;
}

// Central difference of `f` in one coordinate of `target`.
inline double central_difference(const std::function<double()>& f, double& target, double h) {
  const double saved = target;
  target = saved + h;
  const double plus = f();
  target = saved - h;
  const double minus = f();
  target = saved;
  return (plus - minus) / (2.0 * h);
}

}  // namespace boxekg::oracle

#endif  // BOXEKG_TESTS_ORACLES_HPP_
