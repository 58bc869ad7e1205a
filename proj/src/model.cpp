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

#include "boxekg/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "boxekg/errors.hpp"
#include "boxekg/random.hpp"

namespace boxekg {

void ModelConfig::check() const {
  if (dim < 1) throw UsageError("model dimension must be >= 1");
  if (norm != NormOrder::kL1 && norm != NormOrder::kL2) throw UsageError("norm must be 1 or 2");
  if (feature_mode()) {
    if (feature_dim < 1) throw UsageError("MLP-BoxE mode needs feature_dim >= 1");
    for (auto h : hidden) {
      if (h < 1) throw UsageError("MLP hidden sizes must be >= 1");
    }
    if (!std::isfinite(embedding_scale)) throw UsageError("embedding scale must be finite");
  }
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double inverse_softplus(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("inverse_softplus: argument must be > 0");
  // log(exp(y) - 1), rearranged for large y.
  return y > 30.0 ? y + std::log1p(-std::exp(-y)) : std::log(std::expm1(y));
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<std::size_t> mlp_sizes(const ModelConfig& c) {
  std::vector<std::size_t> sizes{c.feature_dim};
  sizes.insert(sizes.end(), c.hidden.begin(), c.hidden.end());
  sizes.push_back(c.dim);
  return sizes;
}

void check_features(const ModelParams& model, const Matrix* features) {
  if (!model.config.feature_mode()) return;
  if (!features) throw UsageError("MLP-BoxE model requires node features");
  if (static_cast<std::size_t>(features->rows()) != model.num_entities() ||
      static_cast<std::size_t>(features->cols()) != model.config.feature_dim) {
    throw DimensionError("feature matrix is " + std::to_string(features->rows()) + "x" +
                         std::to_string(features->cols()) + ", model expects " +
                         std::to_string(model.num_entities()) + "x" +
                         std::to_string(model.config.feature_dim));
  }
}

void check_entity(const ModelParams& model, EntityId e) {
  if (e < 0 || static_cast<std::size_t>(e) >= model.num_entities()) {
    throw std::out_of_range("entity index " + std::to_string(e) + " out of range");
  }
}

void check_fact(const ModelParams& model, const Fact& fact) {
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    check_entity(model, u->entity);
    if (u->cls < 0 || static_cast<std::size_t>(u->cls) >= model.num_classes()) {
      throw std::out_of_range("class index " + std::to_string(u->cls) + " out of range");
    }
  } else {
    const auto& b = std::get<BinaryFact>(fact);
    check_entity(model, b.head);
    check_entity(model, b.tail);
    if (b.relation < 0 || static_cast<std::size_t>(b.relation) >= model.num_relations()) {
      throw std::out_of_range("relation index " + std::to_string(b.relation) +
                              " out of range");
    }
  }
}

std::string describe(const Fact& fact) {
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    return "c" + std::to_string(u->cls) + "(e" + std::to_string(u->entity) + ")";
  }
  const auto& b = std::get<BinaryFact>(fact);
  return "r" + std::to_string(b.relation) + "(e" + std::to_string(b.head) + ",e" +
         std::to_string(b.tail) + ")";
}

// Boxes in (center, extent) form plus the raw size rows for the chain rule.
struct BoxView {
  const double* center;
  const double* side;
  const double* size_raw;
};

struct BoxTable {
  const BoxSet* set;
  Matrix side;

  explicit BoxTable(const BoxSet& s)
      : set(&s), side(s.size_raw.unaryExpr([](double v) { return softplus(v); })) {}
  BoxView view(std::size_t i) const {
    return {set->center.row(i).data(), side.row(i).data(), set->size_raw.row(i).data()};
  }
};

// ||dist(point, box)||_x and, when upstream != 0, accumulation of
// upstream * d/d(point, center, size_raw) into the given rows.
double point_box_term(const double* point, const BoxView& box, std::size_t d,
                      NormOrder norm, double upstream, double* d_point,
                      double* d_center, double* d_size_raw,
                      std::vector<CoordinateDistance>& scratch) {
  scratch.resize(d);
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    scratch[j] = coordinate_distance_grad(point[j], box.center[j], box.side[j]);
    acc += norm == NormOrder::kL1 ? scratch[j].value : scratch[j].value * scratch[j].value;
  }
  const double value = norm == NormOrder::kL1 ? acc : std::sqrt(acc);
  if (upstream == 0.0) return value;
  for (std::size_t j = 0; j < d; ++j) {
    double g = 1.0;
    if (norm == NormOrder::kL2) g = value > 0.0 ? scratch[j].value / value : 0.0;
    const double gp = upstream * g * scratch[j].d_point;
    if (d_point) d_point[j] += gp;
    d_center[j] -= gp;
    d_size_raw[j] += upstream * g * scratch[j].d_side * sigmoid(box.size_raw[j]);
  }
  return value;
}

// Representations of a subset of entities, with what is needed to push
// gradients back through them.
struct LocalReps {
  std::vector<EntityId> entities;
  std::vector<std::int32_t> slot;  // entity -> row, -1 if absent
  Matrix positions, bumps;
  Matrix features;
  Mlp::Trace point_trace, bump_trace;
};

LocalReps local_representations(const ModelParams& model, std::vector<EntityId> entities,
                                const Matrix* features, bool keep_trace) {
  LocalReps reps;
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
  reps.entities = std::move(entities);
  reps.slot.assign(model.num_entities(), -1);
  const auto n = static_cast<Eigen::Index>(reps.entities.size());
  const auto d = static_cast<Eigen::Index>(model.config.dim);
  reps.positions.resize(n, d);
  reps.bumps.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const EntityId e = reps.entities[i];
    reps.slot[e] = static_cast<std::int32_t>(i);
    reps.positions.row(i) = model.point_emb.row(e);
    reps.bumps.row(i) = model.bump_emb.row(e);
  }
  if (model.config.feature_mode()) {
    reps.features.resize(n, features->cols());
    for (Eigen::Index i = 0; i < n; ++i) reps.features.row(i) = features->row(reps.entities[i]);
    const double scale = model.config.embedding_scale;
    reps.positions = scale * reps.positions +
                     model.point_mlp->forward(reps.features, keep_trace ? &reps.point_trace : nullptr);
    reps.bumps = scale * reps.bumps +
                 model.bump_mlp->forward(reps.features, keep_trace ? &reps.bump_trace : nullptr);
  }
  return reps;
}

void add_fact_entities(const Fact& f, std::vector<EntityId>& out) {
  if (const auto* u = std::get_if<UnaryFact>(&f)) {
    out.push_back(u->entity);
  } else {
    const auto& b = std::get<BinaryFact>(f);
    out.push_back(b.head);
    out.push_back(b.tail);
  }
}

struct GradTargets {
  Matrix* d_pos = nullptr;
  Matrix* d_bump = nullptr;
  ModelParams* grads = nullptr;
};

class FactScorer {
 public:
  FactScorer(const ModelParams& model, const LocalReps& reps)
      : model_(model), reps_(reps), classes_(model.class_boxes), heads_(model.head_boxes),
        tails_(model.tail_boxes), d_(model.config.dim), point_(d_), dpoint_(d_, 0.0) {}

  // Score of `fact`; with upstream != 0 also accumulates gradients.
  double run(const Fact& fact, double upstream, const GradTargets& t) {
    const NormOrder norm = model_.config.norm;
    const bool grad = upstream != 0.0;
    if (const auto* u = std::get_if<UnaryFact>(&fact)) {
      const auto row = reps_.slot[u->entity];
      double* dp = grad ? t.d_pos->row(row).data() : nullptr;
      double* dc = grad ? t.grads->class_boxes.center.row(u->cls).data() : nullptr;
      double* ds = grad ? t.grads->class_boxes.size_raw.row(u->cls).data() : nullptr;
      return point_box_term(reps_.positions.row(row).data(), classes_.view(u->cls), d_, norm,
                            upstream, dp, dc, ds, scratch_);
    }
    const auto& b = std::get<BinaryFact>(fact);
    const auto h = reps_.slot[b.head];
    const auto tl = reps_.slot[b.tail];
    double total = 0.0;
    // Head point: position(h) + bump(t), scored against r^h.
    for (std::size_t j = 0; j < d_; ++j) {
      point_[j] = reps_.positions(h, j) + reps_.bumps(tl, j);
    }
    std::fill(dpoint_.begin(), dpoint_.end(), 0.0);
    total += point_box_term(point_.data(), heads_.view(b.relation), d_, norm, upstream,
                            grad ? dpoint_.data() : nullptr,
                            grad ? t.grads->head_boxes.center.row(b.relation).data() : nullptr,
                            grad ? t.grads->head_boxes.size_raw.row(b.relation).data() : nullptr,
                            scratch_);
    if (grad) {
      for (std::size_t j = 0; j < d_; ++j) {
        (*t.d_pos)(h, j) += dpoint_[j];
        (*t.d_bump)(tl, j) += dpoint_[j];
      }
    }
    // Tail point: position(t) + bump(h), scored against r^t.
    for (std::size_t j = 0; j < d_; ++j) {
      point_[j] = reps_.positions(tl, j) + reps_.bumps(h, j);
    }
    std::fill(dpoint_.begin(), dpoint_.end(), 0.0);
    total += point_box_term(point_.data(), tails_.view(b.relation), d_, norm, upstream,
                            grad ? dpoint_.data() : nullptr,
                            grad ? t.grads->tail_boxes.center.row(b.relation).data() : nullptr,
                            grad ? t.grads->tail_boxes.size_raw.row(b.relation).data() : nullptr,
                            scratch_);
    if (grad) {
      for (std::size_t j = 0; j < d_; ++j) {
        (*t.d_pos)(tl, j) += dpoint_[j];
        (*t.d_bump)(h, j) += dpoint_[j];
      }
    }
    return total;
  }

 private:
  const ModelParams& model_;
  const LocalReps& reps_;
  BoxTable classes_, heads_, tails_;
  std::size_t d_;
  std::vector<double> point_;
  std::vector<double> dpoint_;
  std::vector<CoordinateDistance> scratch_;
};

double run_batch(const ModelParams& model, std::span<const TrainingExample> batch,
                 const LossConfig& loss, const Matrix* features, ModelParams* grads) {
  loss.check();
  check_features(model, features);
  std::vector<EntityId> touched;
  for (const auto& ex : batch) {
    check_fact(model, ex.positive);
    add_fact_entities(ex.positive, touched);
    if (ex.negatives.empty()) throw UsageError("training example without negatives");
    for (const auto& n : ex.negatives) {
      check_fact(model, n);
      add_fact_entities(n, touched);
    }
  }
  const LocalReps reps = local_representations(model, std::move(touched), features, grads != nullptr);
  FactScorer scorer(model, reps);

  Matrix d_pos, d_bump;
  GradTargets targets;
  if (grads) {
    d_pos = Matrix::Zero(reps.positions.rows(), reps.positions.cols());
    d_bump = Matrix::Zero(reps.bumps.rows(), reps.bumps.cols());
    targets = {&d_pos, &d_bump, grads};
  }

  double total = 0.0;
  std::vector<double> neg_scores;
  for (const auto& ex : batch) {
    const double pos = scorer.run(ex.positive, 0.0, targets);
    if (!std::isfinite(pos)) throw NumericError("non-finite score for " + describe(ex.positive));
    neg_scores.resize(ex.negatives.size());
    for (std::size_t i = 0; i < ex.negatives.size(); ++i) {
      neg_scores[i] = scorer.run(ex.negatives[i], 0.0, targets);
      if (!std::isfinite(neg_scores[i])) {
        throw NumericError("non-finite score for " + describe(ex.negatives[i]));
      }
    }
    const LossValue lv = evaluate_loss(loss, pos, neg_scores);
    total += ex.weight * lv.loss;
    if (!grads || ex.weight == 0.0) continue;
    scorer.run(ex.positive, ex.weight * lv.d_positive, targets);
    for (std::size_t i = 0; i < ex.negatives.size(); ++i) {
      if (lv.d_negatives[i] != 0.0) {
        scorer.run(ex.negatives[i], ex.weight * lv.d_negatives[i], targets);
      }
    }
  }
  if (!std::isfinite(total)) throw NumericError("non-finite batch loss");

  if (grads) {
    const bool fm = model.config.feature_mode();
    const double scale = fm ? model.config.embedding_scale : 1.0;
    for (std::size_t i = 0; i < reps.entities.size(); ++i) {
      const EntityId e = reps.entities[i];
      grads->point_emb.row(e) += scale * d_pos.row(i);
      grads->bump_emb.row(e) += scale * d_bump.row(i);
    }
    if (fm) {
      model.point_mlp->backward(reps.point_trace, d_pos, *grads->point_mlp);
      model.bump_mlp->backward(reps.bump_trace, d_bump, *grads->bump_mlp);
    }
    grads->for_each_tensor([](const std::string& name, const Matrix& m) {
      if (!m.allFinite()) throw NumericError("non-finite gradient in " + name);
    });
  }
  return total;
}

}  // namespace

Box BoxSet::box(std::size_t i) const {
  const auto d = static_cast<std::size_t>(center.cols());
  std::vector<double> side(d);
  for (std::size_t j = 0; j < d; ++j) side[j] = softplus(size_raw(i, j));
  return Box::centered(std::span<const double>(center.row(i).data(), d), side);
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each_tensor([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

ModelParams init_model(std::size_t num_entities, std::size_t num_classes,
                       std::size_t num_relations, const ModelConfig& config,
                       std::uint64_t seed) {
  config.check();
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(config.dim);
  const double bound = 0.5 / std::sqrt(static_cast<double>(config.dim));
  const double initial_size_raw = inverse_softplus(0.05);
  auto uniform = [&](std::size_t rows) {
    Matrix m(static_cast<Eigen::Index>(rows), d);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
    return m;
  };
  auto boxes = [&](std::size_t n) {
    BoxSet s;
    s.center = uniform(n);
    s.size_raw = Matrix::Constant(static_cast<Eigen::Index>(n), d, initial_size_raw);
    return s;
  };
  ModelParams p;
  p.config = config;
  p.point_emb = uniform(num_entities);
  p.bump_emb = uniform(num_entities);
  p.class_boxes = boxes(num_classes);
  p.head_boxes = boxes(num_relations);
  p.tail_boxes = boxes(num_relations);
  if (config.feature_mode()) {
    p.point_mlp = Mlp::random(mlp_sizes(config), rng);
    p.bump_mlp = Mlp::random(mlp_sizes(config), rng);
  }
  return p;
}

EntityRepresentation entity_representation(const ModelParams& model, EntityId entity,
                                           const Matrix* features) {
  check_entity(model, entity);
  check_features(model, features);
  EntityRepresentation r{model.point_emb.row(entity).transpose(),
                         model.bump_emb.row(entity).transpose()};
  if (model.config.feature_mode()) {
    const Matrix x = features->row(entity);
    const double scale = model.config.embedding_scale;
    r.position = scale * r.position + model.point_mlp->forward(x).row(0).transpose();
    r.bump = scale * r.bump + model.bump_mlp->forward(x).row(0).transpose();
  }
  return r;
}

Representations compute_representations(const ModelParams& model, const Matrix* features) {
  check_features(model, features);
  Representations r{model.point_emb, model.bump_emb};
  if (model.config.feature_mode()) {
    const double scale = model.config.embedding_scale;
    r.positions = scale * r.positions + model.point_mlp->forward(*features);
    r.bumps = scale * r.bumps + model.bump_mlp->forward(*features);
  }
  return r;
}

BoxCache::BoxCache(const ModelParams& model) {
  for (std::size_t i = 0; i < model.num_classes(); ++i) classes.push_back(model.class_boxes.box(i));
  for (std::size_t i = 0; i < model.num_relations(); ++i) {
    heads.push_back(model.head_boxes.box(i));
    tails.push_back(model.tail_boxes.box(i));
  }
}

double score_fact(const Representations& reps, const BoxCache& boxes, NormOrder norm,
                  const Fact& fact) {
  const auto d = static_cast<std::size_t>(reps.positions.cols());
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    return score_unary(std::span<const double>(reps.positions.row(u->entity).data(), d),
                       boxes.classes.at(u->cls), norm);
  }
  const auto& b = std::get<BinaryFact>(fact);
  std::vector<double> head(d), tail(d);
  for (std::size_t j = 0; j < d; ++j) {
    head[j] = reps.positions(b.head, j) + reps.bumps(b.tail, j);
    tail[j] = reps.positions(b.tail, j) + reps.bumps(b.head, j);
  }
  return score_binary(head, tail, boxes.heads.at(b.relation), boxes.tails.at(b.relation), norm);
}

double score_fact(const ModelParams& model, const Fact& fact, const Matrix* features) {
  check_fact(model, fact);
  check_features(model, features);
  std::vector<EntityId> entities;
  add_fact_entities(fact, entities);
  const LocalReps reps = local_representations(model, std::move(entities), features, false);
  FactScorer scorer(model, reps);
  return scorer.run(fact, 0.0, {});
}

LossAndGradients loss_and_gradients(const ModelParams& model,
                                    std::span<const TrainingExample> batch,
                                    const LossConfig& loss, const Matrix* features) {
  LossAndGradients out{0.0, model.zeros_like()};
  out.loss = run_batch(model, batch, loss, features, &out.gradients);
  return out;
}

double batch_loss(const ModelParams& model, std::span<const TrainingExample> batch,
                  const LossConfig& loss, const Matrix* features) {
  return run_batch(model, batch, loss, features, nullptr);
}

std::string to_string(ModelMode mode) {
  return mode == ModelMode::kBoxE ? "boxe" : "mlp-boxe";
}

std::string to_string(NormOrder norm) { return norm == NormOrder::kL1 ? "1" : "2"; }

}  // namespace boxekg
