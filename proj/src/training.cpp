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

#include "boxekg/training.hpp"

#include <cmath>
#include <sstream>

#include "boxekg/errors.hpp"
#include "boxekg/evaluation.hpp"

namespace boxekg {

std::vector<Fact> sample_negatives(const Fact& fact, std::size_t num_entities,
                                   std::size_t num_classes, std::size_t count, Rng& rng) {
  std::vector<Fact> out;
  out.reserve(count);
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    if (num_classes < 2) throw UsageError("cannot corrupt a class fact with fewer than 2 classes");
    for (std::size_t i = 0; i < count; ++i) {
      auto c = static_cast<ClassId>(rng.uniform_index(num_classes - 1));
      if (c >= u->cls) ++c;
      out.push_back(UnaryFact{c, u->entity});
    }
    return out;
  }
  const auto& b = std::get<BinaryFact>(fact);
  if (num_entities < 2) throw UsageError("cannot corrupt an edge with fewer than 2 entities");
  for (std::size_t i = 0; i < count; ++i) {
    const bool head = rng.uniform_index(2) == 0;
    BinaryFact n = b;
    EntityId& slot = head ? n.head : n.tail;
    auto e = static_cast<EntityId>(rng.uniform_index(num_entities - 1));
    if (e >= slot) ++e;
    slot = e;
    out.push_back(n);
  }
  return out;
}

void AdamState::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) throw DimensionError("adam: params/grads count mismatch");
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw DimensionError("adam: tensor count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != m_[i].rows() || params[i]->cols() != m_[i].cols() ||
        grads[i]->rows() != m_[i].rows() || grads[i]->cols() != m_[i].cols()) {
      throw DimensionError("adam: shape mismatch in tensor " + std::to_string(i));
    }
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i]->array();
    m_[i].array() = config_.beta1 * m_[i].array() + (1.0 - config_.beta1) * g;
    v_[i].array() = config_.beta2 * v_[i].array() + (1.0 - config_.beta2) * g.square();
    params[i]->array() -= config_.learning_rate * (m_[i].array() / bc1) /
                          ((v_[i].array() / bc2).sqrt() + config_.epsilon);
  }
}

void adam_step(AdamState& state, ModelParams& params, const ModelParams& grads) {
  std::vector<Matrix*> p;
  std::vector<const Matrix*> g;
  params.for_each_tensor([&](const std::string&, Matrix& m) { p.push_back(&m); });
  grads.for_each_tensor([&](const std::string&, const Matrix& m) { g.push_back(&m); });
  state.step(p, g);
}

void TrainConfig::check() const {
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (negatives.num_negatives < 1) throw UsageError("need at least one negative per fact");
  if (!(learning_rate > 0.0)) throw UsageError("learning rate must be > 0");
  if (eval_every < 1) throw UsageError("eval_every must be >= 1");
  if (!(unary_weight >= 0.0)) throw UsageError("unary weight must be >= 0");
  loss.check();
}

std::vector<double> TrainingLog::epoch_losses() const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.split == "train" && r.metric == "loss") out.push_back(r.value);
  }
  return out;
}

std::string TrainingLog::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,split,metric,value\n";
  for (const auto& r : records) {
    os << r.epoch << "," << r.split << "," << r.metric << "," << r.value << "\n";
  }
  return os.str();
}

namespace {

double validation_metric(const Dataset& ds, const ModelParams& params, const TrainConfig& cfg,
                         const Matrix* features, const FactFilter& filter) {
  if (cfg.stopping == StoppingMetric::kValidAccuracy) {
    return classification_accuracy(params, ds.labels.valid, features);
  }
  return ranking_metrics(params, cfg.validation_edges, &filter, features).mrr;
}

}  // namespace

TrainResult train_from(const Dataset& ds, ModelParams params, const TrainConfig& cfg) {
  cfg.check();
  params.config.check();
  if (params.num_entities() != ds.vocab.num_entities() ||
      params.num_classes() != ds.vocab.num_classes() ||
      params.num_relations() != ds.vocab.num_relations()) {
    throw DimensionError("model shape does not match the dataset vocabulary");
  }
  const Matrix* features = nullptr;
  if (params.config.feature_mode()) {
    if (!ds.features) throw UsageError("MLP-BoxE training requires node features");
    features = &*ds.features;
  }
  if (cfg.stopping == StoppingMetric::kValidAccuracy && ds.labels.valid.empty()) {
    throw UsageError("accuracy early stopping needs validation labels");
  }
  if (cfg.stopping == StoppingMetric::kValidMrr && cfg.validation_edges.empty()) {
    throw UsageError("MRR early stopping needs validation edges");
  }

  std::vector<Fact> facts;
  if (cfg.use_classes) {
    for (const auto& l : ds.labels.train) facts.emplace_back(l);
  }
  if (cfg.use_edges) {
    for (const auto& e : ds.edges) facts.emplace_back(e);
  }
  if (facts.empty()) throw UsageError("no training facts");

  const std::size_t n_e = ds.vocab.num_entities();
  const std::size_t n_c = ds.vocab.num_classes();
  const bool full_softmax =
      cfg.loss.kind == LossKind::kCrossEntropy && cfg.negatives.full_class_softmax;

  FactFilter filter(ds.edges);
  filter.add(ds.dropped_edges);
  filter.add(cfg.validation_edges);

  Rng rng(cfg.seed);
  AdamState adam(AdamConfig{cfg.learning_rate});
  TrainResult result{params, {}};
  TrainingLog& log = result.log;
  std::size_t since_best = 0;

  if (cfg.stopping != StoppingMetric::kNone) {
    log.best_metric = validation_metric(ds, params, cfg, features, filter);
    log.records.push_back({0, "valid", cfg.stopping == StoppingMetric::kValidAccuracy ? "accuracy" : "mrr",
                           *log.best_metric});
  }

  std::vector<TrainingExample> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<Fact>(facts));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < facts.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(facts.size(), start + cfg.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        TrainingExample ex;
        ex.positive = facts[i];
        if (const auto* u = std::get_if<UnaryFact>(&facts[i])) {
          ex.weight = cfg.unary_weight * inv;
          if (full_softmax) {
            for (std::size_t c = 0; c < n_c; ++c) {
              if (static_cast<ClassId>(c) != u->cls) {
                ex.negatives.push_back(UnaryFact{static_cast<ClassId>(c), u->entity});
              }
            }
          } else {
            ex.negatives = sample_negatives(facts[i], n_e, n_c, cfg.negatives.num_negatives, rng);
          }
        } else {
          ex.weight = inv;
          ex.negatives = sample_negatives(facts[i], n_e, n_c, cfg.negatives.num_negatives, rng);
        }
        batch.push_back(std::move(ex));
      }
      LossAndGradients lg;
      try {
        lg = loss_and_gradients(params, batch, cfg.loss, features);
      } catch (const NumericError&) {
        log.diverged = true;
      }
      if (log.diverged || !std::isfinite(lg.loss)) {
        log.diverged = true;
        break;
      }
      // Gradients are checked finite, so the update keeps parameters finite.
      adam_step(adam, params, lg.gradients);
      epoch_loss += lg.loss * static_cast<double>(end - start);
    }
    if (log.diverged) break;
    log.epochs_run = epoch;
    log.records.push_back({epoch, "train", "loss", epoch_loss / static_cast<double>(facts.size())});

    if (cfg.stopping == StoppingMetric::kNone) continue;
    if (epoch % cfg.eval_every != 0 && epoch != cfg.epochs) continue;
    const double metric = validation_metric(ds, params, cfg, features, filter);
    log.records.push_back(
        {epoch, "valid", cfg.stopping == StoppingMetric::kValidAccuracy ? "accuracy" : "mrr", metric});
    if (metric > *log.best_metric) {
      log.best_metric = metric;
      log.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else {
      since_best += cfg.eval_every;
      if (since_best >= cfg.patience) break;
    }
  }

  if (cfg.stopping == StoppingMetric::kNone) {
    result.params = std::move(params);
    log.best_epoch = log.epochs_run;
  }
  return result;
}

TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& config) {
  return train_from(dataset,
                    init_model(dataset.vocab.num_entities(), dataset.vocab.num_classes(),
                               dataset.vocab.num_relations(), model_config, config.seed),
                    config);
}

}  // namespace boxekg
