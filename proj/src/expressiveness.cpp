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

#include "boxekg/expressiveness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "boxekg/errors.hpp"
#include "boxekg/training.hpp"
#include "json.hpp"

namespace boxekg {

void ExplicitConfig::check() const {
  auto bad = [](const std::string& what) { throw DimensionError("ExplicitConfig: " + what); };
  if (static_cast<std::size_t>(positions.cols()) != dim) bad("positions have wrong width");
  if (bumps.rows() != positions.rows() || bumps.cols() != positions.cols()) {
    bad("bumps and positions differ in shape");
  }
  if (head_boxes.size() != tail_boxes.size()) bad("head/tail box counts differ");
  for (const auto* list : {&class_boxes, &head_boxes, &tail_boxes}) {
    for (const auto& b : *list) {
      if (b.dim() != dim) bad("box of dimension " + std::to_string(b.dim()));
    }
  }
}

double score_fact(const ExplicitConfig& config, const Fact& fact, NormOrder norm) {
  const std::size_t d = config.dim;
  if (const auto* u = std::get_if<UnaryFact>(&fact)) {
    return score_unary(std::span<const double>(config.positions.row(u->entity).data(), d),
                       config.class_boxes.at(u->cls), norm);
  }
  const auto& b = std::get<BinaryFact>(fact);
  std::vector<double> head(d), tail(d);
  for (std::size_t j = 0; j < d; ++j) {
    head[j] = config.positions(b.head, j) + config.bumps(b.tail, j);
    tail[j] = config.positions(b.tail, j) + config.bumps(b.head, j);
  }
  return score_binary(head, tail, config.head_boxes.at(b.relation),
                      config.tail_boxes.at(b.relation), norm);
}

ExplicitConfig to_explicit(const ModelParams& model, const Matrix* features) {
  const auto reps = compute_representations(model, features);
  const BoxCache boxes(model);
  ExplicitConfig c;
  c.dim = model.config.dim;
  c.positions = reps.positions;
  c.bumps = reps.bumps;
  c.class_boxes = boxes.classes;
  c.head_boxes = boxes.heads;
  c.tail_boxes = boxes.tails;
  return c;
}

void FactAssignment::check() const {
  std::set<Fact> t(true_facts.begin(), true_facts.end());
  for (const auto& f : false_facts) {
    if (t.count(f)) throw UsageError("fact assigned both true and false");
  }
}

namespace {
template <typename Kind>
FactAssignment filter_kind(const FactAssignment& a) {
  FactAssignment out;
  for (const auto& f : a.true_facts) {
    if (std::holds_alternative<Kind>(f)) out.true_facts.push_back(f);
  }
  for (const auto& f : a.false_facts) {
    if (std::holds_alternative<Kind>(f)) out.false_facts.push_back(f);
  }
  return out;
}
}  // namespace

FactAssignment FactAssignment::unary_part() const { return filter_kind<UnaryFact>(*this); }
FactAssignment FactAssignment::binary_part() const { return filter_kind<BinaryFact>(*this); }

std::vector<Fact> all_facts(std::size_t n_e, std::size_t n_c, std::size_t n_r) {
  std::vector<Fact> out;
  for (std::size_t c = 0; c < n_c; ++c) {
    for (std::size_t e = 0; e < n_e; ++e) {
      out.emplace_back(UnaryFact{static_cast<ClassId>(c), static_cast<EntityId>(e)});
    }
  }
  for (std::size_t r = 0; r < n_r; ++r) {
    for (std::size_t h = 0; h < n_e; ++h) {
      for (std::size_t t = 0; t < n_e; ++t) {
        out.emplace_back(BinaryFact{static_cast<RelationId>(r), static_cast<EntityId>(h),
                                    static_cast<EntityId>(t)});
      }
    }
  }
  return out;
}

FactAssignment random_assignment(std::size_t n_e, std::size_t n_c, std::size_t n_r, Rng& rng,
                                 double p_true) {
  FactAssignment a;
  for (const auto& f : all_facts(n_e, n_c, n_r)) {
    (rng.bernoulli(p_true) ? a.true_facts : a.false_facts).push_back(f);
  }
  return a;
}

std::string SeparationReport::summary() const {
  std::ostringstream os;
  os.precision(6);
  if (passed) {
    os << "SEPARATED margin=" << margin;
  } else {
    os << "NOT SEPARATED margin=" << margin << " violations=" << violations.size();
  }
  return os.str();
}

SeparationReport verify_separation(const ExplicitConfig& config,
                                   const FactAssignment& assignment, NormOrder norm,
                                   std::optional<double> threshold) {
  config.check();
  SeparationReport r;
  std::vector<double> t_scores, f_scores;
  for (const auto& f : assignment.true_facts) t_scores.push_back(score_fact(config, f, norm));
  for (const auto& f : assignment.false_facts) f_scores.push_back(score_fact(config, f, norm));
  for (double s : t_scores) r.max_true = std::max(r.max_true, s);
  for (double s : f_scores) r.min_false = std::min(r.min_false, s);

  if (threshold) {
    const double thr = *threshold;
    for (std::size_t i = 0; i < t_scores.size(); ++i) {
      if (!(t_scores[i] < thr)) r.violations.push_back(assignment.true_facts[i]);
    }
    for (std::size_t i = 0; i < f_scores.size(); ++i) {
      if (!(f_scores[i] > thr)) r.violations.push_back(assignment.false_facts[i]);
    }
    r.margin = std::min(thr - r.max_true, r.min_false - thr);
  } else {
    for (std::size_t i = 0; i < t_scores.size(); ++i) {
      if (!(t_scores[i] < r.min_false)) r.violations.push_back(assignment.true_facts[i]);
    }
    for (std::size_t i = 0; i < f_scores.size(); ++i) {
      if (!(f_scores[i] > r.max_true)) r.violations.push_back(assignment.false_facts[i]);
    }
    r.margin = r.min_false - r.max_true;
  }
  r.passed = r.violations.empty();
  return r;
}

double class_extension_binary_bound(std::size_t num_classes, NormOrder norm) {
  const double per_coord = 2.0 / 7.0;
  const double per_side = norm == NormOrder::kL1
                              ? per_coord * static_cast<double>(num_classes)
                              : per_coord * std::sqrt(static_cast<double>(num_classes));
  return 2.0 * per_side;
}

double class_extension_unary_true_bound(std::size_t base_dim, std::size_t num_classes,
                                        NormOrder norm) {
  const double coords = static_cast<double>(base_dim + num_classes) - 1.0;
  return norm == NormOrder::kL1 ? 0.5 * coords : 0.5 * std::sqrt(coords);
}

ExplicitConfig extend_with_classes(const ExplicitConfig& base, const FactAssignment& assignment,
                                   double eps, NormOrder norm) {
  base.check();
  assignment.check();
  if (!(eps > 0.0)) throw UsageError("eps must be > 0");
  const auto base_report = verify_separation(base, assignment.binary_part(), norm);
  if (!base_report.passed) {
    throw UsageError("base configuration does not separate the binary facts (" +
                     base_report.summary() + ")");
  }

  const std::size_t n = base.num_entities();
  const std::size_t d = base.dim;
  const std::size_t n_c = base.class_boxes.size();
  const std::size_t d2 = d + n_c;

  std::set<UnaryFact> members;
  for (const auto& f : assignment.true_facts) {
    if (const auto* u = std::get_if<UnaryFact>(&f)) {
      if (u->cls < 0 || static_cast<std::size_t>(u->cls) >= n_c || u->entity < 0 ||
          static_cast<std::size_t>(u->entity) >= n) {
        throw std::out_of_range("unary fact outside the configuration's vocabulary");
      }
      members.insert(*u);
    }
  }

  ExplicitConfig out;
  out.dim = d2;
  out.positions = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d2));
  out.bumps = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d2));
  out.positions.leftCols(d) = base.positions;
  out.bumps.leftCols(d) = base.bumps;  // step 4: new bump coordinates stay 0
  // Step 3.
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n_c; ++i) {
      const bool member =
          members.count(UnaryFact{static_cast<ClassId>(i), static_cast<EntityId>(m)}) != 0;
      out.positions(m, d + i) = member ? 0.0 : 2.0;
    }
  }

  // Step 1: the fitted range of all entity positions, per dimension.
  std::vector<double> fit_lo(d2), fit_hi(d2);
  for (std::size_t k = 0; k < d2; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t m = 0; m < n; ++m) {
      lo = std::min(lo, out.positions(m, k));
      hi = std::max(hi, out.positions(m, k));
    }
    if (n == 0) lo = hi = 0.0;
    fit_lo[k] = lo - eps;
    fit_hi[k] = hi + eps;
  }
  for (std::size_t i = 0; i < n_c; ++i) {
    std::vector<double> lo = fit_lo, hi = fit_hi;
    // Step 2.
    lo[d + i] = -1.0;
    hi[d + i] = 1.0;
    out.class_boxes.emplace_back(std::move(lo), std::move(hi));
  }
  // Step 5.
  auto widen = [&](const Box& b) {
    std::vector<double> lo = b.lower(), hi = b.upper();
    lo.resize(d2, -3.0);
    hi.resize(d2, 3.0);
    return Box(std::move(lo), std::move(hi));
  };
  for (const auto& b : base.head_boxes) out.head_boxes.push_back(widen(b));
  for (const auto& b : base.tail_boxes) out.tail_boxes.push_back(widen(b));
  return out;
}

ModelParams reconstruct_with_mlp(const ExplicitConfig& target, const Mlp& point_mlp,
                                 const Mlp& bump_mlp, const Matrix& features, NormOrder norm) {
  target.check();
  if (point_mlp.sizes() != bump_mlp.sizes()) {
    throw DimensionError("point and bump MLPs must share one shape");
  }
  const auto sizes = point_mlp.sizes();
  if (sizes.size() < 2 || sizes.back() != target.dim) {
    throw DimensionError("MLP output dimension must equal the target dimension");
  }
  if (sizes.front() != static_cast<std::size_t>(features.cols()) ||
      static_cast<std::size_t>(features.rows()) != target.num_entities()) {
    throw DimensionError("feature matrix does not match the MLPs or the entity count");
  }

  ModelParams p;
  p.config.dim = target.dim;
  p.config.norm = norm;
  p.config.mode = ModelMode::kMlpBoxE;
  p.config.embedding_scale = 1.0;
  p.config.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
  p.config.feature_dim = sizes.front();
  p.point_mlp = point_mlp;
  p.bump_mlp = bump_mlp;
  p.point_emb = target.positions - point_mlp.forward(features);
  p.bump_emb = target.bumps - bump_mlp.forward(features);

  auto to_set = [&](const std::vector<Box>& boxes) {
    const auto rows = static_cast<Eigen::Index>(boxes.size());
    const auto cols = static_cast<Eigen::Index>(target.dim);
    BoxSet s{Matrix(rows, cols), Matrix(rows, cols)};
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Box& b = boxes[i];
        s.center(i, j) = b.center(j);
        if (!(b.side(j) > 0.0)) {
          throw std::invalid_argument("degenerate box side cannot be parametrized");
        }
        s.size_raw(i, j) = inverse_softplus(b.side(j));
      }
    }
    return s;
  };
  p.class_boxes = to_set(target.class_boxes);
  p.head_boxes = to_set(target.head_boxes);
  p.tail_boxes = to_set(target.tail_boxes);
  return p;
}

ExplicitConfig fit_binary_base(const FactAssignment& assignment, std::size_t n_e,
                               std::size_t n_c, std::size_t n_r, std::size_t dim,
                               const FitBudget& budget, std::uint64_t seed) {
  if (dim < 1) throw UsageError("dimension must be >= 1");
  assignment.check();
  const FactAssignment binary = assignment.binary_part();
  ModelConfig mc;
  mc.dim = dim;
  mc.norm = budget.norm;

  auto accept = [&](const ExplicitConfig& c) {
    const auto r = verify_separation(c, binary, budget.norm);
    return r.passed && r.margin >= budget.min_separation && r.max_true <= budget.max_true &&
           r.min_false >= budget.min_false;
  };

  if (binary.true_facts.empty() || binary.false_facts.empty()) {
    // One-sided assignments need no fitting: all points sit at the origin and
    // zero-extent relation boxes go either there (every score 0) or far away
    // (every score large).
    const double offset = binary.true_facts.empty()
                              ? std::max(10.0, std::isfinite(budget.min_false)
                                                   ? std::fabs(budget.min_false) + 1.0
                                                   : 0.0)
                              : 0.0;
    ExplicitConfig c = to_explicit(init_model(n_e, n_c, n_r, mc, seed));
    c.positions.setZero();
    c.bumps.setZero();
    const std::vector<double> corner(dim, offset);
    for (auto* boxes : {&c.head_boxes, &c.tail_boxes}) {
      for (auto& b : *boxes) b = Box(corner, corner);
    }
    if (!accept(c)) throw FitFailure("one-sided assignment violates the fit requirements");
    return c;
  }

  // Pair true and false facts cyclically: each pair contributes
  // softplus(s_t - gamma) + softplus(gamma - s_f).
  const std::size_t n_t = binary.true_facts.size(), n_f = binary.false_facts.size();
  const std::size_t pairs = std::max(n_t, n_f);
  std::vector<TrainingExample> batch(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    batch[i].positive = binary.true_facts[i % n_t];
    batch[i].negatives = {binary.false_facts[i % n_f]};
    batch[i].weight = 1.0 / static_cast<double>(pairs);
  }
  LossConfig loss;
  loss.kind = LossKind::kNegativeSampling;
  loss.margin = budget.margin;

  for (std::size_t attempt = 0; attempt < budget.restarts; ++attempt) {
    ModelParams params = init_model(n_e, n_c, n_r, mc, seed + 7919 * attempt);
    AdamState adam(AdamConfig{budget.learning_rate});
    for (std::size_t epoch = 1; epoch <= budget.max_epochs; ++epoch) {
      const auto lg = loss_and_gradients(params, batch, loss);
      adam_step(adam, params, lg.gradients);
      if (epoch % budget.check_every == 0) {
        auto c = to_explicit(params);
        if (accept(c)) return c;
      }
    }
  }
  throw FitFailure("no separating configuration found within the budget");
}

OracleResult run_expressiveness_oracle(const FactAssignment& assignment, std::size_t n_e,
                                       std::size_t n_c, std::size_t n_r, std::uint64_t seed,
                                       double eps, NormOrder norm) {
  // Twice the n*|R| dimensions of the existence argument; the slack makes
  // the margin requirements below much easier to meet by gradient descent.
  const std::size_t dim = std::max<std::size_t>(1, 2 * n_e * n_r);
  // Binary true scores may grow by at most `shift`, binary false scores never
  // shrink, unary true scores stay below `unary_true` and unary false scores
  // stay at or above kClassExtensionUnaryFalseBound. The base must therefore
  // keep its binary scores clear of all three.
  const double shift = class_extension_binary_bound(n_c, norm) * 1.01 + 1e-6;
  const double unary_true = class_extension_unary_true_bound(dim, n_c, norm);
  FitBudget budget;
  budget.norm = norm;
  budget.min_separation = shift;
  budget.max_true = kClassExtensionUnaryFalseBound - shift;
  budget.min_false = unary_true + 1e-6;
  budget.margin = 0.3 * unary_true + 0.7 * kClassExtensionUnaryFalseBound;
  budget.learning_rate = 0.05;
  budget.restarts = 10;
  OracleResult r;
  r.base = fit_binary_base(assignment, n_e, n_c, n_r, dim, budget, seed);
  r.base_binary = verify_separation(r.base, assignment.binary_part(), norm);
  r.extended = extend_with_classes(r.base, assignment, eps, norm);
  r.all = verify_separation(r.extended, assignment, norm);
  r.unary = verify_separation(r.extended, assignment.unary_part(), norm);
  r.binary = verify_separation(r.extended, assignment.binary_part(), norm);
  return r;
}

namespace {
using nlohmann::json;

json boxes_to_json(const std::vector<Box>& boxes) {
  json arr = json::array();
  for (const auto& b : boxes) arr.push_back({{"lower", b.lower()}, {"upper", b.upper()}});
  return arr;
}

std::vector<Box> boxes_from_json(const json& arr) {
  std::vector<Box> out;
  for (const auto& b : arr) {
    out.emplace_back(b.at("lower").get<std::vector<double>>(),
                     b.at("upper").get<std::vector<double>>());
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.data(), m.data() + m.size())}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != m.size()) throw DataError("bad tensor size");
  std::copy(data.begin(), data.end(), m.data());
  return m;
}
}  // namespace

void save_explicit_config(const std::filesystem::path& path, const ExplicitConfig& config) {
  config.check();
  json j;
  j["format"] = "boxekg-checkpoint";
  j["version"] = kCheckpointVersion;
  j["kind"] = "explicit";
  j["dim"] = config.dim;
  j["positions"] = matrix_to_json(config.positions);
  j["bumps"] = matrix_to_json(config.bumps);
  j["class_boxes"] = boxes_to_json(config.class_boxes);
  j["head_boxes"] = boxes_to_json(config.head_boxes);
  j["tail_boxes"] = boxes_to_json(config.tail_boxes);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << "\n";
}

ExplicitConfig load_explicit_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    const json j = json::parse(in);
    if (j.at("format") != "boxekg-checkpoint" ||
        j.at("version").get<int>() != kCheckpointVersion || j.at("kind") != "explicit") {
      throw DataError(path.string() + " is not a raw configuration checkpoint");
    }
    ExplicitConfig c;
    c.dim = j.at("dim").get<std::size_t>();
    c.positions = matrix_from_json(j.at("positions"));
    c.bumps = matrix_from_json(j.at("bumps"));
    c.class_boxes = boxes_from_json(j.at("class_boxes"));
    c.head_boxes = boxes_from_json(j.at("head_boxes"));
    c.tail_boxes = boxes_from_json(j.at("tail_boxes"));
    c.check();
    return c;
  } catch (const json::exception& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError("corrupt checkpoint " + path.string() + ": " + e.what());
  }
}

}  // namespace boxekg
