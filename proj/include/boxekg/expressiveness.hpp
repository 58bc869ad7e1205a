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

#ifndef BOXEKG_EXPRESSIVENESS_HPP_
#define BOXEKG_EXPRESSIVENESS_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxekg/box.hpp"
#include "boxekg/kg.hpp"
#include "boxekg/mlp.hpp"
#include "boxekg/model.hpp"
#include "boxekg/random.hpp"

namespace boxekg {

// A raw configuration: final entity positions and bumps plus explicit boxes,
// with no trainable parametrization in between.
struct ExplicitConfig {
  std::size_t dim = 0;
  Matrix positions;  // |E| x d
  Matrix bumps;      // |E| x d
  std::vector<Box> class_boxes;
  std::vector<Box> head_boxes;
  std::vector<Box> tail_boxes;

  std::size_t num_entities() const { return static_cast<std::size_t>(positions.rows()); }
  // Throws DimensionError if any shape disagrees with `dim`.
  void check() const;
};

double score_fact(const ExplicitConfig& config, const Fact& fact, NormOrder norm);

// Final positions/bumps and materialized boxes of a model.
ExplicitConfig to_explicit(const ModelParams& model, const Matrix* features = nullptr);

struct FactAssignment {
  std::vector<Fact> true_facts;
  std::vector<Fact> false_facts;

  // Throws UsageError if a fact is both true and false.
  void check() const;
  FactAssignment unary_part() const;
  FactAssignment binary_part() const;
};

// Every unary and binary fact over the given counts, unary first.
std::vector<Fact> all_facts(std::size_t num_entities, std::size_t num_classes,
                            std::size_t num_relations);

// Each fact of the full fact space is true with probability `p_true`,
// false otherwise.
FactAssignment random_assignment(std::size_t num_entities, std::size_t num_classes,
                                 std::size_t num_relations, Rng& rng, double p_true = 0.5);

struct SeparationReport {
  bool passed = true;
  double max_true = -std::numeric_limits<double>::infinity();
  double min_false = std::numeric_limits<double>::infinity();
  // min_false - max_true, or the smaller gap to the threshold when one is
  // given. +inf when either side is empty.
  double margin = std::numeric_limits<double>::infinity();
  std::vector<Fact> violations;

  // "SEPARATED margin=<m>" or "NOT SEPARATED margin=<m> violations=<n>".
  std::string summary() const;
};

// Passes iff every true fact scores strictly below every false fact, or,
// with a threshold, true < threshold < false.
SeparationReport verify_separation(const ExplicitConfig& config,
                                   const FactAssignment& assignment, NormOrder norm,
                                   std::optional<double> threshold = {});

// Upper bound on how much extend_with_classes can raise the score of any
// binary fact: every new coordinate of a bumped point lies in {0, 2} inside
// a [-3, 3] relation box (distance 0 or 2/7), on both the head and tail side.
// Largest amount by which extend_with_classes can raise a binary score.
double class_extension_binary_bound(std::size_t num_classes, NormOrder norm);

// Upper bound on any true unary score after extend_with_classes of a base
// with `base_dim` dimensions. Every coordinate other than the class's own
// lies inside its fitted box and contributes less than 1/2.
double class_extension_unary_true_bound(std::size_t base_dim, std::size_t num_classes,
                                        NormOrder norm);

// Lower bound on any false unary score after extend_with_classes (the
// non-member coordinate 2 against the box [-1, 1]).
inline constexpr double kClassExtensionUnaryFalseBound = 10.0 / 3.0;

// Adds one dimension per class to a configuration that separates the
// binary part of `assignment`:
//   1. class boxes span [min_m e_m(k) - eps, max_m e_m(k) + eps] in every
//      original dimension k (and, for the other classes' new dimensions,
//      the range of the entity coordinates there);
//   2. class i spans [-1, 1] in its new dimension;
//   3. entity m sits at 0 in dimension i if c_i(e_m) is true, else at 2;
//   4. bumps are 0 in the new dimensions;
//   5. relation head and tail boxes span [-3, 3] in the new dimensions.
// Throws UsageError if the base does not separate the binary facts or
// eps <= 0.
ExplicitConfig extend_with_classes(const ExplicitConfig& base, const FactAssignment& assignment,
                                   double eps = 0.1, NormOrder norm = NormOrder::kL2);

// MLP-BoxE parameters (embedding scale 1) whose final positions and bumps
// equal the target: embedding = target - MLP(features). Both MLPs must share
// one shape with output dimension target.dim.
ModelParams reconstruct_with_mlp(const ExplicitConfig& target, const Mlp& point_mlp,
                                 const Mlp& bump_mlp, const Matrix& features,
                                 NormOrder norm = NormOrder::kL2);

class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitBudget {
  std::size_t max_epochs = 4000;
  std::size_t restarts = 4;
  std::size_t check_every = 25;
  double learning_rate = 0.02;
  // gamma of the negative-sampling loss used for fitting.
  double margin = 2.0;
  // Acceptance requirements on the binary scores of the returned
  // configuration: min_false - max_true >= min_separation, and the absolute
  // limits below.
  double min_separation = 0.0;
  double max_true = std::numeric_limits<double>::infinity();
  double min_false = -std::numeric_limits<double>::infinity();
  NormOrder norm = NormOrder::kL2;
};

// Optimizes a BoxE configuration of dimension `dim` on the binary part of
// `assignment` (true facts against false facts, full batch) and returns the
// first configuration that verify_separation accepts with at least
// budget.min_separation. Throws FitFailure when the budget runs out.
ExplicitConfig fit_binary_base(const FactAssignment& assignment, std::size_t num_entities,
                               std::size_t num_classes, std::size_t num_relations,
                               std::size_t dim, const FitBudget& budget, std::uint64_t seed);

struct OracleResult {
  ExplicitConfig base;
  ExplicitConfig extended;
  SeparationReport base_binary;
  // Over the whole assignment, unary and binary facts together.
  SeparationReport all;
  SeparationReport unary;
  SeparationReport binary;
  bool passed() const { return all.passed; }
};

// Fits a base of dimension max(1, 2|E||R|) that meets the extension's
// preconditions, extends it with classes and verifies the full assignment
// (the unary and binary parts are also reported separately). Throws
// FitFailure when no qualifying base is found.
OracleResult run_expressiveness_oracle(const FactAssignment& assignment,
                                       std::size_t num_entities, std::size_t num_classes,
                                       std::size_t num_relations, std::uint64_t seed,
                                       double eps = 0.1, NormOrder norm = NormOrder::kL2);

// Raw configurations share the checkpoint container, flagged
// "kind": "explicit".
void save_explicit_config(const std::filesystem::path& path, const ExplicitConfig& config);
ExplicitConfig load_explicit_config(const std::filesystem::path& path);

}  // namespace boxekg

#endif  // BOXEKG_EXPRESSIVENESS_HPP_
