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

#ifndef BOXEKG_BOX_HPP_
#define BOXEKG_BOX_HPP_

#include <span>
#include <vector>

namespace boxekg {

// Order x of the L-x norm used to aggregate per-coordinate distances.
enum class NormOrder : int { kL1 = 1, kL2 = 2 };

// Closed axis-aligned box with lower <= upper elementwise.
class Box {
 public:
  Box() = default;
  // Throws DimensionError on length mismatch and std::invalid_argument if a
  // corner is non-finite or lower > upper somewhere.
  Box(std::vector<double> lower, std::vector<double> upper);

  // Box of the given extent on every axis around `center`.
  static Box centered(std::span<const double> center, std::span<const double> side);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  double center(std::size_t j) const { return 0.5 * (lower_[j] + upper_[j]); }
  double side(std::size_t j) const { return upper_[j] - lower_[j]; }
  // upper - lower + 1; always >= 1.
  double width(std::size_t j) const { return side(j) + 1.0; }

  bool operator==(const Box&) const = default;

 private:
  std::vector<double> lower_, upper_;
};

// Distance of one coordinate p to the interval of the given center and
// extent `side` (= upper - lower). With w = side + 1 and
// kappa = 0.5 (w - 1)(w - 1/w):
//   inside  (|p - c| <= side / 2):  |p - c| / w
//   outside:                        |p - c| * w - kappa
// Both branches agree on the boundary.
double coordinate_distance(double p, double center, double side);

// coordinate_distance together with its partial derivatives. The derivative
// with respect to the center is -d_point. On the boundary the inside-branch
// derivatives are returned; at p == center the point derivative is 0.
struct CoordinateDistance {
  double value = 0.0;
  double d_point = 0.0;
  double d_side = 0.0;
};
CoordinateDistance coordinate_distance_grad(double p, double center, double side);

// Elementwise point-to-box distance.
std::vector<double> point_box_distance(std::span<const double> point, const Box& box);

double lx_norm(std::span<const double> v, NormOrder norm);

// ||dist(e, c)||_x ; lower is more plausible.
double score_unary(std::span<const double> point, const Box& class_box, NormOrder norm);

// ||dist(h', r^h)||_x + ||dist(t', r^t)||_x for already-bumped points.
double score_binary(std::span<const double> head_point, std::span<const double> tail_point,
                    const Box& head_box, const Box& tail_box, NormOrder norm);

bool contains(const Box& box, std::span<const double> point);

}  // namespace boxekg

#endif  // BOXEKG_BOX_HPP_
