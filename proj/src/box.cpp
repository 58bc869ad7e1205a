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

#include "boxekg/box.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "boxekg/errors.hpp"

namespace boxekg {
namespace {

void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  check_dims(lower_.size(), upper_.size(), "Box");
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j])) {
      throw std::invalid_argument("Box: non-finite corner at axis " + std::to_string(j));
    }
    if (lower_[j] > upper_[j]) {
      throw std::invalid_argument("Box: lower > upper at axis " + std::to_string(j));
    }
  }
}

Box Box::centered(std::span<const double> center, std::span<const double> side) {
  check_dims(center.size(), side.size(), "Box::centered");
  std::vector<double> lo(center.size()), hi(center.size());
  for (std::size_t j = 0; j < center.size(); ++j) {
    lo[j] = center[j] - 0.5 * side[j];
    hi[j] = center[j] + 0.5 * side[j];
  }
  return Box(std::move(lo), std::move(hi));
}

double coordinate_distance(double p, double center, double side) {
  const double w = side + 1.0;
  const double offset = std::abs(p - center);
  if (offset <= 0.5 * side) return offset / w;
  const double kappa = 0.5 * (w - 1.0) * (w - 1.0 / w);
  return offset * w - kappa;
}

CoordinateDistance coordinate_distance_grad(double p, double center, double side) {
  const double w = side + 1.0;
  const double diff = p - center;
  const double offset = std::abs(diff);
  const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  CoordinateDistance out;
  if (offset <= 0.5 * side) {
    out.value = offset / w;
    out.d_point = sign / w;
    out.d_side = -offset / (w * w);
  } else {
    const double kappa = 0.5 * (w - 1.0) * (w - 1.0 / w);
    // d kappa / d side, with dw / dside = 1.
    const double d_kappa = 0.5 * (w - 1.0 / w) + 0.5 * (w - 1.0) * (1.0 + 1.0 / (w * w));
    out.value = offset * w - kappa;
    out.d_point = sign * w;
    out.d_side = offset - d_kappa;
  }
  return out;
}

std::vector<double> point_box_distance(std::span<const double> point, const Box& box) {
  check_dims(point.size(), box.dim(), "point_box_distance");
  std::vector<double> out(point.size());
  for (std::size_t j = 0; j < point.size(); ++j) {
    out[j] = coordinate_distance(point[j], box.center(j), box.side(j));
  }
  return out;
}

double lx_norm(std::span<const double> v, NormOrder norm) {
  double acc = 0.0;
  if (norm == NormOrder::kL1) {
    for (double x : v) acc += std::abs(x);
    return acc;
  }
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double score_unary(std::span<const double> point, const Box& class_box, NormOrder norm) {
  const auto d = point_box_distance(point, class_box);
  return lx_norm(d, norm);
}

double score_binary(std::span<const double> head_point, std::span<const double> tail_point,
                    const Box& head_box, const Box& tail_box, NormOrder norm) {
  return score_unary(head_point, head_box, norm) + score_unary(tail_point, tail_box, norm);
}

bool contains(const Box& box, std::span<const double> point) {
  check_dims(point.size(), box.dim(), "contains");
  for (std::size_t j = 0; j < point.size(); ++j) {
    if (point[j] < box.lower()[j] || point[j] > box.upper()[j]) return false;
  }
  return true;
}

}  // namespace boxekg
