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

#include "boxekg/mlp.hpp"

#include <cmath>
#include <string>

#include "boxekg/errors.hpp"

namespace boxekg {

Mlp::Mlp(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw UsageError("an MLP needs at least input and output sizes");
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    layers.push_back({Matrix::Zero(sizes[l + 1], sizes[l]), Matrix::Zero(1, sizes[l + 1])});
  }
}

Mlp Mlp::random(const std::vector<std::size_t>& sizes, Rng& rng) {
  Mlp net(sizes);
  for (auto& layer : net.layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = rng.uniform(-bound, bound);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      layer.bias.data()[i] = rng.uniform(-bound, bound);
    }
  }
  return net;
}

std::size_t Mlp::input_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

std::size_t Mlp::output_dim() const {
  return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
}

std::vector<std::size_t> Mlp::sizes() const {
  std::vector<std::size_t> out;
  if (layers.empty()) return out;
  out.push_back(input_dim());
  for (const auto& l : layers) out.push_back(static_cast<std::size_t>(l.weight.rows()));
  return out;
}

Matrix Mlp::forward(const Matrix& x, Trace* trace) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim()) {
    throw DimensionError("Mlp::forward: expected " + std::to_string(input_dim()) +
                         " input columns, got " + std::to_string(x.cols()));
  }
  if (trace) {
    trace->inputs.clear();
    trace->preactivations.clear();
  }
  Matrix h = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = h * layers[l].weight.transpose();
    z.rowwise() += layers[l].bias.row(0);
    if (trace) {
      trace->inputs.push_back(std::move(h));
      trace->preactivations.push_back(z);
    }
    h = (l + 1 < layers.size()) ? Matrix(z.cwiseMax(0.0)) : std::move(z);
  }
  return h;
}

Matrix Mlp::backward(const Trace& trace, const Matrix& d_output, Mlp& grad) const {
  Matrix dz = d_output;
  for (std::size_t l = layers.size(); l-- > 0;) {
    grad.layers[l].weight.noalias() += dz.transpose() * trace.inputs[l];
    grad.layers[l].bias += dz.colwise().sum();
    Matrix dh = dz * layers[l].weight;
    if (l > 0) {
      dh = dh.cwiseProduct(
          (trace.preactivations[l - 1].array() > 0.0).cast<double>().matrix());
    }
    dz = std::move(dh);
  }
  return dz;
}

}  // namespace boxekg
