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

#ifndef BOXEKG_MLP_HPP_
#define BOXEKG_MLP_HPP_

#include <cstddef>
#include <vector>

#include "boxekg/random.hpp"
#include "boxekg/tensor.hpp"

namespace boxekg {

// Fully connected network: ReLU on hidden layers, identity on the output.
// Inputs are batched as rows.
struct Mlp {
  struct Layer {
    Matrix weight;  // out x in
    Matrix bias;    // 1 x out
    bool operator==(const Layer&) const = default;
  };

  // Intermediate values kept by forward() for backward().
  struct Trace {
    std::vector<Matrix> inputs;       // input to each layer
    std::vector<Matrix> preactivations;
  };

  std::vector<Layer> layers;

  Mlp() = default;
  // Zero-initialized network with sizes [in, hidden..., out].
  explicit Mlp(const std::vector<std::size_t>& sizes);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.
  static Mlp random(const std::vector<std::size_t>& sizes, Rng& rng);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::vector<std::size_t> sizes() const;

  Matrix forward(const Matrix& x, Trace* trace = nullptr) const;

  // Accumulates dLoss/dparams into `grad` (same shape as *this) and returns
  // dLoss/dinput.
  Matrix backward(const Trace& trace, const Matrix& d_output, Mlp& grad) const;

  bool operator==(const Mlp&) const = default;
};

}  // namespace boxekg

#endif  // BOXEKG_MLP_HPP_
