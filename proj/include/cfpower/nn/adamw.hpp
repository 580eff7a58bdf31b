// Copyright 2026 The cfpower Authors.
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfpower/nn/autograd.hpp"

namespace cfpower::nn {

struct Parameter {
  std::string name;
  Var var;
  bool decay = true;  // false for biases and normalization parameters
};

struct AdamWOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

/// AdamW with decoupled weight decay and bias-corrected moments.
class AdamW {
 public:
  AdamW(std::vector<Parameter> params, AdamWOptions opts = {});

  /// Applies one update from the accumulated gradients. Parameters without a
  /// gradient are treated as having a zero gradient.
  void step();
  void zero_grad();

  std::uint64_t steps() const { return step_; }
  const AdamWOptions& options() const { return opts_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const Tensor& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor& second_moment(std::size_t i) const { return v_[i]; }

 private:
  std::vector<Parameter> params_;
  AdamWOptions opts_;
  std::vector<Tensor> m_, v_;
  std::uint64_t step_ = 0;
};

}  // namespace cfpower::nn
