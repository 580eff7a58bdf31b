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

#include "cfpower/nn/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace cfpower::nn {

AdamW::AdamW(std::vector<Parameter> params, AdamWOptions opts) : params_(std::move(params)), opts_(opts) {
  for (const auto& p : params_) {
    if (!p.var.requires_grad()) throw std::invalid_argument("AdamW: '" + p.name + "' is not trainable");
    const Tensor& v = p.var.value();
    m_.emplace_back(v.shape(), std::vector<double>(v.size(), 0.0));
    v_.emplace_back(v.shape(), std::vector<double>(v.size(), 0.0));
  }
}

void AdamW::step() {
  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(opts_.beta1, t);
  const double c2 = 1.0 - std::pow(opts_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Var& var = params_[i].var;
    Tensor& theta = var.mutable_value();
    const bool has_grad = var.has_grad();
    const double wd = params_[i].decay ? opts_.weight_decay : 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double g = has_grad ? var.grad()[j] : 0.0;
      m_[i][j] = opts_.beta1 * m_[i][j] + (1.0 - opts_.beta1) * g;
      v_[i][j] = opts_.beta2 * v_[i][j] + (1.0 - opts_.beta2) * g * g;
      const double m_hat = m_[i][j] / c1;
      const double v_hat = v_[i][j] / c2;
      theta[j] -= opts_.lr * (m_hat / (std::sqrt(v_hat) + opts_.eps) + wd * theta[j]);
    }
  }
}

void AdamW::zero_grad() {
  for (auto& p : params_) p.var.zero_grad();
}

}  // namespace cfpower::nn
