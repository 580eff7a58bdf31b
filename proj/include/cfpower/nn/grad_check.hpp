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
#include <functional>
#include <vector>

#include "cfpower/nn/autograd.hpp"

namespace cfpower::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool passed = false;
};

/// Compares reverse-mode gradients of `fn` against central differences with
/// step `h`. A non-scalar output is reduced to a scalar by a fixed random
/// projection. Relative error is |a - n| / max(|a|, |n|, 1e-3).
GradCheckReport grad_check(const std::function<Var(const std::vector<Var>&)>& fn,
                           const std::vector<Tensor>& inputs, double tol, double h = 1e-6,
                           std::uint64_t seed = 0);

}  // namespace cfpower::nn
