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

#include <random>
#include <vector>

#include "cfpower/nn/autograd.hpp"

namespace cfpower::nn {

// Differentiable primitives over rank-2 tensors. Binary elementwise ops take a
// right operand of the same shape, 1 x n (row), m x 1 (column) or 1 x 1.

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var scale(const Var& a, double s);

Var relu(const Var& x);
Var sigmoid(const Var& x);

/// Row-wise softmax with max subtraction.
Var softmax_rows(const Var& x);

/// Normalizes every row to zero mean and unit variance (no affine part).
Var layer_norm(const Var& x, double eps = 1e-5);

/// Inverted dropout: in training mode zeroes each entry with probability
/// `rate` and scales survivors by 1 / (1 - rate); identity otherwise.
Var dropout(const Var& x, double rate, bool train, std::mt19937_64& rng);

Var transpose(const Var& x);
Var concat_cols(const std::vector<Var>& parts);
Var slice_cols(const Var& x, std::size_t start, std::size_t count);

/// Column means, 1 x n.
Var mean_rows(const Var& x);
/// Mean and sum of all entries, 1 x 1.
Var mean(const Var& x);
Var sum(const Var& x);

}  // namespace cfpower::nn
