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

#include "cfpower/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cfpower/nn/ops.hpp"

namespace cfpower::nn {

GradCheckReport grad_check(const std::function<Var(const std::vector<Var>&)>& fn,
                           const std::vector<Tensor>& inputs, double tol, double h, std::uint64_t seed) {
  // Projection weights are fixed on the first call so every evaluation sees
  // the same scalar objective.
  Tensor projection;
  auto objective = [&](const std::vector<Var>& vars) {
    Var out = fn(vars);
    if (out.value().size() == 1) return out;
    if (projection.empty()) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      projection = Tensor(out.value().shape(), std::vector<double>(out.value().size()));
      for (std::size_t i = 0; i < projection.size(); ++i) projection[i] = u(rng);
    }
    return sum(mul(out, Var::constant(projection)));
  };

  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(Var::parameter(t));
  backward(objective(vars));

  GradCheckReport report;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Tensor analytic = vars[i].grad();
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      auto eval_at = [&](double delta) {
        NoGradGuard guard;
        std::vector<Var> probe;
        for (std::size_t q = 0; q < inputs.size(); ++q) {
          Tensor t = inputs[q];
          if (q == i) t[j] += delta;
          probe.push_back(Var::constant(std::move(t)));
        }
        return objective(probe).value()[0];
      };
      const double numeric = (eval_at(h) - eval_at(-h)) / (2.0 * h);
      const double a = analytic[j];
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), 1e-3});
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel > report.max_rel_error || report.checked == 0) {
        report.max_rel_error = std::max(report.max_rel_error, rel);
        if (rel >= report.max_rel_error) {
          report.worst_input = i;
          report.worst_index = j;
        }
      }
      ++report.checked;
    }
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

}  // namespace cfpower::nn
