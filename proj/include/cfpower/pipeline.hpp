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

#include "cfpower/channel.hpp"
#include "cfpower/scenario.hpp"
#include "cfpower/se_engine.hpp"
#include "cfpower/solvers.hpp"

namespace cfpower {

struct PipelineOptions {
  int n_mc = 500;
  SolverOptions solver;
  int refine = 0;  // extra rounds that re-derive filters at the solved UL powers
};

/// Everything needed to score any power allocation for one scenario. All
/// schemes evaluated on the same instance share these coefficients.
struct ScenarioCoefficients {
  Scenario scenario;
  LargeScaleTable large_scale;
  CoherenceSplit split;
  double sigma2 = 0.0;
  HardeningCoeffsUL ul;
  HardeningCoeffsDL dl;
  Eigen::VectorXd filter_powers;  // UL powers the combiners were computed at
};

/// Channel statistics (covariances plus MMSE estimator) for a scenario.
ChannelStats scenario_channel_stats(const Scenario& scenario, const LargeScaleTable& large_scale,
                                    const NetworkConfig& cfg);

/// Hardening coefficients of a scenario with filters frozen at filter_powers
/// (full UL power when empty).
ScenarioCoefficients scenario_coefficients(const NetworkConfig& cfg, const Scenario& scenario,
                                           int n_mc, const Eigen::VectorXd& filter_powers = {});

struct LabeledScenario {
  ScenarioCoefficients coeffs;
  PowerSolution ul;
  PowerSolution dl;
  int refinements = 0;
};

/// Full label pipeline: geometry, large-scale fading, hardening, both solvers.
LabeledScenario label_scenario(const NetworkConfig& cfg, const Scenario& scenario,
                               const PipelineOptions& opts);

LabeledScenario label_scenario(const NetworkConfig& cfg, int K, int L, std::uint64_t seed,
                               const PipelineOptions& opts);

}  // namespace cfpower
