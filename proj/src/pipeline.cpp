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

#include "cfpower/pipeline.hpp"

#include "cfpower/random.hpp"

namespace cfpower {

ChannelStats scenario_channel_stats(const Scenario& scenario, const LargeScaleTable& large_scale,
                                    const NetworkConfig& cfg) {
  const CorrelationConfig corr = CorrelationConfig::parse(cfg.correlation, cfg.asd_deg);
  ChannelStats stats =
      corr.model == CorrelationModel::kLocalScattering
          ? build_covariance(large_scale.beta, corr, cfg.antennas, arrival_angles(scenario))
          : build_covariance(large_scale.beta, corr, cfg.antennas);
  const CoherenceSplit split = tau_split(cfg.tau_c, scenario.K);
  // Pilots are sent at the maximum UL power.
  attach_estimator(stats, split.tau_p, cfg.p_ul_max_mw, cfg.sigma2_mw());
  return stats;
}

ScenarioCoefficients scenario_coefficients(const NetworkConfig& cfg, const Scenario& scenario,
                                           int n_mc, const Eigen::VectorXd& filter_powers) {
  ScenarioCoefficients out;
  out.scenario = scenario;
  out.large_scale = large_scale_fading(scenario, cfg);
  out.split = tau_split(cfg.tau_c, scenario.K);
  out.sigma2 = cfg.sigma2_mw();
  out.filter_powers = filter_powers.size() == scenario.K
                          ? filter_powers
                          : Eigen::VectorXd::Constant(scenario.K, cfg.p_ul_max_mw);
  const ChannelStats stats = scenario_channel_stats(scenario, out.large_scale, cfg);
  auto [ul, dl] = mc_hardening(stats, out.filter_powers, n_mc, scenario.seed);
  out.ul = std::move(ul);
  out.dl = std::move(dl);
  return out;
}

LabeledScenario label_scenario(const NetworkConfig& cfg, const Scenario& scenario,
                               const PipelineOptions& opts) {
  LabeledScenario out;
  out.coeffs = scenario_coefficients(cfg, scenario, opts.n_mc);
  const double budget = cfg.dl_budget_mw(scenario.L);
  auto solve = [&] {
    out.ul = maxmin_ul(out.coeffs.ul, out.coeffs.sigma2, cfg.p_ul_max_mw, out.coeffs.split,
                       opts.solver);
    out.dl = maxmin_dl(out.coeffs.dl, out.coeffs.sigma2, budget, out.coeffs.split, opts.solver);
  };
  solve();
  for (int r = 0; r < opts.refine; ++r) {
    // The Monte-Carlo seed is reused, so only the filters change between rounds.
    out.coeffs = scenario_coefficients(cfg, scenario, opts.n_mc, out.ul.power.p);
    solve();
    ++out.refinements;
  }
  return out;
}

LabeledScenario label_scenario(const NetworkConfig& cfg, int K, int L, std::uint64_t seed,
                               const PipelineOptions& opts) {
  return label_scenario(cfg, sample_scenario(cfg, K, L, seed), opts);
}

}  // namespace cfpower
