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
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfpower/dataset.hpp"
#include "cfpower/model.hpp"
#include "cfpower/pipeline.hpp"

namespace cfpower {

/// Per-UE SE of one power scheme in both directions.
struct SchemeSE {
  Eigen::VectorXd ul;
  Eigen::VectorXd dl;
  double min_ul() const { return ul.minCoeff(); }
  double min_dl() const { return dl.minCoeff(); }
};

struct EvalRecord {
  int K = 0;
  int L = 0;
  std::uint64_t seed = 0;
  SchemeSE predicted;  // empty when no model was supplied
  SchemeSE optimal;
  SchemeSE epa;
  SchemeSE fpa;
  double ratio_ul = 0.0;  // min-SE(predicted) / min-SE(optimal)
  double ratio_dl = 0.0;
};

nlohmann::json to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const nlohmann::json& j);

struct EvalOptions {
  int n_mc = 300;
  double fpa_nu = -0.5;
  int threads = 0;  // 0 = hardware concurrency
};

/// SE of arbitrary UL/DL powers under a scenario's hardening coefficients.
SchemeSE scheme_se(const ScenarioCoefficients& c, const Eigen::VectorXd& p_ul, const Eigen::VectorXd& p_dl);

/// Scores predicted, optimal (stored label), EPA and FPA powers on the
/// coefficients regenerated from each sample's seed. `weights` may be null.
std::vector<EvalRecord> evaluate(const TransformerWeights* weights, const std::vector<Sample>& samples,
                                 const NetworkConfig& cfg, const EvalOptions& opts = {});

/// Empirical CDF: distinct sorted values paired with the fraction <= each.
std::vector<std::pair<double, double>> cdf(std::vector<double> values);

struct SweepRow {
  int K = 0;
  int L = 0;
  int samples = 0;
  double se_opt_ul = 0.0, se_pred_ul = 0.0, se_epa_ul = 0.0;
  double se_opt_dl = 0.0, se_pred_dl = 0.0, se_epa_dl = 0.0;
  double ratio_ul() const { return se_pred_ul / se_opt_ul; }
  double ratio_dl() const { return se_pred_dl / se_opt_dl; }
};

nlohmann::json to_json(const SweepRow& r);
SweepRow sweep_row_from_json(const nlohmann::json& j);

/// Mean per-UE SE over freshly labeled scenarios for every (K, L) point.
std::vector<SweepRow> sweep(const TransformerWeights* weights, const std::vector<std::pair<int, int>>& points,
                            int samples_per_point, const NetworkConfig& cfg, std::uint64_t seed,
                            const PipelineOptions& opts, int threads = 0);

std::vector<SweepRow> sweep_k(const TransformerWeights* weights, int L, const std::vector<int>& k_list,
                              int samples_per_k, const NetworkConfig& cfg, std::uint64_t seed,
                              const PipelineOptions& opts, int threads = 0);

std::vector<SweepRow> sweep_l(const TransformerWeights* weights, int K, const std::vector<int>& l_list,
                              int samples_per_l, const NetworkConfig& cfg, std::uint64_t seed,
                              const PipelineOptions& opts, int threads = 0);

enum class Phase { kTrain, kInfer };

/// Operation counts: infer = M(K d^2 + K^2 d) + K(2L + 2) d and
/// train = 2 M B K d (d + K) + 2 B K (2L + 2) d.
std::uint64_t theoretical_complexity(int K, int L, const ModelConfig& cfg, Phase phase, int batch = 1);

struct BenchReport {
  int K = 0;
  int L = 0;
  int n_mc = 0;
  std::vector<double> inference_ms;
  std::vector<double> solver_ms;
  double inference_median_ms = 0.0;
  double solver_median_ms = 0.0;
  double speedup = 0.0;
};

nlohmann::json to_json(const BenchReport& r);

/// Median wall time of a model forward pass against the full label pipeline
/// (hardening plus both solvers) on the same scenarios, single-threaded.
BenchReport bench_runtime(const TransformerWeights& weights, int K, int L, const NetworkConfig& cfg, int reps,
                          std::uint64_t seed, int n_mc);

double median(std::vector<double> v);

}  // namespace cfpower
