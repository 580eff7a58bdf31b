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

#include "cfpower/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "cfpower/parallel.hpp"
#include "cfpower/random.hpp"
#include "cfpower/solvers.hpp"

namespace cfpower {

namespace {

nlohmann::json scheme_json(const SchemeSE& s) {
  if (s.ul.size() == 0) return nullptr;
  return {{"ul", std::vector<double>(s.ul.data(), s.ul.data() + s.ul.size())},
          {"dl", std::vector<double>(s.dl.data(), s.dl.data() + s.dl.size())},
          {"min_ul", s.min_ul()},
          {"min_dl", s.min_dl()}};
}

SchemeSE scheme_from_json(const nlohmann::json& j) {
  SchemeSE s;
  if (j.is_null()) return s;
  const auto ul = j.at("ul").get<std::vector<double>>();
  const auto dl = j.at("dl").get<std::vector<double>>();
  s.ul = Eigen::Map<const Eigen::VectorXd>(ul.data(), static_cast<Eigen::Index>(ul.size()));
  s.dl = Eigen::Map<const Eigen::VectorXd>(dl.data(), static_cast<Eigen::Index>(dl.size()));
  return s;
}

double mean_of(const Eigen::VectorXd& v) { return v.size() ? v.mean() : 0.0; }

}  // namespace

nlohmann::json to_json(const EvalRecord& r) {
  return {{"K", r.K},
          {"L", r.L},
          {"seed", r.seed},
          {"predicted", scheme_json(r.predicted)},
          {"optimal", scheme_json(r.optimal)},
          {"epa", scheme_json(r.epa)},
          {"fpa", scheme_json(r.fpa)},
          {"ratio_ul", r.ratio_ul},
          {"ratio_dl", r.ratio_dl}};
}

EvalRecord eval_record_from_json(const nlohmann::json& j) {
  EvalRecord r;
  r.K = j.at("K").get<int>();
  r.L = j.at("L").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.predicted = scheme_from_json(j.at("predicted"));
  r.optimal = scheme_from_json(j.at("optimal"));
  r.epa = scheme_from_json(j.at("epa"));
  r.fpa = scheme_from_json(j.at("fpa"));
  r.ratio_ul = j.value("ratio_ul", 0.0);
  r.ratio_dl = j.value("ratio_dl", 0.0);
  return r;
}

SchemeSE scheme_se(const ScenarioCoefficients& c, const Eigen::VectorXd& p_ul, const Eigen::VectorXd& p_dl) {
  SchemeSE s;
  s.ul = se_from_sinr(sinr_ul(p_ul, c.ul, c.sigma2), c.split.prelog_ul());
  s.dl = se_from_sinr(sinr_dl(p_dl, c.dl, c.sigma2), c.split.prelog_dl());
  return s;
}

std::vector<EvalRecord> evaluate(const TransformerWeights* weights, const std::vector<Sample>& samples,
                                 const NetworkConfig& cfg, const EvalOptions& opts) {
  std::vector<EvalRecord> out(samples.size());
  parallel_for(
      samples.size(),
      [&](std::size_t i) {
        const Sample& s = samples[i];
        const Scenario scenario = s.scenario();
        const ScenarioCoefficients c = scenario_coefficients(cfg, scenario, opts.n_mc);
        EvalRecord& r = out[i];
        r.K = s.K;
        r.L = s.L;
        r.seed = s.seed;
        r.optimal = scheme_se(c, s.p_star_ul, s.p_star_dl);
        r.epa = scheme_se(c, epa(Direction::kUplink, s.K, s.L, cfg).p, epa(Direction::kDownlink, s.K, s.L, cfg).p);
        r.fpa = scheme_se(c, fpa(c.large_scale.beta, opts.fpa_nu, Direction::kUplink, cfg).p,
                          fpa(c.large_scale.beta, opts.fpa_nu, Direction::kDownlink, cfg).p);
        if (weights) {
          const Eigen::MatrixXd p = forward(scenario, *weights, cfg);
          r.predicted = scheme_se(c, p.col(0), p.col(1));
          r.ratio_ul = r.predicted.min_ul() / r.optimal.min_ul();
          r.ratio_dl = r.predicted.min_dl() / r.optimal.min_dl();
        }
      },
      opts.threads);
  return out;
}

std::vector<std::pair<double, double>> cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("cdf: no values");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

nlohmann::json to_json(const SweepRow& r) {
  nlohmann::json j = {{"K", r.K},
                      {"L", r.L},
                      {"samples", r.samples},
                      {"se_opt_ul", r.se_opt_ul},
                      {"se_opt_dl", r.se_opt_dl},
                      {"se_epa_ul", r.se_epa_ul},
                      {"se_epa_dl", r.se_epa_dl}};
  if (r.se_pred_ul > 0.0 || r.se_pred_dl > 0.0) {
    j["se_pred_ul"] = r.se_pred_ul;
    j["se_pred_dl"] = r.se_pred_dl;
    j["ratio_ul"] = r.ratio_ul();
    j["ratio_dl"] = r.ratio_dl();
  }
  return j;
}

SweepRow sweep_row_from_json(const nlohmann::json& j) {
  SweepRow r;
  r.K = j.at("K").get<int>();
  r.L = j.at("L").get<int>();
  r.samples = j.at("samples").get<int>();
  r.se_opt_ul = j.at("se_opt_ul").get<double>();
  r.se_opt_dl = j.at("se_opt_dl").get<double>();
  r.se_epa_ul = j.value("se_epa_ul", 0.0);
  r.se_epa_dl = j.value("se_epa_dl", 0.0);
  r.se_pred_ul = j.value("se_pred_ul", 0.0);
  r.se_pred_dl = j.value("se_pred_dl", 0.0);
  return r;
}

std::vector<SweepRow> sweep(const TransformerWeights* weights, const std::vector<std::pair<int, int>>& points,
                            int samples_per_point, const NetworkConfig& cfg, std::uint64_t seed,
                            const PipelineOptions& opts, int threads) {
  if (samples_per_point < 1) throw std::invalid_argument("sweep: samples_per_point must be >= 1");
  const auto n = static_cast<std::size_t>(samples_per_point);
  std::vector<SweepRow> rows;
  for (const auto& [K, L] : points) {
    std::vector<SchemeSE> opt(n), pred(n), eq(n);
    parallel_for(
        n,
        [&](std::size_t i) {
          const std::uint64_t key = (static_cast<std::uint64_t>(K) << 32) | static_cast<std::uint64_t>(L);
          const Scenario scenario = sample_scenario(cfg, K, L, derive_seed(seed, stream::kSweep, key * 1000003 + i));
          const LabeledScenario lab = label_scenario(cfg, scenario, opts);
          opt[i] = scheme_se(lab.coeffs, lab.ul.power.p, lab.dl.power.p);
          eq[i] = scheme_se(lab.coeffs, epa(Direction::kUplink, K, L, cfg).p, epa(Direction::kDownlink, K, L, cfg).p);
          if (weights) {
            const Eigen::MatrixXd p = forward(scenario, *weights, cfg);
            pred[i] = scheme_se(lab.coeffs, p.col(0), p.col(1));
          }
        },
        threads);
    SweepRow row;
    row.K = K;
    row.L = L;
    row.samples = samples_per_point;
    for (std::size_t i = 0; i < n; ++i) {
      row.se_opt_ul += mean_of(opt[i].ul) / static_cast<double>(n);
      row.se_opt_dl += mean_of(opt[i].dl) / static_cast<double>(n);
      row.se_epa_ul += mean_of(eq[i].ul) / static_cast<double>(n);
      row.se_epa_dl += mean_of(eq[i].dl) / static_cast<double>(n);
      row.se_pred_ul += mean_of(pred[i].ul) / static_cast<double>(n);
      row.se_pred_dl += mean_of(pred[i].dl) / static_cast<double>(n);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> sweep_k(const TransformerWeights* weights, int L, const std::vector<int>& k_list,
                              int samples_per_k, const NetworkConfig& cfg, std::uint64_t seed,
                              const PipelineOptions& opts, int threads) {
  std::vector<std::pair<int, int>> points;
  for (int K : k_list) points.emplace_back(K, L);
  return sweep(weights, points, samples_per_k, cfg, seed, opts, threads);
}

std::vector<SweepRow> sweep_l(const TransformerWeights* weights, int K, const std::vector<int>& l_list,
                              int samples_per_l, const NetworkConfig& cfg, std::uint64_t seed,
                              const PipelineOptions& opts, int threads) {
  std::vector<std::pair<int, int>> points;
  for (int L : l_list) points.emplace_back(K, L);
  return sweep(weights, points, samples_per_l, cfg, seed, opts, threads);
}

std::uint64_t theoretical_complexity(int K, int L, const ModelConfig& cfg, Phase phase, int batch) {
  if (K < 1 || L < 1 || batch < 1) throw std::invalid_argument("theoretical_complexity: K, L, batch must be >= 1");
  const std::uint64_t k = static_cast<std::uint64_t>(K), l = static_cast<std::uint64_t>(L);
  const std::uint64_t d = static_cast<std::uint64_t>(cfg.d_model), m = static_cast<std::uint64_t>(cfg.layers);
  const std::uint64_t b = static_cast<std::uint64_t>(batch);
  if (phase == Phase::kInfer) return m * (k * d * d + k * k * d) + k * (2 * l + 2) * d;
  return 2 * m * b * k * d * (d + k) + 2 * b * k * (2 * l + 2) * d;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: no values");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json to_json(const BenchReport& r) {
  return {{"K", r.K},
          {"L", r.L},
          {"n_mc", r.n_mc},
          {"inference_ms", r.inference_ms},
          {"solver_ms", r.solver_ms},
          {"inference_median_ms", r.inference_median_ms},
          {"solver_median_ms", r.solver_median_ms},
          {"speedup", r.speedup}};
}

BenchReport bench_runtime(const TransformerWeights& weights, int K, int L, const NetworkConfig& cfg, int reps,
                          std::uint64_t seed, int n_mc) {
  if (reps < 3) throw std::invalid_argument("bench_runtime: reps must be >= 3");
  using clock = std::chrono::steady_clock;
  BenchReport r;
  r.K = K;
  r.L = L;
  r.n_mc = n_mc;
  PipelineOptions opts;
  opts.n_mc = n_mc;
  for (int i = 0; i < reps; ++i) {
    const Scenario scenario = sample_scenario(cfg, K, L, derive_seed(seed, stream::kSweep, static_cast<std::uint64_t>(i)));
    auto t0 = clock::now();
    const Eigen::MatrixXd p = forward(scenario, weights, cfg);
    auto t1 = clock::now();
    const LabeledScenario lab = label_scenario(cfg, scenario, opts);
    auto t2 = clock::now();
    if (p.rows() != K || lab.ul.power.p.size() != K) throw std::logic_error("bench_runtime: unexpected output size");
    r.inference_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    r.solver_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
  }
  r.inference_median_ms = median(r.inference_ms);
  r.solver_median_ms = median(r.solver_ms);
  r.speedup = r.solver_median_ms / r.inference_median_ms;
  return r;
}

}  // namespace cfpower
