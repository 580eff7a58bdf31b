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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfpower/dataset.hpp"
#include "cfpower/evaluation.hpp"
#include "cfpower/model.hpp"
#include "cfpower/nn/grad_check.hpp"
#include "cfpower/nn/ops.hpp"
#include "cfpower/pipeline.hpp"
#include "cfpower/random.hpp"
#include "cfpower/solvers.hpp"
#include "cfpower/trainer.hpp"

using namespace cfpower;
namespace fs = std::filesystem;
using nn::Tensor;
using nn::Var;

namespace {

// Pinned tolerances.
constexpr double kOracleRelTol = 0.01;         // criterion 1
constexpr double kOracleRuntimeS = 60.0;
constexpr double kSinrEqualTol = 1e-5;         // criterion 2
constexpr double kUlCapFraction = 0.999999;
constexpr double kBudgetTol = 1e-9;
constexpr double kPrimitiveGradTol = 1e-5;     // criterion 3
constexpr double kModelGradTol = 1e-4;
constexpr double kSymmetryTol = 1e-9;          // criterion 4
constexpr double kDlSumTol = 1e-6;             // criterion 5
constexpr double kMinRatio = 0.8;              // criterion 6
constexpr double kLearningBudgetS = 30 * 60.0;
constexpr double kTrendAgreement = 0.8;        // criterion 7
constexpr double kMinSpeedup = 10.0;           // criterion 8
constexpr std::uint64_t kComplexityExample = 37760;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

Tensor uniform(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(r, c);
  for (auto& v : t.storage()) v = u(rng);
  return t;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cfpower_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Bisection against the exhaustive grid.
Outcome solver_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const NetworkConfig cfg;
  auto rng = make_rng(101, 0);
  std::uniform_int_distribution<int> pick_k(2, 3), pick_l(4, 16);
  double worst = 0.0;
  int fails = 0;
  for (int i = 0; i < 50; ++i) {
    const int K = pick_k(rng), L = pick_l(rng);
    const auto c = scenario_coefficients(cfg, sample_scenario(cfg, K, L, 1000 + i), 100);
    const auto ul = LinkCoefficients::uplink(c.ul, c.sigma2);
    const auto dl = LinkCoefficients::downlink(c.dl, c.sigma2);
    const auto ul_c = PowerConstraint::per_user(cfg.p_ul_max_mw);
    const auto dl_c = PowerConstraint::sum_budget(cfg.dl_budget_mw(L));
    const std::array<std::pair<double, double>, 2> pairs = {
        std::pair{maxmin(ul, ul_c, Direction::kUplink, c.split.prelog_ul()).min_se,
                  brute_force_maxmin(ul, ul_c, Direction::kUplink, c.split.prelog_ul(), 1000).min_se},
        std::pair{maxmin(dl, dl_c, Direction::kDownlink, c.split.prelog_dl()).min_se,
                  brute_force_maxmin(dl, dl_c, Direction::kDownlink, c.split.prelog_dl(), 1000).min_se}};
    for (const auto& [exact, grid] : pairs) {
      const double rel = std::abs(exact - grid) / exact;
      worst = std::max(worst, rel);
      if (rel > kOracleRelTol) ++fails;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {fails == 0 && secs < kOracleRuntimeS,
          "50 instances, worst relative gap " + fmt(worst) + ", " + std::to_string(fails) + " over 1%, " +
              fmt(secs, 3) + " s"};
}

// 2. Certificates of every converged solution.
Outcome certificates() {
  const NetworkConfig cfg;
  auto rng = make_rng(202, 0);
  std::uniform_int_distribution<int> pick_k(1, 10), pick_l(4, 16);
  PipelineOptions opts;
  opts.n_mc = 40;
  double worst_eq = 0.0, worst_budget = 0.0, lowest_cap = 1.0;
  int converged = 0;
  for (int i = 0; i < 200; ++i) {
    const int K = pick_k(rng), L = pick_l(rng);
    const LabeledScenario lab = label_scenario(cfg, K, L, 2000 + i, opts);
    for (const PowerSolution* s : {&lab.ul, &lab.dl}) {
      if (!s->converged) continue;
      ++converged;
      for (Eigen::Index k = 0; k < s->sinr.size(); ++k)
        worst_eq = std::max(worst_eq, std::abs(s->sinr(k) - s->t_star) / s->t_star);
    }
    if (lab.ul.converged) lowest_cap = std::min(lowest_cap, lab.ul.power.p.maxCoeff() / cfg.p_ul_max_mw);
    if (lab.dl.converged) {
      const double budget = cfg.dl_budget_mw(L);
      worst_budget = std::max(worst_budget, std::abs(lab.dl.power.p.sum() - budget) / budget);
    }
  }
  const bool ok = converged > 0 && worst_eq <= kSinrEqualTol && lowest_cap >= kUlCapFraction &&
                  worst_budget <= kBudgetTol;
  return {ok, std::to_string(converged) + "/400 solutions converged, max SINR spread " + fmt(worst_eq) +
                  ", min UL max-power fraction " + fmt(lowest_cap, 10) + ", max DL budget error " + fmt(worst_budget)};
}

// 3. Finite-difference gradient checks.
Outcome gradients() {
  using Fn = std::function<Var(const std::vector<Var>&)>;
  std::mt19937_64 rng(303);
  auto u = [&](std::size_t r, std::size_t c, double lo = -2.0, double hi = 2.0) { return uniform(r, c, rng, lo, hi); };
  const std::vector<std::pair<std::string, std::pair<Fn, std::vector<Tensor>>>> cases = {
      {"matmul", {[](auto& v) { return nn::matmul(v[0], v[1]); }, {u(3, 4), u(4, 5)}}},
      {"add", {[](auto& v) { return nn::add(v[0], v[1]); }, {u(3, 4), u(1, 4)}}},
      {"sub", {[](auto& v) { return nn::sub(v[0], v[1]); }, {u(3, 4), u(3, 1)}}},
      {"mul", {[](auto& v) { return nn::mul(v[0], v[1]); }, {u(3, 4), u(3, 4)}}},
      {"div", {[](auto& v) { return nn::div(v[0], v[1]); }, {u(3, 4), u(1, 4, 0.5, 2.0)}}},
      {"scale", {[](auto& v) { return nn::scale(v[0], 0.7); }, {u(3, 4)}}},
      {"relu", {[](auto& v) { return nn::relu(v[0]); }, {u(3, 4)}}},
      {"sigmoid", {[](auto& v) { return nn::sigmoid(v[0]); }, {u(3, 4)}}},
      {"softmax_rows", {[](auto& v) { return nn::softmax_rows(v[0]); }, {u(3, 4)}}},
      {"layer_norm", {[](auto& v) { return nn::layer_norm(v[0]); }, {u(3, 6)}}},
      {"dropout",
       {[](auto& v) {
          std::mt19937_64 r(5);
          return nn::dropout(v[0], 0.3, true, r);
        },
        {u(3, 4)}}},
      {"transpose", {[](auto& v) { return nn::transpose(v[0]); }, {u(3, 4)}}},
      {"concat_cols", {[](auto& v) { return nn::concat_cols({v[0], v[1]}); }, {u(3, 4), u(3, 2)}}},
      {"slice_cols", {[](auto& v) { return nn::slice_cols(v[0], 1, 2); }, {u(3, 4)}}},
      {"mean_rows", {[](auto& v) { return nn::mean_rows(v[0]); }, {u(3, 4)}}},
      {"mean", {[](auto& v) { return nn::mean(v[0]); }, {u(3, 4)}}},
      {"sum", {[](auto& v) { return nn::sum(v[0]); }, {u(3, 4)}}},
  };
  double worst = 0.0;
  std::string failed;
  for (const auto& [name, c] : cases) {
    const auto r = nn::grad_check(c.first, c.second, kPrimitiveGradTol);
    worst = std::max(worst, r.max_rel_error);
    if (!r.passed) failed += " " + name;
  }

  const NetworkConfig cfg;
  ModelConfig mc;
  mc.d_model = 8;
  mc.heads = 2;
  mc.layers = 2;
  mc.d_ffn = 32;
  mc.dropout = 0.0;
  TransformerWeights base = TransformerWeights::init(mc, 3);
  base.dl_b.mutable_value()[0] = 2.0;  // keeps the DL ReLU away from its kink
  const Eigen::MatrixXd z = build_features(sample_scenario(cfg, 3, 2, 4), cfg.area_side);
  const Tensor target = uniform(3, 2, rng, 0.0, 1.0);
  auto slots = [](TransformerWeights& w) {
    std::vector<Var*> out = {&w.ue_w, &w.ue_b, &w.ap_w, &w.ap_b};
    for (auto& l : w.layers)
      for (Var* v : {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo, &l.w1, &l.b1, &l.w2, &l.b2,
                     &l.ln1_gamma, &l.ln1_beta, &l.ln2_gamma, &l.ln2_beta})
        out.push_back(v);
    for (Var* v : {&w.ul_w, &w.ul_b, &w.dl_w, &w.dl_b}) out.push_back(v);
    return out;
  };
  std::vector<Tensor> inputs;
  for (Var* v : slots(base)) inputs.push_back(v->value());
  const auto model = nn::grad_check(
      [&](const std::vector<Var>& vars) {
        TransformerWeights w = base;
        auto s = slots(w);
        for (std::size_t i = 0; i < s.size(); ++i) *s[i] = vars[i];
        const HeadOutput out = forward_graph(z, 2, w, cfg, false, 0);
        return mse_loss(nn::concat_cols({out.ul_frac, out.dl_frac}), Var(target));
      },
      inputs, kModelGradTol);
  return {failed.empty() && model.passed,
          std::to_string(cases.size()) + " primitives, worst " + fmt(worst) + (failed.empty() ? "" : ", failed:" + failed) +
              "; full model (" + std::to_string(model.checked) + " parameters) " + fmt(model.max_rel_error)};
}

// 4. One weight file across every (K, L).
Outcome flexibility() {
  const NetworkConfig cfg;
  const fs::path dir = fresh_dir("flex");
  save_weights(TransformerWeights::init(ModelConfig{}, 404), (dir / "w.json").string());
  const TransformerWeights w = load_weights((dir / "w.json").string());
  int invalid = 0;
  for (int K = 1; K <= 100; ++K)
    for (int L = 1; L <= 49; ++L) {
      const Eigen::MatrixXd p = forward(sample_scenario(cfg, K, L, 100 * K + L), w, cfg);
      const double budget = cfg.dl_budget_mw(L);
      const bool ok = p.rows() == K && p.cols() == 2 && p.allFinite() && p.col(0).minCoeff() >= 0.0 &&
                      p.col(0).maxCoeff() <= cfg.p_ul_max_mw &&
                      std::abs(p.col(1).sum() - budget) <= kDlSumTol * budget;
      if (!ok) ++invalid;
    }

  // Parameter shapes depend only on the model configuration.
  const std::size_t d = 32, f = 128;
  const std::size_t expected = 2 * (3 * d) + 2 * (4 * (d * d + d) + d * f + f + f * d + d + 4 * d) + 2 * (d + 1);

  double equi = 0.0, inv = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Scenario sc = sample_scenario(cfg, 2 + static_cast<int>(s) * 3, 3 + static_cast<int>(s) * 2, 4040 + s);
    const Eigen::MatrixXd p = forward(sc, w, cfg);
    Scenario perm = sc;
    auto rng = make_rng(s, 1);
    std::vector<int> idx(sc.K);
    for (int k = 0; k < sc.K; ++k) idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int k = 0; k < sc.K; ++k) perm.ue[k] = sc.ue[idx[k]];
    const Eigen::MatrixXd pp = forward(perm, w, cfg);
    for (int k = 0; k < sc.K; ++k) equi = std::max(equi, (pp.row(k) - p.row(idx[k])).cwiseAbs().maxCoeff());
    Scenario ap_perm = sc;
    std::shuffle(ap_perm.ap.begin(), ap_perm.ap.end(), rng);
    inv = std::max(inv, (forward(ap_perm, w, cfg) - p).cwiseAbs().maxCoeff());
  }
  const bool ok = invalid == 0 && w.parameter_count() == expected && equi <= kSymmetryTol && inv <= kSymmetryTol;
  return {ok, "4900 (K, L) pairs, " + std::to_string(invalid) + " invalid; " + std::to_string(w.parameter_count()) +
                  " parameters; equivariance error " + fmt(equi) + ", AP invariance error " + fmt(inv)};
}

// 5. Constraints hold for any weights and inputs.
Outcome constraints() {
  const NetworkConfig cfg;
  auto rng = make_rng(505, 0);
  std::uniform_int_distribution<int> pick_k(1, 30), pick_l(1, 30);
  TransformerWeights w;
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    if (i % 100 == 0) {
      w = TransformerWeights::init(ModelConfig{}, 5000 + i);
      // Scale the heads so saturated outputs are exercised too.
      const double gain = 1.0 + (i / 100) % 10;
      for (Var* v : {&w.ul_w, &w.dl_w})
        for (auto& x : v->mutable_value().storage()) x *= gain;
    }
    const int K = pick_k(rng), L = pick_l(rng);
    const Eigen::MatrixXd p = forward(sample_scenario(cfg, K, L, 50000 + i), w, cfg, i % 2 == 1, i);
    const double budget = cfg.dl_budget_mw(L);
    const double err = std::abs(p.col(1).sum() - budget) / budget;
    worst = std::max(worst, err);
    if (!p.allFinite() || p.col(0).minCoeff() < 0.0 || p.col(0).maxCoeff() > cfg.p_ul_max_mw || err > kDlSumTol)
      ++violations;
  }
  return {violations == 0,
          "10000 passes, " + std::to_string(violations) + " violations, max DL sum error " + fmt(worst)};
}

// 6. Learning quality at desk scale.
Outcome learning() {
  const double cpu0 = cpu_seconds();
  NetworkConfig cfg;
  cfg.antennas = 2;
  PipelineOptions opts;
  opts.n_mc = 300;
  const std::vector<int> ks = {2, 4, 6}, ls = {9, 16};
  const fs::path dir = fresh_dir("learning");
  const DatasetManifest m = generate_dataset(cfg, ks, ls, 200, 1, dir, opts);
  const std::vector<Sample> train_set = load_samples(m, dir);

  std::vector<Sample> held_out;
  for (int i = 0; i < 50; ++i) {
    const int K = ks[i % 3], L = ls[(i / 3) % 2];
    held_out.push_back(make_sample(cfg, K, L, derive_seed(606, stream::kSampleSeed, i), opts));
  }

  const auto [w, report] = train(train_set, ModelConfig{}, TrainConfig{}, cfg);
  EvalOptions eo;
  eo.n_mc = 300;
  const auto records = evaluate(&w, held_out, cfg, eo);
  std::vector<double> ru, rd, pu, pd, eu, ed;
  for (const auto& r : records) {
    ru.push_back(r.ratio_ul);
    rd.push_back(r.ratio_dl);
    pu.push_back(r.predicted.min_ul());
    pd.push_back(r.predicted.min_dl());
    eu.push_back(r.epa.min_ul());
    ed.push_back(r.epa.min_dl());
  }
  const double cpu = cpu_seconds() - cpu0;
  const double mru = median(ru), mrd = median(rd);
  const double mpu = median(pu), mpd = median(pd), meu = median(eu), med = median(ed);
  const bool ok = mru >= kMinRatio && mrd >= kMinRatio && mpu > meu && mpd > med && cpu <= kLearningBudgetS;
  return {ok, std::to_string(train_set.size()) + " training / " + std::to_string(records.size()) +
                  " held-out samples; median ratio UL " + fmt(mru) + " DL " + fmt(mrd) + "; median min-SE UL " +
                  fmt(mpu) + " vs EPA " + fmt(meu) + ", DL " + fmt(mpd) + " vs EPA " + fmt(med) + "; " +
                  fmt(cpu / 60.0, 3) + " CPU-min"};
}

// 7. SE trends in K and L.
Outcome trends() {
  const NetworkConfig cfg;
  PipelineOptions opts;
  opts.n_mc = 100;
  const std::vector<int> k_list = {2, 5, 10, 20, 40}, l_list = {4, 9, 16, 25, 36};
  int k_agree = 0, k_total = 0, l_agree = 0, l_total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto kr = sweep_k(nullptr, 16, k_list, 2, cfg, seed, opts);
    const auto lr = sweep_l(nullptr, 10, l_list, 2, cfg, 1000 + seed, opts);
    for (std::size_t i = 1; i < kr.size(); ++i) {
      k_agree += (kr[i].se_opt_ul < kr[i - 1].se_opt_ul) + (kr[i].se_opt_dl < kr[i - 1].se_opt_dl);
      k_total += 2;
    }
    for (std::size_t i = 1; i < lr.size(); ++i) {
      l_agree += (lr[i].se_opt_ul > lr[i - 1].se_opt_ul) + (lr[i].se_opt_dl > lr[i - 1].se_opt_dl);
      l_total += 2;
    }
  }
  const double fk = static_cast<double>(k_agree) / k_total, fl = static_cast<double>(l_agree) / l_total;
  return {fk >= kTrendAgreement && fl >= kTrendAgreement,
          "decreasing in K: " + std::to_string(k_agree) + "/" + std::to_string(k_total) + ", increasing in L: " +
              std::to_string(l_agree) + "/" + std::to_string(l_total) + " adjacent comparisons (UL and DL)"};
}

// 8. Inference against the label pipeline.
Outcome runtime() {
  const auto w = TransformerWeights::init(ModelConfig{}, 808);
  const BenchReport r = bench_runtime(w, 40, 16, NetworkConfig{}, 5, 8, 300);
  const std::uint64_t ops = theoretical_complexity(10, 16, ModelConfig{}, Phase::kInfer);
  return {r.speedup >= kMinSpeedup && ops == kComplexityExample,
          "median inference " + fmt(r.inference_median_ms) + " ms, pipeline " + fmt(r.solver_median_ms) +
              " ms, speedup " + fmt(r.speedup) + "x; operations at K=10, L=16: " + std::to_string(ops)};
}

// 9. Byte-identical artifacts through the command-line tool.
int run(const std::string& args) {
  const std::string cmd = std::string(CFPOWER_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome determinism() {
  std::vector<fs::path> dirs = {fresh_dir("det_a"), fresh_dir("det_b")};
  for (const auto& d : dirs) {
    const std::string data = (d / "data").string(), weights = (d / "weights.json").string();
    if (run("gen-dataset --k 2,3 --l 4,6 --n 6 --n-mc 40 --seed 9 --out " + data) != 0 ||
        run("train --data " + data + " --epochs 3 --batch 4 --seed 9 --out " + weights) != 0 ||
        run("eval --weights " + weights + " --data " + data + " --n-mc 40 --out " + (d / "records.json").string()) != 0 ||
        run("plot --eval " + (d / "records.json").string() + " --out " + (d / "plots").string()) != 0)
      return {false, "command failed in " + d.string()};
  }
  int files = 0, differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path other = dirs[1] / fs::relative(e.path(), dirs[0]);
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differing;
  }
  return {files > 0 && differing == 0,
          std::to_string(files) + " artifacts (dataset, weights, training report, records, plots), " +
              std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"solver matches brute-force grid", solver_oracle},
      {"optimality certificates", certificates},
      {"gradient fidelity", gradients},
      {"structural flexibility", flexibility},
      {"constraints by construction", constraints},
      {"learning quality", learning},
      {"trend reproduction", trends},
      {"runtime and complexity", runtime},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << " ("
              << fmt(secs, 3) << " s)" << std::endl;
    failed += !o.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
