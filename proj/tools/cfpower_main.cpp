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

// Command-line front end: dataset generation, training, inference, solving,
// evaluation, sweeps, benchmarking and plot export.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfpower/dataset.hpp"
#include "cfpower/evaluation.hpp"
#include "cfpower/model.hpp"
#include "cfpower/pipeline.hpp"
#include "cfpower/plots.hpp"
#include "cfpower/solvers.hpp"
#include "cfpower/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cfpower;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

Scenario scenario_from_json(const json& j, const NetworkConfig& cfg) {
  Scenario s;
  for (const auto& p : j.at("ue_xy")) s.ue.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  for (const auto& p : j.at("ap_xy")) s.ap.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  s.K = static_cast<int>(s.ue.size());
  s.L = static_cast<int>(s.ap.size());
  s.seed = j.value("seed", std::uint64_t{0});
  if (s.K < 1 || s.L < 1) throw std::invalid_argument("scenario needs at least one UE and one AP");
  for (const auto& p : s.ue)
    if (p.x < 0 || p.y < 0 || p.x > cfg.area_side || p.y > cfg.area_side)
      throw std::invalid_argument("UE coordinate outside the coverage area");
  for (const auto& p : s.ap)
    if (p.x < 0 || p.y < 0 || p.x > cfg.area_side || p.y > cfg.area_side)
      throw std::invalid_argument("AP coordinate outside the coverage area");
  return s;
}

json summarize(const std::vector<EvalRecord>& records) {
  std::vector<double> ru, rd, pu, pd, ou, od, eu, ed, fu, fd;
  for (const auto& r : records) {
    ou.push_back(r.optimal.min_ul());
    od.push_back(r.optimal.min_dl());
    eu.push_back(r.epa.min_ul());
    ed.push_back(r.epa.min_dl());
    fu.push_back(r.fpa.min_ul());
    fd.push_back(r.fpa.min_dl());
    if (r.predicted.ul.size()) {
      ru.push_back(r.ratio_ul);
      rd.push_back(r.ratio_dl);
      pu.push_back(r.predicted.min_ul());
      pd.push_back(r.predicted.min_dl());
    }
  }
  json j = {{"samples", records.size()},
            {"median_min_se_optimal", {{"ul", median(ou)}, {"dl", median(od)}}},
            {"median_min_se_epa", {{"ul", median(eu)}, {"dl", median(ed)}}},
            {"median_min_se_fpa", {{"ul", median(fu)}, {"dl", median(fd)}}}};
  if (!ru.empty()) {
    j["median_min_se_predicted"] = {{"ul", median(pu)}, {"dl", median(pd)}};
    j["median_ratio"] = {{"ul", median(ru)}, {"dl", median(rd)}};
  }
  return j;
}

fs::path manifest_in(const fs::path& dir, const std::string& preferred) {
  if (fs::exists(dir / preferred)) return dir / preferred;
  if (fs::exists(dir / "manifest.json")) return dir / "manifest.json";
  throw std::runtime_error("no " + preferred + " or manifest.json in " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO max-min power control toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out;
  app.add_option("--config", config_path, "NetworkConfig JSON file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output file or directory");

  ModelConfig model_cfg;
  auto add_model_flags = [&](CLI::App* sub) {
    sub->add_option("--d-model", model_cfg.d_model, "Model width");
    sub->add_option("--layers", model_cfg.layers, "Encoder layers");
    sub->add_option("--heads", model_cfg.heads, "Attention heads");
    sub->add_option("--d-ffn", model_cfg.d_ffn, "FFN width");
    sub->add_option("--dropout", model_cfg.dropout, "Dropout rate");
  };

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "Generate a labeled dataset with train/test manifests");
  std::vector<int> k_values{2, 4, 6, 8, 10}, l_values{9, 16};
  int n_per_config = 800, n_mc = 500, refine = 0;
  double split_ratio = 0.8;
  gen->add_option("--k", k_values, "UE counts")->delimiter(',');
  gen->add_option("--l", l_values, "AP counts")->delimiter(',');
  gen->add_option("--n", n_per_config, "Samples per (K, L)");
  gen->add_option("--n-mc", n_mc, "Monte-Carlo realizations");
  gen->add_option("--refine", refine, "Filter refinement rounds");
  gen->add_option("--split", split_ratio, "Training fraction");

  // train
  auto* trn = app.add_subcommand("train", "Train the transformer on a dataset directory");
  std::string data_dir;
  TrainConfig train_cfg;
  trn->add_option("--data", data_dir, "Dataset directory")->required();
  trn->add_option("--epochs", train_cfg.epochs_per_config, "Epochs per (K, L)");
  trn->add_option("--batch", train_cfg.batch_size, "Batch size");
  trn->add_option("--lr", train_cfg.lr, "Learning rate");
  trn->add_option("--finetune", train_cfg.finetune_epochs, "Interleaved fine-tune epochs");
  add_model_flags(trn);

  // infer
  auto* inf = app.add_subcommand("infer", "Predict powers for one scenario");
  std::string weights_path, scenario_path;
  inf->add_option("--weights", weights_path, "Weight file")->required()->check(CLI::ExistingFile);
  inf->add_option("--scenario", scenario_path, "Scenario JSON {ue_xy, ap_xy}")->required()->check(CLI::ExistingFile);

  // solve
  auto* slv = app.add_subcommand("solve", "Run the exact max-min pipeline on a random scenario");
  int K = 10, L = 16;
  double nu = -0.5;
  slv->add_option("--k", K, "UE count");
  slv->add_option("--l", L, "AP count");
  slv->add_option("--refine", refine, "Filter refinement rounds");
  slv->add_option("--nu", nu, "FPA exponent");
  slv->add_option("--n-mc", n_mc, "Monte-Carlo realizations");

  // eval
  auto* evl = app.add_subcommand("eval", "Score a model on the test split");
  int eval_mc = 300;
  evl->add_option("--weights", weights_path, "Weight file")->check(CLI::ExistingFile);
  evl->add_option("--data", data_dir, "Dataset directory")->required();
  evl->add_option("--n-mc", eval_mc, "Monte-Carlo realizations");
  evl->add_option("--nu", nu, "FPA exponent");

  // sweeps
  std::vector<int> sweep_list;
  int samples_per_point = 20;
  auto* swk = app.add_subcommand("sweep-k", "Mean per-UE SE against K at fixed L");
  swk->add_option("--weights", weights_path, "Weight file")->check(CLI::ExistingFile);
  swk->add_option("--l", L, "AP count");
  swk->add_option("--k-list", sweep_list, "UE counts")->delimiter(',');
  swk->add_option("--samples", samples_per_point, "Scenarios per point");
  swk->add_option("--n-mc", eval_mc, "Monte-Carlo realizations");
  auto* swl = app.add_subcommand("sweep-l", "Mean per-UE SE against L at fixed K");
  swl->add_option("--weights", weights_path, "Weight file")->check(CLI::ExistingFile);
  swl->add_option("--k", K, "UE count");
  swl->add_option("--l-list", sweep_list, "AP counts")->delimiter(',');
  swl->add_option("--samples", samples_per_point, "Scenarios per point");
  swl->add_option("--n-mc", eval_mc, "Monte-Carlo realizations");

  // bench
  auto* bch = app.add_subcommand("bench", "Model inference against the label pipeline");
  int reps = 5;
  bch->add_option("--weights", weights_path, "Weight file")->required()->check(CLI::ExistingFile);
  bch->add_option("--k", K, "UE count");
  bch->add_option("--l", L, "AP count");
  bch->add_option("--reps", reps, "Repetitions");
  bch->add_option("--n-mc", eval_mc, "Monte-Carlo realizations");

  // complexity
  auto* cpx = app.add_subcommand("complexity", "Theoretical operation counts");
  std::string phase = "infer";
  int batch = 1;
  cpx->add_option("--k", K, "UE count");
  cpx->add_option("--l", L, "AP count");
  cpx->add_option("--phase", phase, "infer or train")->check(CLI::IsMember({"infer", "train"}));
  cpx->add_option("--batch", batch, "Batch size (train)");
  add_model_flags(cpx);

  // plot
  auto* plt = app.add_subcommand("plot", "Export CSV/SVG figure data");
  std::string eval_json, sweep_k_json, sweep_l_json, format = "csv";
  plt->add_option("--eval", eval_json, "Records written by eval")->check(CLI::ExistingFile);
  plt->add_option("--sweep-k", sweep_k_json, "Rows written by sweep-k")->check(CLI::ExistingFile);
  plt->add_option("--sweep-l", sweep_l_json, "Rows written by sweep-l")->check(CLI::ExistingFile);
  plt->add_option("--format", format, "csv or svg (svg also writes csv)")->check(CLI::IsMember({"csv", "svg"}));

  CLI11_PARSE(app, argc, argv);

  try {
    NetworkConfig cfg = config_path.empty() ? NetworkConfig{} : load_network_config(config_path);
    cfg.validate();

    if (gen->parsed()) {
      const fs::path dir = out.empty() ? fs::path("data") : fs::path(out);
      PipelineOptions opts;
      opts.n_mc = n_mc;
      opts.refine = refine;
      const DatasetManifest m = generate_dataset(cfg, k_values, l_values, n_per_config, seed, dir, opts);
      auto [train_m, test_m] = split_dataset(m, split_ratio, seed);
      save_manifest(train_m, dir / "train_manifest.json");
      save_manifest(test_m, dir / "test_manifest.json");
      std::cout << json{{"samples", m.selected_count()},
                        {"train", train_m.selected_count()},
                        {"test", test_m.selected_count()},
                        {"resampled", m.resampled},
                        {"dir", dir.string()}}
                       .dump()
                << '\n';
    } else if (trn->parsed()) {
      const DatasetManifest m = load_manifest(manifest_in(data_dir, "train_manifest.json"));
      const NetworkConfig data_cfg = m.config;
      train_cfg.seed = seed;
      auto [w, report] = train(load_samples(m, data_dir), model_cfg, train_cfg, data_cfg);
      const fs::path wpath = out.empty() ? fs::path("weights.json") : fs::path(out);
      if (wpath.has_parent_path()) fs::create_directories(wpath.parent_path());
      save_weights(w, wpath.string());
      fs::path rpath = wpath;
      rpath.replace_extension(".report.json");
      write_json(to_json(report), rpath.string());
      std::cout << json{{"weights", wpath.string()},
                        {"report", rpath.string()},
                        {"steps", report.steps},
                        {"wall_seconds", report.wall_seconds}}
                       .dump()
                << '\n';
    } else if (inf->parsed()) {
      const TransformerWeights w = load_weights(weights_path);
      const Scenario s = scenario_from_json(read_json(scenario_path), cfg);
      const Eigen::MatrixXd p = forward(s, w, cfg);
      json rows = json::array();
      for (Eigen::Index k = 0; k < p.rows(); ++k) rows.push_back({p(k, 0), p(k, 1)});
      write_json(rows, out);
    } else if (slv->parsed()) {
      PipelineOptions opts;
      opts.n_mc = n_mc;
      opts.refine = refine;
      const LabeledScenario lab = label_scenario(cfg, K, L, seed, opts);
      json j = {{"K", K}, {"L", L}, {"seed", seed}, {"ul", to_json(lab.ul)}, {"dl", to_json(lab.dl)}};
      const auto& c = lab.coeffs;
      const SchemeSE eq = scheme_se(c, epa(Direction::kUplink, K, L, cfg).p, epa(Direction::kDownlink, K, L, cfg).p);
      const SchemeSE fr = scheme_se(c, fpa(c.large_scale.beta, nu, Direction::kUplink, cfg).p,
                                    fpa(c.large_scale.beta, nu, Direction::kDownlink, cfg).p);
      j["epa_min_se"] = {{"ul", eq.min_ul()}, {"dl", eq.min_dl()}};
      j["fpa_min_se"] = {{"ul", fr.min_ul()}, {"dl", fr.min_dl()}};
      write_json(j, out);
    } else if (evl->parsed()) {
      const DatasetManifest m = load_manifest(manifest_in(data_dir, "test_manifest.json"));
      std::optional<TransformerWeights> w;
      if (!weights_path.empty()) w = load_weights(weights_path);
      EvalOptions opts;
      opts.n_mc = eval_mc;
      opts.fpa_nu = nu;
      const auto records = evaluate(w ? &*w : nullptr, load_samples(m, data_dir), m.config, opts);
      json arr = json::array();
      for (const auto& r : records) arr.push_back(to_json(r));
      if (!out.empty()) write_json({{"records", arr}}, out);
      std::cout << summarize(records).dump(2) << '\n';
    } else if (swk->parsed() || swl->parsed()) {
      std::optional<TransformerWeights> w;
      if (!weights_path.empty()) w = load_weights(weights_path);
      PipelineOptions opts;
      opts.n_mc = eval_mc;
      const bool over_k = swk->parsed();
      if (sweep_list.empty()) sweep_list = over_k ? std::vector<int>{2, 5, 10, 20, 40} : std::vector<int>{4, 9, 16, 25, 36};
      const auto rows = over_k ? sweep_k(w ? &*w : nullptr, L, sweep_list, samples_per_point, cfg, seed, opts)
                               : sweep_l(w ? &*w : nullptr, K, sweep_list, samples_per_point, cfg, seed, opts);
      json arr = json::array();
      for (const auto& r : rows) arr.push_back(to_json(r));
      write_json({{"rows", arr}}, out);
    } else if (bch->parsed()) {
      const TransformerWeights w = load_weights(weights_path);
      write_json(to_json(bench_runtime(w, K, L, cfg, reps, seed, eval_mc)), out);
    } else if (cpx->parsed()) {
      model_cfg.validate();
      const Phase ph = phase == "train" ? Phase::kTrain : Phase::kInfer;
      write_json({{"K", K},
                  {"L", L},
                  {"phase", phase},
                  {"batch", batch},
                  {"layers", model_cfg.layers},
                  {"d_model", model_cfg.d_model},
                  {"operations", theoretical_complexity(K, L, model_cfg, ph, batch)}},
                 out);
    } else if (plt->parsed()) {
      const fs::path dir = out.empty() ? fs::path("plots") : fs::path(out);
      const bool svg = format == "svg";
      std::vector<fs::path> written;
      auto append = [&](std::vector<fs::path> files) { written.insert(written.end(), files.begin(), files.end()); };
      if (!eval_json.empty()) {
        std::vector<EvalRecord> records;
        const json doc = read_json(eval_json);
        for (const auto& r : doc.at("records")) records.push_back(eval_record_from_json(r));
        append(export_cdf_plots(records, dir, svg));
      }
      for (const auto& [path, stem] : {std::pair{sweep_k_json, "sweep_k"}, std::pair{sweep_l_json, "sweep_l"}}) {
        if (path.empty()) continue;
        std::vector<SweepRow> rows;
        const json doc = read_json(path);
        for (const auto& r : doc.at("rows")) rows.push_back(sweep_row_from_json(r));
        append(export_sweep_plot(rows, stem, dir, svg));
      }
      if (written.empty()) throw std::invalid_argument("plot: pass at least one of --eval, --sweep-k, --sweep-l");
      json files = json::array();
      for (const auto& f : written) files.push_back(f.string());
      std::cout << files.dump() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
