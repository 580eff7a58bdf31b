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

#include "cfpower/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cfpower/parallel.hpp"
#include "cfpower/random.hpp"

namespace cfpower {

namespace {

nlohmann::json points_to_json(const std::vector<Point>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> points_from_json(const nlohmann::json& j) {
  std::vector<Point> pts;
  pts.reserve(j.size());
  for (const auto& e : j) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return pts;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string shard_name(int K, int L) {
  return "shard_K" + std::to_string(K) + "_L" + std::to_string(L) + ".ndjson";
}

}  // namespace

Scenario Sample::scenario() const { return Scenario{K, L, ue, ap, seed}; }

nlohmann::json sample_to_json(const Sample& s) {
  nlohmann::json z = nlohmann::json::array();
  for (Eigen::Index r = 0; r < s.z.rows(); ++r) {
    const Eigen::VectorXd row = s.z.row(r).transpose();
    z.push_back(vector_to_json(row));
  }
  return {{"K", s.K},
          {"L", s.L},
          {"seed", s.seed},
          {"ue_xy", points_to_json(s.ue)},
          {"ap_xy", points_to_json(s.ap)},
          {"z", std::move(z)},
          {"p_star_ul", vector_to_json(s.p_star_ul)},
          {"p_star_dl", vector_to_json(s.p_star_dl)},
          {"min_se_ul", s.min_se_ul},
          {"min_se_dl", s.min_se_dl}};
}

Sample sample_from_json(const nlohmann::json& j) {
  Sample s;
  s.K = j.at("K").get<int>();
  s.L = j.at("L").get<int>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.ue = points_from_json(j.at("ue_xy"));
  s.ap = points_from_json(j.at("ap_xy"));
  s.p_star_ul = vector_from_json(j.at("p_star_ul"));
  s.p_star_dl = vector_from_json(j.at("p_star_dl"));
  s.min_se_ul = j.at("min_se_ul").get<double>();
  s.min_se_dl = j.at("min_se_dl").get<double>();
  const auto& z = j.at("z");
  s.z.resize(static_cast<Eigen::Index>(z.size()), 2 * s.L + 2);
  for (std::size_t r = 0; r < z.size(); ++r) s.z.row(static_cast<Eigen::Index>(r)) = vector_from_json(z[r]).transpose();
  if (static_cast<int>(s.ue.size()) != s.K || static_cast<int>(s.ap.size()) != s.L ||
      s.p_star_ul.size() != s.K || s.p_star_dl.size() != s.K || s.z.rows() != s.K)
    throw std::runtime_error("sample: field sizes disagree with K / L");
  return s;
}

Eigen::MatrixXd build_features(const Scenario& scenario, double area_side) {
  const int K = scenario.K;
  const int L = scenario.L;
  Eigen::MatrixXd z(K, 2 * L + 2);
  for (int k = 0; k < K; ++k) {
    z(k, 0) = scenario.ue[k].x / area_side;
    z(k, 1) = scenario.ue[k].y / area_side;
    for (int l = 0; l < L; ++l) {
      z(k, 2 + 2 * l) = scenario.ap[l].x / area_side;
      z(k, 3 + 2 * l) = scenario.ap[l].y / area_side;
    }
  }
  return z;
}

std::size_t DatasetManifest::selected_count() const {
  std::size_t n = 0;
  for (const auto& s : shards) n += s.indices.empty() ? static_cast<std::size_t>(s.count) : s.indices.size();
  return n;
}

std::string config_hash(const NetworkConfig& cfg) {
  const std::string text = nlohmann::json(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json shards = nlohmann::json::array();
  for (const auto& s : m.shards) {
    nlohmann::json e = {{"K", s.K}, {"L", s.L}, {"file", s.file}, {"count", s.count}};
    if (!s.indices.empty()) e["indices"] = s.indices;
    shards.push_back(std::move(e));
  }
  return {{"format_version", m.format_version},
          {"role", m.role},
          {"config_hash", m.config_hash},
          {"config", m.config},
          {"k_values", m.k_values},
          {"l_values", m.l_values},
          {"samples_per_config", m.samples_per_config},
          {"split_ratio", m.split_ratio},
          {"seed", m.seed},
          {"split_seed", m.split_seed},
          {"n_mc", m.n_mc},
          {"solver", {{"bisect_tol", m.solver.bisect_tol},
                      {"fp_tol", m.solver.fp_tol},
                      {"max_iter", m.solver.max_iter}}},
          {"refine", m.refine},
          {"resampled", m.resampled},
          {"normalization", {{"x_min", 0.0}, {"x_max", m.config.area_side},
                             {"y_min", 0.0}, {"y_max", m.config.area_side}}},
          {"shards", std::move(shards)}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kDatasetFormatVersion)
    throw std::runtime_error("dataset manifest: unsupported format_version " +
                             std::to_string(m.format_version));
  m.role = j.value("role", "full");
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config = j.at("config").get<NetworkConfig>();
  m.k_values = j.at("k_values").get<std::vector<int>>();
  m.l_values = j.at("l_values").get<std::vector<int>>();
  m.samples_per_config = j.at("samples_per_config").get<int>();
  m.split_ratio = j.at("split_ratio").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.split_seed = j.value("split_seed", std::uint64_t{0});
  m.n_mc = j.at("n_mc").get<int>();
  const auto& s = j.at("solver");
  m.solver.bisect_tol = s.at("bisect_tol").get<double>();
  m.solver.fp_tol = s.at("fp_tol").get<double>();
  m.solver.max_iter = s.at("max_iter").get<int>();
  m.refine = j.value("refine", 0);
  m.resampled = j.value("resampled", 0);
  for (const auto& e : j.at("shards")) {
    ShardInfo info;
    info.K = e.at("K").get<int>();
    info.L = e.at("L").get<int>();
    info.file = e.at("file").get<std::string>();
    info.count = e.at("count").get<int>();
    if (e.contains("indices")) info.indices = e.at("indices").get<std::vector<int>>();
    m.shards.push_back(std::move(info));
  }
  if (!(m.split_ratio > 0.0 && m.split_ratio < 1.0))
    throw std::runtime_error("dataset manifest: split_ratio must lie in (0, 1)");
  return m;
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
  return manifest_from_json(nlohmann::json::parse(in));
}

Sample make_sample(const NetworkConfig& cfg, int K, int L, std::uint64_t seed,
                   const PipelineOptions& opts, int* resampled) {
  constexpr int kMaxAttempts = 10;
  std::string last_error;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, stream::kResample, attempt);
    try {
      const Scenario scenario = sample_scenario(cfg, K, L, s);
      const LabeledScenario labeled = label_scenario(cfg, scenario, opts);
      if (!labeled.ul.converged || !labeled.dl.converged)
        throw std::runtime_error("solver did not converge (" + labeled.ul.active_constraint +
                                 ", " + labeled.dl.active_constraint + ")");
      Sample out;
      out.K = K;
      out.L = L;
      out.ue = scenario.ue;
      out.ap = scenario.ap;
      out.z = build_features(scenario, cfg.area_side);
      out.p_star_ul = labeled.ul.power.p;
      out.p_star_dl = labeled.dl.power.p;
      out.min_se_ul = labeled.ul.min_se;
      out.min_se_dl = labeled.dl.min_se;
      out.seed = s;
      if (resampled) *resampled = attempt;
      return out;
    } catch (const std::exception& e) {
      last_error = e.what();
      std::cerr << "[dataset] K=" << K << " L=" << L << " seed=" << s
                << " failed: " << last_error << "; resampling\n";
    }
  }
  throw std::runtime_error("sample generation failed after retries: " + last_error);
}

DatasetManifest generate_dataset(const NetworkConfig& cfg, const std::vector<int>& k_values,
                                 const std::vector<int>& l_values, int n_per_config,
                                 std::uint64_t seed, const std::filesystem::path& out_dir,
                                 const PipelineOptions& opts) {
  if (n_per_config < 1) throw std::invalid_argument("generate_dataset: n_per_config must be >= 1");
  if (k_values.empty() || l_values.empty())
    throw std::invalid_argument("generate_dataset: empty (K, L) grid");
  cfg.validate();
  std::filesystem::create_directories(out_dir);

  DatasetManifest m;
  m.config = cfg;
  m.config_hash = config_hash(cfg);
  m.k_values = k_values;
  m.l_values = l_values;
  m.samples_per_config = n_per_config;
  m.seed = seed;
  m.n_mc = opts.n_mc;
  m.solver = opts.solver;
  m.refine = opts.refine;

  for (int K : k_values) {
    for (int L : l_values) {
      std::vector<Sample> samples(n_per_config);
      std::vector<int> retries(n_per_config, 0);
      const std::uint64_t config_index = (static_cast<std::uint64_t>(K) << 32) | static_cast<std::uint32_t>(L);
      parallel_for(static_cast<std::size_t>(n_per_config), [&](std::size_t i) {
        const std::uint64_t s = derive_seed(seed, stream::kSampleSeed, config_index * 1000003ull + i);
        samples[i] = make_sample(cfg, K, L, s, opts, &retries[i]);
      });
      m.resampled += std::accumulate(retries.begin(), retries.end(), 0);

      ShardInfo shard{K, L, shard_name(K, L), n_per_config, {}};
      std::ofstream out(out_dir / shard.file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write shard " + shard.file);
      for (const auto& s : samples) out << sample_to_json(s).dump() << '\n';
      m.shards.push_back(std::move(shard));
    }
  }
  save_manifest(m, out_dir / "manifest.json");
  return m;
}

std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must lie in (0, 1)");
  DatasetManifest train = manifest;
  DatasetManifest test = manifest;
  train.role = "train";
  test.role = "test";
  train.split_ratio = test.split_ratio = ratio;
  train.split_seed = test.split_seed = seed;
  for (std::size_t s = 0; s < manifest.shards.size(); ++s) {
    const ShardInfo& shard = manifest.shards[s];
    std::vector<int> idx = shard.indices;
    if (idx.empty()) {
      idx.resize(shard.count);
      std::iota(idx.begin(), idx.end(), 0);
    }
    auto rng = make_rng(seed, stream::kSplit, s);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(idx.size())));
    if (n_train == 0 || n_train == idx.size())
      throw std::invalid_argument("split leaves an empty stratum for K=" + std::to_string(shard.K) +
                                  " L=" + std::to_string(shard.L));
    std::vector<int> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<int> b(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    train.shards[s].indices = std::move(a);
    test.shards[s].indices = std::move(b);
  }
  return {train, test};
}

std::vector<Sample> load_samples(const DatasetManifest& manifest,
                                 const std::filesystem::path& dir) {
  std::vector<Sample> out;
  for (const auto& shard : manifest.shards) {
    std::ifstream in(dir / shard.file);
    if (!in) throw std::runtime_error("cannot open shard " + (dir / shard.file).string());
    std::vector<Sample> all;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      all.push_back(sample_from_json(nlohmann::json::parse(line)));
    }
    if (static_cast<int>(all.size()) != shard.count)
      throw std::runtime_error("shard " + shard.file + " has " + std::to_string(all.size()) +
                               " samples, manifest says " + std::to_string(shard.count));
    if (shard.indices.empty()) {
      for (auto& s : all) out.push_back(std::move(s));
    } else {
      for (int i : shard.indices) {
        if (i < 0 || i >= shard.count) throw std::runtime_error("manifest index out of range");
        out.push_back(std::move(all[static_cast<std::size_t>(i)]));
      }
    }
  }
  return out;
}

}  // namespace cfpower
