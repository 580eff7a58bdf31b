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

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cfpower/dataset.hpp"

using namespace cfpower;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cfpower_test_dataset_" + name);
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

PipelineOptions quick() {
  PipelineOptions o;
  o.n_mc = 40;
  return o;
}

}  // namespace

TEST_CASE("feature matrix layout") {
  NetworkConfig cfg;
  const Scenario s = sample_scenario(cfg, 10, 16, 4);
  const Eigen::MatrixXd z = build_features(s, cfg.area_side);
  CHECK(z.rows() == 10);
  CHECK(z.cols() == 34);
  CHECK(z.minCoeff() >= 0.0);
  CHECK(z.maxCoeff() <= 1.0);
  for (int k = 0; k < 10; ++k) {
    CHECK(z(k, 0) == s.ue[k].x / 500.0);
    CHECK(z(k, 1) == s.ue[k].y / 500.0);
    for (int l = 0; l < 16; ++l) {
      CHECK(z(k, 2 + 2 * l) == s.ap[l].x / 500.0);
      CHECK(z(k, 3 + 2 * l) == s.ap[l].y / 500.0);
    }
  }

  Scenario centre = s;
  centre.ue[0] = {250.0, 250.0};
  const Eigen::MatrixXd zc = build_features(centre, 500.0);
  CHECK(zc(0, 0) == 0.5);
  CHECK(zc(0, 1) == 0.5);
}

TEST_CASE("features invert back to metres and follow UE permutations") {
  NetworkConfig cfg;
  const Scenario s = sample_scenario(cfg, 5, 9, 11);
  const Eigen::MatrixXd z = build_features(s, cfg.area_side);
  for (int k = 0; k < 5; ++k) {
    CHECK(z(k, 0) * cfg.area_side == doctest::Approx(s.ue[k].x).epsilon(1e-15));
    CHECK(z(k, 1) * cfg.area_side == doctest::Approx(s.ue[k].y).epsilon(1e-15));
  }
  Scenario perm = s;
  std::reverse(perm.ue.begin(), perm.ue.end());
  const Eigen::MatrixXd zp = build_features(perm, cfg.area_side);
  for (int k = 0; k < 5; ++k) CHECK(zp.row(k) == z.row(4 - k));
}

TEST_CASE("sample JSON round trip is exact") {
  NetworkConfig cfg;
  const Sample s = make_sample(cfg, 3, 4, 17, quick());
  const std::string line = sample_to_json(s).dump();
  const Sample back = sample_from_json(nlohmann::json::parse(line));
  CHECK(back.K == 3);
  CHECK(back.L == 4);
  CHECK(back.seed == s.seed);
  CHECK(back.z == s.z);
  CHECK(back.p_star_ul == s.p_star_ul);
  CHECK(back.p_star_dl == s.p_star_dl);
  CHECK(back.min_se_ul == s.min_se_ul);
  CHECK(back.min_se_dl == s.min_se_dl);
  CHECK(sample_to_json(back).dump() == line);

  auto bad = nlohmann::json::parse(line);
  bad["p_star_ul"].push_back(1.0);
  CHECK_THROWS(sample_from_json(bad));
}

TEST_CASE("generated dataset: cardinality, constraints, replay") {
  NetworkConfig cfg;
  const fs::path dir = fresh_dir("gen");
  const PipelineOptions opts = quick();
  const DatasetManifest m = generate_dataset(cfg, {2}, {9}, 3, 5, dir, opts);
  REQUIRE(m.shards.size() == 1);
  CHECK(m.shards[0].count == 3);
  CHECK(m.format_version == 1);
  CHECK(m.config_hash == config_hash(cfg));
  CHECK(fs::exists(dir / "manifest.json"));

  const auto samples = load_samples(m, dir);
  REQUIRE(samples.size() == 3);
  for (const Sample& s : samples) {
    CHECK(s.p_star_ul.size() == 2);
    CHECK(s.p_star_dl.size() == 2);
    CHECK(s.z.minCoeff() >= 0.0);
    CHECK(s.z.maxCoeff() <= 1.0);
    CHECK(s.p_star_ul.maxCoeff() <= 100.0 * (1 + 1e-12));
    CHECK(std::abs(s.p_star_dl.sum() - 9 * 200.0) <= 1e-6);

    const LabeledScenario replay = label_scenario(cfg, s.K, s.L, s.seed, opts);
    CHECK(replay.ul.power.p == s.p_star_ul);
    CHECK(replay.dl.power.p == s.p_star_dl);
    CHECK(build_features(replay.coeffs.scenario, cfg.area_side) == s.z);
    // Certificates: equalized SINR and the active constraint.
    for (const auto* sol : {&replay.ul, &replay.dl})
      CHECK(sol->sinr.maxCoeff() - sol->sinr.minCoeff() <= 1e-6 * sol->t_star);
    CHECK(s.p_star_ul.maxCoeff() >= 100.0 * (1 - 1e-6));
  }
}

TEST_CASE("generation is byte-identical for identical seeds") {
  NetworkConfig cfg;
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  generate_dataset(cfg, {2, 3}, {4}, 2, 9, a, quick());
  generate_dataset(cfg, {2, 3}, {4}, 2, 9, b, quick());
  for (const auto& e : fs::directory_iterator(a)) {
    const fs::path other = b / e.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(e.path()) == slurp(other));
  }
  const fs::path c = fresh_dir("det_c");
  generate_dataset(cfg, {2, 3}, {4}, 2, 10, c, quick());
  CHECK(slurp(a / "shard_K2_L4.ndjson") != slurp(c / "shard_K2_L4.ndjson"));
}

TEST_CASE("generation rejects an empty request") {
  NetworkConfig cfg;
  const fs::path dir = fresh_dir("bad");
  CHECK_THROWS(generate_dataset(cfg, {2}, {4}, 0, 1, dir, quick()));
  CHECK_THROWS(generate_dataset(cfg, {}, {4}, 1, 1, dir, quick()));
}

TEST_CASE("stratified split") {
  DatasetManifest m;
  m.k_values = {2, 4};
  m.l_values = {9};
  m.samples_per_config = 800;
  m.shards = {ShardInfo{2, 9, "a.ndjson", 800, {}}, ShardInfo{4, 9, "b.ndjson", 800, {}}};
  const auto [train, test] = split_dataset(m, 0.8, 3);
  CHECK(train.role == "train");
  CHECK(test.role == "test");
  REQUIRE(train.shards.size() == 2);
  REQUIRE(test.shards.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(train.shards[i].indices.size() == 640);
    CHECK(test.shards[i].indices.size() == 160);
    std::set<int> tr(train.shards[i].indices.begin(), train.shards[i].indices.end());
    std::set<int> all = tr;
    for (int j : test.shards[i].indices) {
      CHECK(tr.count(j) == 0);
      all.insert(j);
    }
    CHECK(all.size() == 800);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 799);
  }
  CHECK(train.selected_count() == 1280);

  const auto again = split_dataset(m, 0.8, 3);
  CHECK(again.first.shards[0].indices == train.shards[0].indices);

  DatasetManifest two = m;
  two.shards = {ShardInfo{2, 9, "a.ndjson", 2, {}}};
  const auto half = split_dataset(two, 0.5, 1);
  CHECK(half.first.shards[0].indices.size() == 1);
  CHECK(half.second.shards[0].indices.size() == 1);

  DatasetManifest one = m;
  one.shards = {ShardInfo{2, 9, "a.ndjson", 1, {}}};
  CHECK_THROWS(split_dataset(one, 0.8, 1));
  CHECK_THROWS(split_dataset(m, 1.0, 1));
  CHECK_THROWS(split_dataset(m, 0.0, 1));
}

TEST_CASE("manifest round trip and validation") {
  NetworkConfig cfg;
  const fs::path dir = fresh_dir("manifest");
  const DatasetManifest m = generate_dataset(cfg, {2}, {4}, 2, 1, dir, quick());
  const auto [train, test] = split_dataset(m, 0.5, 2);
  save_manifest(train, dir / "train.json");
  const DatasetManifest back = load_manifest(dir / "train.json");
  CHECK(manifest_to_json(back) == manifest_to_json(train));
  CHECK(load_samples(back, dir).size() == 1);

  auto j = manifest_to_json(m);
  j["format_version"] = 2;
  CHECK_THROWS(manifest_from_json(j));
  j = manifest_to_json(m);
  j["split_ratio"] = 1.5;
  CHECK_THROWS(manifest_from_json(j));

  // A shard whose line count disagrees with the manifest is rejected.
  DatasetManifest lying = m;
  lying.shards[0].count = 5;
  CHECK_THROWS(load_samples(lying, dir));
  CHECK_THROWS(load_manifest(dir / "missing.json"));
}

TEST_CASE("config hash tracks the configuration") {
  NetworkConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.antennas = 2;
  CHECK(config_hash(a) != config_hash(b));
}
