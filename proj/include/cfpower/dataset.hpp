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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfpower/pipeline.hpp"
#include "cfpower/scenario.hpp"

namespace cfpower {

inline constexpr int kDatasetFormatVersion = 1;

/// One labeled instance: coordinates in, optimal powers out.
struct Sample {
  int K = 0;
  int L = 0;
  std::vector<Point> ue;
  std::vector<Point> ap;
  Eigen::MatrixXd z;          // K x (2L + 2) normalized features
  Eigen::VectorXd p_star_ul;  // mW
  Eigen::VectorXd p_star_dl;  // mW
  double min_se_ul = 0.0;
  double min_se_dl = 0.0;
  std::uint64_t seed = 0;     // replays the scenario, shadowing and Monte-Carlo draws

  Scenario scenario() const;
};

nlohmann::json sample_to_json(const Sample& s);
Sample sample_from_json(const nlohmann::json& j);

/// Row k = [x_k, y_k, x_1^AP, y_1^AP, ..., x_L^AP, y_L^AP] / area_side.
Eigen::MatrixXd build_features(const Scenario& scenario, double area_side);

struct ShardInfo {
  int K = 0;
  int L = 0;
  std::string file;          // relative to the dataset directory
  int count = 0;             // lines in the file
  std::vector<int> indices;  // selected lines; empty means all of them
};

struct DatasetManifest {
  int format_version = kDatasetFormatVersion;
  std::string role = "full";  // full, train or test
  std::string config_hash;
  NetworkConfig config;
  std::vector<int> k_values;
  std::vector<int> l_values;
  int samples_per_config = 0;
  double split_ratio = 0.8;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  int n_mc = 0;
  SolverOptions solver;
  int refine = 0;
  int resampled = 0;
  std::vector<ShardInfo> shards;

  std::size_t selected_count() const;
};

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// FNV-1a over the canonical JSON dump of the config.
std::string config_hash(const NetworkConfig& cfg);

/// Builds and labels one sample. Retries with perturbed seeds when a solver
/// fails; the number of retries is returned through `resampled`.
Sample make_sample(const NetworkConfig& cfg, int K, int L, std::uint64_t seed,
                   const PipelineOptions& opts, int* resampled = nullptr);

/// Generates every (K, L) shard into out_dir and writes manifest.json.
DatasetManifest generate_dataset(const NetworkConfig& cfg, const std::vector<int>& k_values,
                                 const std::vector<int>& l_values, int n_per_config,
                                 std::uint64_t seed, const std::filesystem::path& out_dir,
                                 const PipelineOptions& opts = {});

/// Stratified per-(K, L) shuffle split into disjoint train / test manifests.
std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          double ratio, std::uint64_t seed);

/// Samples selected by the manifest, shard by shard in manifest order.
std::vector<Sample> load_samples(const DatasetManifest& manifest,
                                 const std::filesystem::path& dir);

}  // namespace cfpower
