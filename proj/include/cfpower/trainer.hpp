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
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfpower/dataset.hpp"
#include "cfpower/model.hpp"

namespace cfpower {

struct TrainConfig {
  int epochs_per_config = 10;
  int batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 0.01;
  std::uint64_t seed = 1;
  // Training order of (K, L) pairs; empty means order of first appearance.
  std::vector<std::pair<int, int>> config_order;
  // Extra epochs over all configurations with batches interleaved.
  int finetune_epochs = 0;

  void validate() const;
};

struct ConfigLosses {
  int K = 0;
  int L = 0;
  std::vector<double> epoch_loss;  // mean normalized loss per epoch
};

struct TrainReport {
  std::vector<ConfigLosses> configs;
  std::vector<double> finetune_loss;
  std::uint64_t steps = 0;
  double wall_seconds = 0.0;
};

/// Omits wall_seconds; identical runs serialize identically.
nlohmann::json to_json(const TrainReport& r);

/// Supervised training: for every configuration in order, epochs of shuffled
/// mini-batches drawn from that configuration only, optimized with AdamW.
/// Throws std::runtime_error on a non-finite loss, naming the batch.
std::pair<TransformerWeights, TrainReport> train(const std::vector<Sample>& train_set, const ModelConfig& model_cfg,
                                                 const TrainConfig& train_cfg, const NetworkConfig& net_cfg);

/// Same loop, continuing from existing weights.
TrainReport train_in_place(TransformerWeights& weights, const std::vector<Sample>& train_set,
                           const TrainConfig& train_cfg, const NetworkConfig& net_cfg);

/// Mean per-sample loss of a set in eval mode.
double dataset_loss(const TransformerWeights& weights, const std::vector<Sample>& samples,
                    const NetworkConfig& net_cfg);

}  // namespace cfpower
