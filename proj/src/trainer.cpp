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

#include "cfpower/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfpower/nn/ops.hpp"
#include "cfpower/random.hpp"

namespace cfpower {

using nn::Var;

void TrainConfig::validate() const {
  if (epochs_per_config < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
  if (finetune_epochs < 0) throw std::invalid_argument("TrainConfig: finetune_epochs must be >= 0");
}

nlohmann::json to_json(const TrainReport& r) {
  nlohmann::json configs = nlohmann::json::array();
  for (const auto& c : r.configs) configs.push_back({{"K", c.K}, {"L", c.L}, {"epoch_loss", c.epoch_loss}});
  return {{"configs", configs}, {"finetune_loss", r.finetune_loss}, {"steps", r.steps}};
}

namespace {

Var sample_loss(const Sample& s, const TransformerWeights& w, const NetworkConfig& cfg, bool train,
                std::uint64_t dropout_seed) {
  const double budget = cfg.dl_budget_mw(s.L);
  HeadOutput out = forward_graph(s.z, s.L, w, cfg, train, dropout_seed);
  Var pred = nn::concat_cols({out.ul_frac, out.dl_frac});
  Var target = Var::constant(normalized_target(s.p_star_ul, s.p_star_dl, cfg.p_ul_max_mw, budget));
  return mse_loss(pred, target);
}

class Stepper {
 public:
  Stepper(TransformerWeights& w, const TrainConfig& tc, const NetworkConfig& nc)
      : w_(w), tc_(tc), nc_(nc), opt_(w.parameters(), {tc.lr, 0.9, 0.999, 1e-8, tc.weight_decay}) {}

  // One optimizer step on the batch; returns the batch loss.
  double step(const std::vector<const Sample*>& batch, const std::string& where) {
    opt_.zero_grad();
    Var total;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      Var l = sample_loss(*batch[i], w_, nc_, true, derive_seed(tc_.seed, stream::kDropout, count_ * 7919 + i));
      total = total.defined() ? nn::add(total, l) : l;
    }
    Var loss = nn::scale(total, 1.0 / static_cast<double>(batch.size()));
    const double value = loss.value()[0];
    if (!std::isfinite(value)) {
      std::string seeds;
      for (const auto* s : batch) seeds += (seeds.empty() ? "" : ",") + std::to_string(s->seed);
      throw std::runtime_error("non-finite training loss at " + where + " (sample seeds " + seeds + ")");
    }
    nn::backward(loss);
    opt_.step();
    ++count_;
    return value;
  }

  std::uint64_t steps() const { return count_; }

 private:
  TransformerWeights& w_;
  const TrainConfig& tc_;
  const NetworkConfig& nc_;
  nn::AdamW opt_;
  std::uint64_t count_ = 0;
};

}  // namespace

TrainReport train_in_place(TransformerWeights& weights, const std::vector<Sample>& train_set,
                           const TrainConfig& tc, const NetworkConfig& nc) {
  tc.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  const auto t0 = std::chrono::steady_clock::now();

  std::map<std::pair<int, int>, std::vector<const Sample*>> groups;
  std::vector<std::pair<int, int>> order;
  for (const auto& s : train_set) {
    auto key = std::make_pair(s.K, s.L);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&s);
  }
  if (!tc.config_order.empty()) {
    for (const auto& key : tc.config_order)
      if (!groups.count(key))
        throw std::invalid_argument("train: no samples for K=" + std::to_string(key.first) +
                                    ", L=" + std::to_string(key.second));
    order = tc.config_order;
  }

  TrainReport report;
  Stepper stepper(weights, tc, nc);
  const auto B = static_cast<std::size_t>(tc.batch_size);

  for (std::size_t ci = 0; ci < order.size(); ++ci) {
    const auto& [K, L] = order[ci];
    std::vector<const Sample*> pool = groups.at(order[ci]);
    ConfigLosses losses{K, L, {}};
    for (int e = 0; e < tc.epochs_per_config; ++e) {
      auto rng = make_rng(tc.seed, stream::kShuffle, ci * 100000 + static_cast<std::uint64_t>(e));
      std::shuffle(pool.begin(), pool.end(), rng);
      double sum = 0.0;
      std::size_t nb = 0;
      for (std::size_t start = 0; start < pool.size(); start += B, ++nb) {
        std::vector<const Sample*> batch(pool.begin() + start, pool.begin() + std::min(pool.size(), start + B));
        sum += stepper.step(batch, "K=" + std::to_string(K) + " L=" + std::to_string(L) + " epoch " +
                                       std::to_string(e) + " batch " + std::to_string(nb));
      }
      losses.epoch_loss.push_back(sum / static_cast<double>(nb));
    }
    report.configs.push_back(std::move(losses));
  }

  for (int e = 0; e < tc.finetune_epochs; ++e) {
    // Homogeneous batches from every configuration, visited in shuffled order.
    std::vector<std::vector<const Sample*>> batches;
    for (std::size_t ci = 0; ci < order.size(); ++ci) {
      std::vector<const Sample*> pool = groups.at(order[ci]);
      auto rng = make_rng(tc.seed, stream::kShuffle, 1000000000ULL + ci * 100000 + static_cast<std::uint64_t>(e));
      std::shuffle(pool.begin(), pool.end(), rng);
      for (std::size_t start = 0; start < pool.size(); start += B)
        batches.emplace_back(pool.begin() + start, pool.begin() + std::min(pool.size(), start + B));
    }
    auto rng = make_rng(tc.seed, stream::kShuffle, 2000000000ULL + static_cast<std::uint64_t>(e));
    std::shuffle(batches.begin(), batches.end(), rng);
    double sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b)
      sum += stepper.step(batches[b], "fine-tune epoch " + std::to_string(e) + " batch " + std::to_string(b));
    report.finetune_loss.push_back(sum / static_cast<double>(batches.size()));
  }

  report.steps = stepper.steps();
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::pair<TransformerWeights, TrainReport> train(const std::vector<Sample>& train_set, const ModelConfig& model_cfg,
                                                 const TrainConfig& train_cfg, const NetworkConfig& net_cfg) {
  TransformerWeights w = TransformerWeights::init(model_cfg, train_cfg.seed);
  TrainReport r = train_in_place(w, train_set, train_cfg, net_cfg);
  return {std::move(w), std::move(r)};
}

double dataset_loss(const TransformerWeights& weights, const std::vector<Sample>& samples,
                    const NetworkConfig& net_cfg) {
  if (samples.empty()) throw std::invalid_argument("dataset_loss: no samples");
  nn::NoGradGuard guard;
  double sum = 0.0;
  for (const auto& s : samples) sum += sample_loss(s, weights, net_cfg, false, 0).value()[0];
  return sum / static_cast<double>(samples.size());
}

}  // namespace cfpower
