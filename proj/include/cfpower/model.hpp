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
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cfpower/nn/adamw.hpp"
#include "cfpower/nn/autograd.hpp"
#include "cfpower/scenario.hpp"

namespace cfpower {

struct ModelConfig {
  int d_model = 32;
  int layers = 2;
  int heads = 4;
  int d_ffn = 128;
  double dropout = 0.1;

  int d_head() const { return d_model / heads; }
  void validate() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct EncoderLayerWeights {
  nn::Var wq, bq, wk, bk, wv, bv, wo, bo;
  nn::Var w1, b1, w2, b2;
  nn::Var ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
};

/// Linear maps are stored as (in x out) matrices applied as x W + b.
struct TransformerWeights {
  ModelConfig config;
  nn::Var ue_w, ue_b;  // 2 -> d_model
  nn::Var ap_w, ap_b;  // 2 -> d_model, mean-pooled over APs
  std::vector<EncoderLayerWeights> layers;
  nn::Var ul_w, ul_b;  // d_model -> 1
  nn::Var dl_w, dl_b;  // d_model -> 1

  /// Xavier-uniform matrices, zero biases, unit layer-norm gains.
  static TransformerWeights init(const ModelConfig& cfg, std::uint64_t seed);

  /// Every trainable tensor under a stable name. Biases and layer-norm
  /// parameters are flagged as exempt from weight decay.
  std::vector<nn::Parameter> parameters() const;
  std::size_t parameter_count() const;
  TransformerWeights clone() const;
};

/// ReLU(ue(x_k) + mean_l ap(x_l)); the AP term is shared by all UEs. `ue_xy`
/// is K x 2 and `ap_xy` is L x 2, both scaled to [0, 1].
nn::Var embed_tokens(const nn::Tensor& ue_xy, const nn::Tensor& ap_xy, const TransformerWeights& w);

/// Splits a K x (2L + 2) feature matrix into the UE and AP coordinate blocks.
std::pair<nn::Tensor, nn::Tensor> split_features(const Eigen::MatrixXd& z);

/// softmax(Q K^T / sqrt(d_head)) V.
nn::Var attention(const nn::Var& q, const nn::Var& k, const nn::Var& v, int d_head);
nn::Var mha(const nn::Var& h, const EncoderLayerWeights& layer, int heads);
nn::Var ffn(const nn::Var& h, const nn::Var& w1, const nn::Var& b1, const nn::Var& w2, const nn::Var& b2);

/// Post-norm encoder stack. Dropout draws come from `rng` and only in training.
nn::Var encoder_forward(const nn::Var& h, const TransformerWeights& w, bool train, std::mt19937_64& rng);

struct HeadOutput {
  nn::Var ul_frac;        // K x 1, p_ul / p_ul_max
  nn::Var dl_frac;        // K x 1, p_dl / dl_budget; sums to one
  Eigen::MatrixXd power;  // K x 2 in mW: column 0 UL, column 1 DL
};

HeadOutput heads(const nn::Var& h_out, const TransformerWeights& w, double p_ul_max, double dl_budget);

/// Features, embedding, encoder and heads as one differentiable graph.
HeadOutput forward_graph(const Eigen::MatrixXd& z, int L, const TransformerWeights& w,
                         const NetworkConfig& cfg, bool train, std::uint64_t seed);

/// K x 2 power matrix (mW) for a scenario; eval mode unless `train`.
Eigen::MatrixXd forward(const Scenario& scenario, const TransformerWeights& w, const NetworkConfig& cfg,
                        bool train = false, std::uint64_t seed = 0);

/// Sum of squared errors over one sample's 2K normalized powers.
nn::Var mse_loss(const nn::Var& p_hat_norm, const nn::Var& p_star_norm);

/// Normalized targets [p_ul / p_ul_max, p_dl / budget] as a K x 2 tensor.
nn::Tensor normalized_target(const Eigen::VectorXd& p_ul, const Eigen::VectorXd& p_dl, double p_ul_max,
                             double dl_budget);

void save_weights(const TransformerWeights& w, const std::string& path);
TransformerWeights load_weights(const std::string& path);

}  // namespace cfpower
