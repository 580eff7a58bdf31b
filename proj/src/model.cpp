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

#include "cfpower/model.hpp"

#include <cmath>
#include <stdexcept>

#include "cfpower/dataset.hpp"
#include "cfpower/nn/ops.hpp"
#include "cfpower/nn/serialize.hpp"
#include "cfpower/random.hpp"

namespace cfpower {

using nn::Tensor;
using nn::Var;

void ModelConfig::validate() const {
  if (d_model < 1 || heads < 1 || d_model % heads != 0)
    throw std::invalid_argument("ModelConfig: d_model must be a positive multiple of heads");
  if (layers < 0) throw std::invalid_argument("ModelConfig: layers must be >= 0");
  if (d_ffn < 1) throw std::invalid_argument("ModelConfig: d_ffn must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("ModelConfig: dropout must lie in [0, 1)");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"d_model", c.d_model}, {"layers", c.layers}, {"heads", c.heads}, {"d_ffn", c.d_ffn}, {"dropout", c.dropout}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.d_model = j.value("d_model", c.d_model);
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.d_ffn = j.value("d_ffn", c.d_ffn);
  c.dropout = j.value("dropout", c.dropout);
}

namespace {

// Visits every parameter in a fixed order: f(name, var, decay).
template <typename W, typename F>
void visit(W& w, F&& f) {
  f("ue_embed.w", w.ue_w, true);
  f("ue_embed.b", w.ue_b, false);
  f("ap_embed.w", w.ap_w, true);
  f("ap_embed.b", w.ap_b, false);
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    auto& l = w.layers[i];
    const std::string p = "layers." + std::to_string(i) + ".";
    f(p + "wq", l.wq, true);
    f(p + "bq", l.bq, false);
    f(p + "wk", l.wk, true);
    f(p + "bk", l.bk, false);
    f(p + "wv", l.wv, true);
    f(p + "bv", l.bv, false);
    f(p + "wo", l.wo, true);
    f(p + "bo", l.bo, false);
    f(p + "ffn.w1", l.w1, true);
    f(p + "ffn.b1", l.b1, false);
    f(p + "ffn.w2", l.w2, true);
    f(p + "ffn.b2", l.b2, false);
    f(p + "ln1.gamma", l.ln1_gamma, false);
    f(p + "ln1.beta", l.ln1_beta, false);
    f(p + "ln2.gamma", l.ln2_gamma, false);
    f(p + "ln2.beta", l.ln2_beta, false);
  }
  f("head_ul.w", w.ul_w, true);
  f("head_ul.b", w.ul_b, false);
  f("head_dl.w", w.dl_w, true);
  f("head_dl.b", w.dl_b, false);
}

Var xavier(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> u(-a, a);
  Tensor t(in, out);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = u(rng);
  return Var::parameter(std::move(t));
}

Var zeros(std::size_t n) { return Var::parameter(Tensor(1, n)); }
Var ones(std::size_t n) { return Var::parameter(Tensor(1, n, 1.0)); }

Var linear(const Var& x, const Var& w, const Var& b) { return nn::add(nn::matmul(x, w), b); }

Var affine_norm(const Var& x, const Var& gamma, const Var& beta) {
  return nn::add(nn::mul(nn::layer_norm(x), gamma), beta);
}

}  // namespace

TransformerWeights TransformerWeights::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto rng = make_rng(seed, stream::kInit, 0);
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto f = static_cast<std::size_t>(cfg.d_ffn);
  TransformerWeights w;
  w.config = cfg;
  w.ue_w = xavier(2, d, rng);
  w.ue_b = zeros(d);
  w.ap_w = xavier(2, d, rng);
  w.ap_b = zeros(d);
  for (int i = 0; i < cfg.layers; ++i) {
    EncoderLayerWeights l;
    l.wq = xavier(d, d, rng);
    l.bq = zeros(d);
    l.wk = xavier(d, d, rng);
    l.bk = zeros(d);
    l.wv = xavier(d, d, rng);
    l.bv = zeros(d);
    l.wo = xavier(d, d, rng);
    l.bo = zeros(d);
    l.w1 = xavier(d, f, rng);
    l.b1 = zeros(f);
    l.w2 = xavier(f, d, rng);
    l.b2 = zeros(d);
    l.ln1_gamma = ones(d);
    l.ln1_beta = zeros(d);
    l.ln2_gamma = ones(d);
    l.ln2_beta = zeros(d);
    w.layers.push_back(std::move(l));
  }
  w.ul_w = xavier(d, 1, rng);
  w.ul_b = zeros(1);
  w.dl_w = xavier(d, 1, rng);
  w.dl_b = zeros(1);
  return w;
}

std::vector<nn::Parameter> TransformerWeights::parameters() const {
  std::vector<nn::Parameter> out;
  visit(*this, [&](const std::string& name, const Var& v, bool decay) { out.push_back({name, v, decay}); });
  return out;
}

std::size_t TransformerWeights::parameter_count() const {
  std::size_t n = 0;
  visit(*this, [&](const std::string&, const Var& v, bool) { n += v.value().size(); });
  return n;
}

TransformerWeights TransformerWeights::clone() const {
  TransformerWeights c = *this;
  visit(c, [](const std::string&, Var& v, bool) { v = Var::parameter(v.value()); });
  return c;
}

Var embed_tokens(const Tensor& ue_xy, const Tensor& ap_xy, const TransformerWeights& w) {
  if (ue_xy.rows() < 1 || ue_xy.cols() != 2) throw std::invalid_argument("embed_tokens: ue_xy must be K x 2, K >= 1");
  if (ap_xy.rows() < 1 || ap_xy.cols() != 2) throw std::invalid_argument("embed_tokens: ap_xy must be L x 2, L >= 1");
  Var ue = linear(Var::constant(ue_xy), w.ue_w, w.ue_b);
  Var ap = nn::mean_rows(linear(Var::constant(ap_xy), w.ap_w, w.ap_b));
  return nn::relu(nn::add(ue, ap));
}

std::pair<Tensor, Tensor> split_features(const Eigen::MatrixXd& z) {
  if (z.rows() < 1 || z.cols() < 4 || z.cols() % 2 != 0)
    throw std::invalid_argument("split_features: expected K x (2L + 2) with K, L >= 1");
  const auto K = static_cast<std::size_t>(z.rows());
  const auto L = static_cast<std::size_t>((z.cols() - 2) / 2);
  Tensor ue(K, 2), ap(L, 2);
  for (std::size_t k = 0; k < K; ++k) {
    ue(k, 0) = z(k, 0);
    ue(k, 1) = z(k, 1);
  }
  for (std::size_t l = 0; l < L; ++l) {
    ap(l, 0) = z(0, 2 + 2 * l);
    ap(l, 1) = z(0, 3 + 2 * l);
  }
  return {std::move(ue), std::move(ap)};
}

Var attention(const Var& q, const Var& k, const Var& v, int d_head) {
  if (q.cols() != k.cols() || k.rows() != v.rows())
    throw std::invalid_argument("attention: incompatible Q/K/V shapes");
  Var scores = nn::scale(nn::matmul(q, nn::transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_head)));
  return nn::matmul(nn::softmax_rows(scores), v);
}

Var mha(const Var& h, const EncoderLayerWeights& layer, int heads) {
  const std::size_t d = h.cols();
  if (heads < 1 || d % static_cast<std::size_t>(heads) != 0)
    throw std::invalid_argument("mha: d_model must be divisible by heads");
  const std::size_t dh = d / static_cast<std::size_t>(heads);
  Var q = linear(h, layer.wq, layer.bq);
  Var k = linear(h, layer.wk, layer.bk);
  Var v = linear(h, layer.wv, layer.bv);
  std::vector<Var> out;
  for (int i = 0; i < heads; ++i) {
    const std::size_t s = static_cast<std::size_t>(i) * dh;
    out.push_back(attention(nn::slice_cols(q, s, dh), nn::slice_cols(k, s, dh), nn::slice_cols(v, s, dh),
                            static_cast<int>(dh)));
  }
  Var cat = heads == 1 ? out.front() : nn::concat_cols(out);
  return linear(cat, layer.wo, layer.bo);
}

Var ffn(const Var& h, const Var& w1, const Var& b1, const Var& w2, const Var& b2) {
  return linear(nn::relu(linear(h, w1, b1)), w2, b2);
}

Var encoder_forward(const Var& h, const TransformerWeights& w, bool train, std::mt19937_64& rng) {
  const double rate = w.config.dropout;
  Var x = h;
  for (const auto& l : w.layers) {
    x = affine_norm(nn::add(x, nn::dropout(mha(x, l, w.config.heads), rate, train, rng)), l.ln1_gamma, l.ln1_beta);
    x = affine_norm(nn::add(x, nn::dropout(ffn(x, l.w1, l.b1, l.w2, l.b2), rate, train, rng)), l.ln2_gamma,
                    l.ln2_beta);
  }
  return x;
}

HeadOutput heads(const Var& h_out, const TransformerWeights& w, double p_ul_max, double dl_budget) {
  if (!(dl_budget > 0.0)) throw std::invalid_argument("heads: dl_budget must be positive");
  const std::size_t K = h_out.rows();
  HeadOutput out;
  out.ul_frac = nn::sigmoid(linear(h_out, w.ul_w, w.ul_b));
  Var raw = nn::relu(linear(h_out, w.dl_w, w.dl_b));
  Var total = nn::sum(raw);
  if (total.value()[0] < 1e-12)
    out.dl_frac = Var::constant(Tensor(K, 1, 1.0 / static_cast<double>(K)));
  else
    out.dl_frac = nn::div(raw, total);
  out.power.resize(static_cast<Eigen::Index>(K), 2);
  for (std::size_t k = 0; k < K; ++k) {
    out.power(static_cast<Eigen::Index>(k), 0) = out.ul_frac.value()[k] * p_ul_max;
    out.power(static_cast<Eigen::Index>(k), 1) = out.dl_frac.value()[k] * dl_budget;
  }
  return out;
}

HeadOutput forward_graph(const Eigen::MatrixXd& z, int L, const TransformerWeights& w, const NetworkConfig& cfg,
                         bool train, std::uint64_t seed) {
  auto [ue, ap] = split_features(z);
  if (ap.rows() != static_cast<std::size_t>(L)) throw std::invalid_argument("forward: feature width does not match L");
  auto rng = make_rng(seed, stream::kDropout, 0);
  Var h = encoder_forward(embed_tokens(ue, ap, w), w, train, rng);
  return heads(h, w, cfg.p_ul_max_mw, cfg.dl_budget_mw(L));
}

Eigen::MatrixXd forward(const Scenario& scenario, const TransformerWeights& w, const NetworkConfig& cfg, bool train,
                        std::uint64_t seed) {
  nn::NoGradGuard guard;
  return forward_graph(build_features(scenario, cfg.area_side), scenario.L, w, cfg, train, seed).power;
}

Var mse_loss(const Var& p_hat_norm, const Var& p_star_norm) {
  if (!p_hat_norm.value().same_shape(p_star_norm.value()))
    throw std::invalid_argument("mse_loss: shape mismatch");
  Var diff = nn::sub(p_hat_norm, p_star_norm);
  return nn::sum(nn::mul(diff, diff));
}

Tensor normalized_target(const Eigen::VectorXd& p_ul, const Eigen::VectorXd& p_dl, double p_ul_max,
                         double dl_budget) {
  if (p_ul.size() != p_dl.size()) throw std::invalid_argument("normalized_target: UL/DL length mismatch");
  Tensor t(static_cast<std::size_t>(p_ul.size()), 2);
  for (Eigen::Index k = 0; k < p_ul.size(); ++k) {
    t(static_cast<std::size_t>(k), 0) = p_ul(k) / p_ul_max;
    t(static_cast<std::size_t>(k), 1) = p_dl(k) / dl_budget;
  }
  return t;
}

void save_weights(const TransformerWeights& w, const std::string& path) {
  nn::WeightFile file;
  file.config = w.config;
  visit(w, [&](const std::string& name, const Var& v, bool) { file.arrays.emplace(name, v.value()); });
  nn::save_weight_file(file, path);
}

TransformerWeights load_weights(const std::string& path) {
  nn::WeightFile file = nn::load_weight_file(path);
  ModelConfig cfg;
  try {
    cfg = file.config.get<ModelConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("weight file " + path + ": bad model config: " + e.what());
  }
  TransformerWeights w = TransformerWeights::init(cfg, 0);
  std::size_t used = 0;
  visit(w, [&](const std::string& name, Var& v, bool) {
    auto it = file.arrays.find(name);
    if (it == file.arrays.end()) throw std::runtime_error("weight file " + path + ": missing array '" + name + "'");
    if (!it->second.same_shape(v.value()))
      throw std::runtime_error("weight file " + path + ": array '" + name + "' has shape " +
                               it->second.shape_string() + ", expected " + v.value().shape_string());
    v.mutable_value() = it->second;
    ++used;
  });
  if (used != file.arrays.size()) throw std::runtime_error("weight file " + path + ": unexpected extra arrays");
  return w;
}

}  // namespace cfpower
