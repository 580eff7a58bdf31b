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

#include <Eigen/Dense>

#include "cfpower/channel.hpp"

namespace cfpower {

enum class Direction { kUplink, kDownlink };

const char* to_string(Direction d);

struct PowerVector {
  Direction direction = Direction::kUplink;
  Eigen::VectorXd p;  // mW
};

/// Uplink expectations that turn the use-and-then-forget SINR into a
/// deterministic function of the powers:
///   a_k = |E{v_k^H h_k}|^2, b_ki = E{|v_k^H h_i|^2}, c_k = E{||v_k||^2}.
struct HardeningCoeffsUL {
  Eigen::VectorXd a;
  Eigen::MatrixXd b;
  Eigen::VectorXd c;
  int n_mc = 0;
};

/// Downlink counterpart with unit-norm precoders w_k:
///   a_bar_k = |E{h_k^H w_k}|^2, b_bar_ki = E{|h_k^H w_i|^2}.
struct HardeningCoeffsDL {
  Eigen::VectorXd a_bar;
  Eigen::MatrixXd b_bar;
  int n_mc = 0;
};

/// Block-diagonal Z = sum_i p_i (R_i - Phi_i) + sigma2 I of size LN x LN.
Eigen::MatrixXcd combiner_regularizer(const ChannelStats& stats, const Eigen::VectorXd& p_ul,
                                      double sigma2);

/// MMSE combiners, one column per UE:
///   v_k = (sum_i p_i hhat_i hhat_i^H + Z)^{-1} hhat_k.
Eigen::MatrixXcd mmse_combiner(const Eigen::MatrixXcd& h_hat, const ChannelStats& stats,
                               const Eigen::VectorXd& p_ul, double sigma2);

/// Same as mmse_combiner with a precomputed regularizer.
Eigen::MatrixXcd mmse_combiner(const Eigen::MatrixXcd& h_hat, const Eigen::VectorXd& p_ul,
                               const Eigen::MatrixXcd& z);

/// Column-wise unit-norm precoders. Throws on a zero column.
Eigen::MatrixXcd normalize_precoders(const Eigen::MatrixXcd& v);

/// Running sample means of the hardening moments. Realizations are added in a
/// fixed order so the result is reproducible.
class HardeningAccumulator {
 public:
  explicit HardeningAccumulator(int K);

  /// h: true collective channels, v: combiners (both LN x K).
  void add(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& v);

  int count() const { return count_; }
  HardeningCoeffsUL uplink() const;
  HardeningCoeffsDL downlink() const;

 private:
  int K_;
  int count_ = 0;
  Eigen::VectorXcd sum_vh_;      // sum v_k^H h_k
  Eigen::MatrixXd sum_vh2_;      // sum |v_k^H h_i|^2, (k, i)
  Eigen::VectorXd sum_vnorm2_;   // sum ||v_k||^2
  Eigen::VectorXcd sum_hw_;      // sum h_k^H w_k
  Eigen::MatrixXd sum_hw2_;      // sum |h_k^H w_i|^2, (k, i)
};

/// Monte-Carlo hardening coefficients with combiners computed at the fixed
/// filter powers p_ul_for_filters. Realization r draws from its own stream.
std::pair<HardeningCoeffsUL, HardeningCoeffsDL> mc_hardening(const ChannelStats& stats,
                                                             const Eigen::VectorXd& p_ul_for_filters,
                                                             int n_mc, std::uint64_t seed);

Eigen::VectorXd sinr_ul(const Eigen::VectorXd& p, const HardeningCoeffsUL& coeffs, double sigma2);
Eigen::VectorXd sinr_dl(const Eigen::VectorXd& p, const HardeningCoeffsDL& coeffs, double sigma2);

/// prelog * log2(1 + sinr), elementwise.
Eigen::VectorXd se_from_sinr(const Eigen::VectorXd& sinr, double prelog);

}  // namespace cfpower
