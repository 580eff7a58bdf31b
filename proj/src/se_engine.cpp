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

#include "cfpower/se_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "cfpower/random.hpp"

namespace cfpower {

const char* to_string(Direction d) { return d == Direction::kUplink ? "UL" : "DL"; }

Eigen::MatrixXcd combiner_regularizer(const ChannelStats& stats, const Eigen::VectorXd& p_ul,
                                      double sigma2) {
  if (p_ul.size() != stats.K) throw std::invalid_argument("combiner: power vector length != K");
  if (!stats.has_estimator()) throw std::logic_error("combiner: channel stats lack estimator");
  const int N = stats.N;
  const int rows = stats.L * N;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(rows, rows) * sigma2;
  for (int l = 0; l < stats.L; ++l) {
    for (int i = 0; i < stats.K; ++i) {
      if (p_ul(i) == 0.0) continue;
      z.block(l * N, l * N, N, N) += p_ul(i) * (stats.R(i, l) - stats.Phi(i, l));
    }
  }
  return z;
}

Eigen::MatrixXcd mmse_combiner(const Eigen::MatrixXcd& h_hat, const Eigen::VectorXd& p_ul,
                               const Eigen::MatrixXcd& z) {
  Eigen::MatrixXcd a = z;
  a.noalias() += h_hat * p_ul.cast<cd>().asDiagonal() * h_hat.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("mmse combiner: singular system");
  return llt.solve(h_hat);
}

Eigen::MatrixXcd mmse_combiner(const Eigen::MatrixXcd& h_hat, const ChannelStats& stats,
                               const Eigen::VectorXd& p_ul, double sigma2) {
  if ((p_ul.array() < 0.0).any()) throw std::invalid_argument("combiner: negative power");
  return mmse_combiner(h_hat, p_ul, combiner_regularizer(stats, p_ul, sigma2));
}

Eigen::MatrixXcd normalize_precoders(const Eigen::MatrixXcd& v) {
  Eigen::MatrixXcd w = v;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double n = v.col(k).norm();
    if (!(n > 0.0)) throw std::runtime_error("precoder: zero combiner (degenerate estimate)");
    w.col(k) /= n;
  }
  return w;
}

HardeningAccumulator::HardeningAccumulator(int K)
    : K_(K),
      sum_vh_(Eigen::VectorXcd::Zero(K)),
      sum_vh2_(Eigen::MatrixXd::Zero(K, K)),
      sum_vnorm2_(Eigen::VectorXd::Zero(K)),
      sum_hw_(Eigen::VectorXcd::Zero(K)),
      sum_hw2_(Eigen::MatrixXd::Zero(K, K)) {}

void HardeningAccumulator::add(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& v) {
  if (h.cols() != K_ || v.cols() != K_ || h.rows() != v.rows())
    throw std::invalid_argument("hardening accumulator: shape mismatch");
  // g(k, i) = v_k^H h_i
  const Eigen::MatrixXcd g = v.adjoint() * h;
  const Eigen::VectorXd vnorm2 = v.colwise().squaredNorm().transpose();
  for (int k = 0; k < K_; ++k) {
    sum_vh_(k) += g(k, k);
    sum_vnorm2_(k) += vnorm2(k);
    // h_k^H w_k = conj(v_k^H h_k) / ||v_k||
    const double inv = vnorm2(k) > 0.0 ? 1.0 / std::sqrt(vnorm2(k)) : 0.0;
    sum_hw_(k) += std::conj(g(k, k)) * inv;
    for (int i = 0; i < K_; ++i) {
      sum_vh2_(k, i) += std::norm(g(k, i));
      // |h_k^H w_i|^2 = |v_i^H h_k|^2 / ||v_i||^2
      sum_hw2_(k, i) += vnorm2(i) > 0.0 ? std::norm(g(i, k)) / vnorm2(i) : 0.0;
    }
  }
  ++count_;
}

HardeningCoeffsUL HardeningAccumulator::uplink() const {
  if (count_ == 0) throw std::logic_error("hardening accumulator is empty");
  const double n = count_;
  HardeningCoeffsUL c;
  c.a = (sum_vh_ / n).cwiseAbs2();
  c.b = sum_vh2_ / n;
  c.c = sum_vnorm2_ / n;
  c.n_mc = count_;
  return c;
}

HardeningCoeffsDL HardeningAccumulator::downlink() const {
  if (count_ == 0) throw std::logic_error("hardening accumulator is empty");
  const double n = count_;
  HardeningCoeffsDL c;
  c.a_bar = (sum_hw_ / n).cwiseAbs2();
  c.b_bar = sum_hw2_ / n;
  c.n_mc = count_;
  return c;
}

std::pair<HardeningCoeffsUL, HardeningCoeffsDL> mc_hardening(const ChannelStats& stats,
                                                             const Eigen::VectorXd& p_ul_for_filters,
                                                             int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("mc_hardening: n_mc must be >= 1");
  const Eigen::MatrixXcd z = combiner_regularizer(stats, p_ul_for_filters, stats.sigma2);
  HardeningAccumulator acc(stats.K);
  for (int r = 0; r < n_mc; ++r) {
    auto rng = make_rng(seed, stream::kMonteCarlo, static_cast<std::uint64_t>(r));
    ChannelDraw draw = draw_channels(stats, rng);
    mmse_estimate(draw, stats, rng);
    acc.add(draw.h, mmse_combiner(draw.h_hat, p_ul_for_filters, z));
  }
  return {acc.uplink(), acc.downlink()};
}

Eigen::VectorXd sinr_ul(const Eigen::VectorXd& p, const HardeningCoeffsUL& coeffs, double sigma2) {
  const Eigen::Index K = coeffs.a.size();
  if (p.size() != K) throw std::invalid_argument("sinr_ul: power vector length != K");
  Eigen::VectorXd out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double signal = p(k) * coeffs.a(k);
    const double denom = coeffs.b.row(k).dot(p) - signal + sigma2 * coeffs.c(k);
    if (!(denom > 0.0)) throw std::domain_error("sinr_ul: non-positive denominator");
    out(k) = signal / denom;
  }
  return out;
}

Eigen::VectorXd sinr_dl(const Eigen::VectorXd& p, const HardeningCoeffsDL& coeffs, double sigma2) {
  const Eigen::Index K = coeffs.a_bar.size();
  if (p.size() != K) throw std::invalid_argument("sinr_dl: power vector length != K");
  Eigen::VectorXd out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double signal = p(k) * coeffs.a_bar(k);
    const double denom = coeffs.b_bar.row(k).dot(p) - signal + sigma2;
    if (!(denom > 0.0)) throw std::domain_error("sinr_dl: non-positive denominator");
    out(k) = signal / denom;
  }
  return out;
}

Eigen::VectorXd se_from_sinr(const Eigen::VectorXd& sinr, double prelog) {
  return sinr.unaryExpr([prelog](double s) { return prelog * std::log2(1.0 + s); });
}

}  // namespace cfpower
