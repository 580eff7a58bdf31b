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

#include "cfpower/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfpower {

CorrelationConfig CorrelationConfig::parse(const std::string& tag, double asd_deg) {
  if (tag == "uncorrelated") return {CorrelationModel::kUncorrelated, asd_deg};
  if (tag == "local-scattering") {
    if (!(asd_deg >= 0.0)) throw std::invalid_argument("angular spread must be >= 0");
    return {CorrelationModel::kLocalScattering, asd_deg};
  }
  throw std::invalid_argument("unknown correlation model: " + tag);
}

Eigen::MatrixXcd local_scattering_correlation(int N, double theta, double asd_deg) {
  // Small-angle approximation of the Gaussian local scattering model:
  // [R]_mn = exp(j pi (m-n) sin theta) exp(-(sigma^2 / 2) (pi (m-n) cos theta)^2)
  const double pi = std::numbers::pi;
  const double sigma = asd_deg * pi / 180.0;
  Eigen::MatrixXcd r(N, N);
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      const double dist = m - n;
      const double spread = pi * dist * std::cos(theta);
      r(m, n) = std::polar(std::exp(-0.5 * sigma * sigma * spread * spread),
                           pi * dist * std::sin(theta));
    }
  }
  return r;
}

Eigen::MatrixXd arrival_angles(const Scenario& scenario) {
  Eigen::MatrixXd a(scenario.K, scenario.L);
  for (int k = 0; k < scenario.K; ++k)
    for (int l = 0; l < scenario.L; ++l)
      a(k, l) = std::atan2(scenario.ue[k].y - scenario.ap[l].y, scenario.ue[k].x - scenario.ap[l].x);
  return a;
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  if (eig.info() != Eigen::Success) throw std::runtime_error("matrix square root: eigensolve failed");
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  if (lambda.minCoeff() < -1e-10 * scale)
    throw std::runtime_error("matrix square root: matrix is not positive semi-definite");
  return eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         eig.eigenvectors().adjoint();
}

ChannelStats build_covariance(const Eigen::MatrixXd& beta, const CorrelationConfig& corr, int N,
                              const Eigen::MatrixXd& angles) {
  if (N < 1) throw std::invalid_argument("build_covariance: N must be >= 1");
  if ((beta.array() < 0.0).any() || !beta.allFinite())
    throw std::invalid_argument("build_covariance: gains must be finite and non-negative");
  const bool scattering = corr.model == CorrelationModel::kLocalScattering;
  if (scattering && (angles.rows() != beta.rows() || angles.cols() != beta.cols()))
    throw std::invalid_argument("build_covariance: local-scattering needs a K x L angle table");

  ChannelStats s;
  s.K = static_cast<int>(beta.rows());
  s.L = static_cast<int>(beta.cols());
  s.N = N;
  s.r_eff.resize(static_cast<std::size_t>(s.K) * s.L);
  s.r_sqrt.resize(s.r_eff.size());
  for (int k = 0; k < s.K; ++k) {
    for (int l = 0; l < s.L; ++l) {
      const double b = beta(k, l);
      auto& r = s.r_eff[s.index(k, l)];
      if (scattering) {
        r = b * local_scattering_correlation(N, angles(k, l), corr.asd_deg);
        s.r_sqrt[s.index(k, l)] = psd_sqrt(r);
      } else {
        r = Eigen::MatrixXcd::Identity(N, N) * b;
        s.r_sqrt[s.index(k, l)] = Eigen::MatrixXcd::Identity(N, N) * std::sqrt(b);
      }
    }
  }
  return s;
}

void attach_estimator(ChannelStats& stats, int tau_p, double rho_pilot, double sigma2) {
  if (tau_p < stats.K) throw std::invalid_argument("mmse estimation needs tau_p >= K");
  if (!(rho_pilot > 0.0)) throw std::invalid_argument("pilot power must be positive");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("noise power must be >= 0");
  stats.tau_p = tau_p;
  stats.rho_pilot = rho_pilot;
  stats.sigma2 = sigma2;
  stats.est_noise_var = sigma2 / (tau_p * rho_pilot);
  const int N = stats.N;
  stats.phi.resize(stats.r_eff.size());
  stats.est_gain.resize(stats.r_eff.size());
  for (std::size_t i = 0; i < stats.r_eff.size(); ++i) {
    const Eigen::MatrixXcd& r = stats.r_eff[i];
    const Eigen::MatrixXcd q = r + stats.est_noise_var * Eigen::MatrixXcd::Identity(N, N);
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(q);
    // Q is Hermitian, so R Q^{-1} = (Q^{-1} R)^H.
    const Eigen::MatrixXcd qinv_r = ldlt.solve(r);
    if (ldlt.info() != Eigen::Success || !qinv_r.allFinite()) {
      if (r.isZero(0.0)) {
        stats.est_gain[i] = Eigen::MatrixXcd::Zero(N, N);
        stats.phi[i] = Eigen::MatrixXcd::Zero(N, N);
        continue;
      }
      throw std::runtime_error("mmse estimate: singular regularized covariance");
    }
    stats.est_gain[i] = qinv_r.adjoint();
    Eigen::MatrixXcd phi = stats.est_gain[i] * r;
    stats.phi[i] = 0.5 * (phi + phi.adjoint());
  }
}

namespace {

void fill_complex_gaussian(Eigen::Ref<Eigen::VectorXcd> v, double variance, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = cd(re, im);
  }
}

}  // namespace

ChannelDraw draw_channels(const ChannelStats& stats, std::mt19937_64& rng) {
  ChannelDraw d;
  d.K = stats.K;
  d.L = stats.L;
  d.N = stats.N;
  const int rows = stats.L * stats.N;
  d.g.resize(rows, stats.K);
  d.h.resize(rows, stats.K);
  for (int k = 0; k < stats.K; ++k) {
    fill_complex_gaussian(d.g.col(k), 1.0, rng);
    for (int l = 0; l < stats.L; ++l) {
      d.h.block(l * stats.N, k, stats.N, 1).noalias() =
          stats.r_sqrt[stats.index(k, l)] * d.g.block(l * stats.N, k, stats.N, 1);
    }
  }
  return d;
}

void mmse_estimate(ChannelDraw& draw, const ChannelStats& stats, std::mt19937_64& rng) {
  if (!stats.has_estimator()) throw std::logic_error("mmse_estimate: call attach_estimator first");
  const int N = stats.N;
  draw.h_hat.resize(draw.h.rows(), draw.h.cols());
  Eigen::VectorXcd noise(N);
  for (int k = 0; k < stats.K; ++k) {
    for (int l = 0; l < stats.L; ++l) {
      fill_complex_gaussian(noise, stats.est_noise_var, rng);
      const Eigen::VectorXcd y = draw.h.block(l * N, k, N, 1) + noise;
      draw.h_hat.block(l * N, k, N, 1).noalias() = stats.est_gain[stats.index(k, l)] * y;
    }
  }
}

}  // namespace cfpower
