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

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfpower/scenario.hpp"

namespace cfpower {

using cd = std::complex<double>;

enum class CorrelationModel { kUncorrelated, kLocalScattering };

struct CorrelationConfig {
  CorrelationModel model = CorrelationModel::kUncorrelated;
  double asd_deg = 10.0;

  /// Accepts "uncorrelated" or "local-scattering"; throws on anything else.
  static CorrelationConfig parse(const std::string& tag, double asd_deg = 10.0);
};

/// Second-order channel statistics for every (UE k, AP l) pair. Matrices are
/// stored at index k * L + l.
struct ChannelStats {
  int K = 0;
  int L = 0;
  int N = 0;
  std::vector<Eigen::MatrixXcd> r_eff;  // beta_lk * R_lk
  std::vector<Eigen::MatrixXcd> phi;    // covariance of the MMSE estimate
  double rho_pilot = 0.0;               // mW
  double sigma2 = 0.0;                  // mW
  int tau_p = 0;

  // Sampling helpers filled alongside r_eff / phi.
  std::vector<Eigen::MatrixXcd> r_sqrt;    // R_eff^{1/2}
  std::vector<Eigen::MatrixXcd> est_gain;  // R_eff Q^{-1}
  double est_noise_var = 0.0;              // sigma2 / (tau_p rho)

  std::size_t index(int k, int l) const { return static_cast<std::size_t>(k) * L + l; }
  const Eigen::MatrixXcd& R(int k, int l) const { return r_eff[index(k, l)]; }
  const Eigen::MatrixXcd& Phi(int k, int l) const { return phi[index(k, l)]; }
  bool has_estimator() const { return !phi.empty(); }
};

/// Unit-trace-per-antenna correlation matrix of a half-wavelength ULA under a
/// Gaussian angular spread around nominal angle theta (radians).
Eigen::MatrixXcd local_scattering_correlation(int N, double theta, double asd_deg);

/// R_eff for every pair. angles (K x L, radians) are required for
/// local-scattering and ignored otherwise.
ChannelStats build_covariance(const Eigen::MatrixXd& beta, const CorrelationConfig& corr, int N,
                              const Eigen::MatrixXd& angles = {});

/// Angle of each UE as seen from each AP (K x L).
Eigen::MatrixXd arrival_angles(const Scenario& scenario);

/// Fills phi and the estimator matrices for orthogonal pilots of length tau_p.
void attach_estimator(ChannelStats& stats, int tau_p, double rho_pilot, double sigma2);

/// One small-scale realization. Column k of h is the collective channel of
/// UE k (length L*N, AP blocks stacked in order).
struct ChannelDraw {
  int K = 0;
  int L = 0;
  int N = 0;
  Eigen::MatrixXcd g;
  Eigen::MatrixXcd h;
  Eigen::MatrixXcd h_hat;

  auto block(const Eigen::MatrixXcd& m, int k, int l) const { return m.block(l * N, k, N, 1); }
};

ChannelDraw draw_channels(const ChannelStats& stats, std::mt19937_64& rng);

/// Draws the pilot observation noise and fills draw.h_hat with the MMSE
/// estimate. Requires attach_estimator.
void mmse_estimate(ChannelDraw& draw, const ChannelStats& stats, std::mt19937_64& rng);

/// PSD square root; throws if m has a clearly negative eigenvalue.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m);

}  // namespace cfpower
