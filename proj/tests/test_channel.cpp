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

#include <cmath>

#include "cfpower/channel.hpp"
#include "cfpower/random.hpp"

using namespace cfpower;

namespace {

ChannelStats single(double beta, int N, double sigma2 = 1e-3, double rho = 100.0, int tau_p = 1) {
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = beta;
  ChannelStats st = build_covariance(b, CorrelationConfig{}, N);
  attach_estimator(st, tau_p, rho, sigma2);
  return st;
}

bool loewner_leq(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(b - a);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace

TEST_CASE("uncorrelated covariance is beta times identity") {
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = 2.0;
  const ChannelStats st = build_covariance(b, CorrelationConfig{}, 4);
  CHECK((st.R(0, 0) - 2.0 * Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-15);
}

TEST_CASE("correlation tag parsing") {
  CHECK(CorrelationConfig::parse("uncorrelated").model == CorrelationModel::kUncorrelated);
  CHECK(CorrelationConfig::parse("local-scattering", 5).model == CorrelationModel::kLocalScattering);
  CHECK_THROWS_AS(CorrelationConfig::parse("rayleigh"), std::invalid_argument);
}

TEST_CASE("trace of R_eff equals N beta for both models") {
  Eigen::MatrixXd beta(2, 3);
  beta << 1.5, 0.2, 3.0, 0.7, 1e-9, 4.0;
  Eigen::MatrixXd angles(2, 3);
  angles << 0.1, -0.4, 1.2, 2.0, -2.5, 0.0;
  for (const auto& corr : {CorrelationConfig::parse("uncorrelated"), CorrelationConfig::parse("local-scattering", 15)}) {
    const ChannelStats st = build_covariance(beta, corr, 6, angles);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 3; ++l) CHECK(st.R(k, l).trace().real() / beta(k, l) == doctest::Approx(6.0).epsilon(1e-12));
  }
}

TEST_CASE("local scattering with vanishing spread is the steering outer product") {
  // Oracle: a(theta)_n = exp(i pi n sin theta); R = a a^H has unit diagonal.
  const int N = 5;
  const double theta = 0.6;
  const Eigen::MatrixXcd R = local_scattering_correlation(N, theta, 1e-9);
  Eigen::VectorXcd a(N);
  for (int n = 0; n < N; ++n) a(n) = std::polar(1.0, M_PI * n * std::sin(theta));
  const Eigen::MatrixXcd oracle = a * a.adjoint();
  CHECK((R - oracle).norm() < 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R);
  CHECK(es.eigenvalues()(N - 1) == doctest::Approx(N).epsilon(1e-9));
  CHECK(es.eigenvalues().head(N - 1).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("draws have the requested covariance") {
  Eigen::MatrixXd beta(1, 1);
  beta(0, 0) = 1.0;
  ChannelStats st = build_covariance(beta, CorrelationConfig{}, 3);
  const int n = 10000;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
  auto rng = make_rng(5, stream::kMonteCarlo);
  for (int i = 0; i < n; ++i) {
    const ChannelDraw d = draw_channels(st, rng);
    acc += d.h.col(0) * d.h.col(0).adjoint();
  }
  acc /= n;
  CHECK((acc - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("zero covariance gives zero channels") {
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(2, 2);
  ChannelStats st = build_covariance(beta, CorrelationConfig{}, 2);
  attach_estimator(st, 2, 100, 1e-3);
  auto rng = make_rng(1, 1);
  ChannelDraw d = draw_channels(st, rng);
  CHECK(d.h.norm() == 0.0);
  mmse_estimate(d, st, rng);
  CHECK(d.h_hat.norm() == 0.0);
  CHECK(st.Phi(1, 1).norm() == 0.0);
}

TEST_CASE("draws are reproducible") {
  const ChannelStats st = single(0.5, 4);
  auto r1 = make_rng(9, 3, 4), r2 = make_rng(9, 3, 4);
  ChannelDraw a = draw_channels(st, r1), b = draw_channels(st, r2);
  mmse_estimate(a, st, r1);
  mmse_estimate(b, st, r2);
  CHECK(a.h == b.h);
  CHECK(a.h_hat == b.h_hat);
}

TEST_CASE("scalar estimate covariance") {
  const double beta = 2.0, sigma2 = 0.5, rho = 4.0;
  const int tau_p = 3;
  const ChannelStats st = single(beta, 1, sigma2, rho, tau_p);
  const double noise = sigma2 / (tau_p * rho);
  CHECK(st.Phi(0, 0)(0, 0).real() == doctest::Approx(beta * beta / (beta + noise)).epsilon(1e-14));
}

TEST_CASE("noiseless limit recovers the channel") {
  const ChannelStats st = single(1.0, 3, 1e-14);
  auto rng = make_rng(3, 3);
  ChannelDraw d = draw_channels(st, rng);
  mmse_estimate(d, st, rng);
  CHECK((d.h_hat - d.h).norm() < 1e-6 * d.h.norm());
  CHECK((st.Phi(0, 0) - st.R(0, 0)).norm() < 1e-12);
}

TEST_CASE("estimate statistics: covariance, orthogonality, Loewner order") {
  Eigen::MatrixXd beta(1, 1);
  beta(0, 0) = 1.0;
  Eigen::MatrixXd angles(1, 1);
  angles(0, 0) = 0.3;
  ChannelStats st = build_covariance(beta, CorrelationConfig::parse("local-scattering", 20), 3, angles);
  attach_estimator(st, 1, 1.0, 0.8);
  CHECK(loewner_leq(st.Phi(0, 0), st.R(0, 0), 1e-12));
  CHECK((st.Phi(0, 0) - st.Phi(0, 0).adjoint()).norm() < 1e-14);

  const int n = 10000;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(3, 3), cross = Eigen::MatrixXcd::Zero(3, 3);
  auto rng = make_rng(17, stream::kMonteCarlo);
  for (int i = 0; i < n; ++i) {
    ChannelDraw d = draw_channels(st, rng);
    mmse_estimate(d, st, rng);
    const Eigen::VectorXcd e = d.h.col(0) - d.h_hat.col(0);
    cov += d.h_hat.col(0) * d.h_hat.col(0).adjoint();
    cross += d.h_hat.col(0) * e.adjoint();
  }
  cov /= n;
  cross /= n;
  const double scale = st.Phi(0, 0).norm();
  CHECK((cov - st.Phi(0, 0)).norm() < 0.05 * scale);
  CHECK(cross.norm() < 0.05 * scale);
}

TEST_CASE("collective channel stacks AP blocks") {
  Eigen::MatrixXd beta(2, 3);
  beta << 1, 0, 0, 0, 0, 1;
  ChannelStats st = build_covariance(beta, CorrelationConfig{}, 2);
  auto rng = make_rng(2, 2);
  const ChannelDraw d = draw_channels(st, rng);
  REQUIRE(d.h.rows() == 6);
  REQUIRE(d.h.cols() == 2);
  // UE 0 only hears AP 0, UE 1 only AP 2.
  CHECK(d.h.block(2, 0, 4, 1).norm() == 0.0);
  CHECK(d.h.block(0, 1, 4, 1).norm() == 0.0);
  CHECK(d.h.block(0, 0, 2, 1).norm() > 0.0);
}

TEST_CASE("psd_sqrt squares back") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(4, 4);
  const Eigen::MatrixXcd m = a * a.adjoint();
  const Eigen::MatrixXcd s = psd_sqrt(m);
  CHECK((s * s - m).norm() < 1e-10 * m.norm());
  CHECK_THROWS(psd_sqrt(-Eigen::MatrixXcd::Identity(2, 2)));
}
