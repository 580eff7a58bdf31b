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
#include <numeric>

#include "cfpower/random.hpp"
#include "cfpower/se_engine.hpp"

using namespace cfpower;

namespace {

ChannelStats make_stats(const Eigen::MatrixXd& beta, int N, double sigma2, double rho = 100.0) {
  ChannelStats st = build_covariance(beta, CorrelationConfig{}, N);
  attach_estimator(st, static_cast<int>(beta.rows()), rho, sigma2);
  return st;
}

Eigen::MatrixXcd random_cmat(int r, int c, std::uint64_t seed) {
  auto rng = make_rng(seed, 99);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

}  // namespace

TEST_CASE("combiner with zero powers is the scaled estimate") {
  Eigen::MatrixXd beta(1, 1);
  beta(0, 0) = 1.0;
  const double sigma2 = 0.3;
  const ChannelStats st = make_stats(beta, 3, sigma2);
  const Eigen::MatrixXcd h_hat = random_cmat(3, 1, 1);
  const Eigen::MatrixXcd v = mmse_combiner(h_hat, st, Eigen::VectorXd::Zero(1), sigma2);
  CHECK((v - h_hat / sigma2).norm() < 1e-14);
}

TEST_CASE("combiner tends to the estimate direction for large noise") {
  Eigen::MatrixXd beta(2, 2);
  beta << 1, 0.5, 0.2, 2;
  const double sigma2 = 1e9;
  const ChannelStats st = make_stats(beta, 2, sigma2);
  const Eigen::MatrixXcd h_hat = random_cmat(4, 2, 2);
  const Eigen::MatrixXcd v = mmse_combiner(h_hat, st, Eigen::VectorXd::Constant(2, 1.0), sigma2);
  for (int k = 0; k < 2; ++k) {
    const double cosang = std::abs(v.col(k).dot(h_hat.col(k))) / (v.col(k).norm() * h_hat.col(k).norm());
    CHECK(cosang == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("combiner matches an independent dense solve") {
  Eigen::MatrixXd beta(3, 2);
  beta << 1.0, 0.3, 0.05, 2.0, 0.7, 0.7;
  const double sigma2 = 0.2;
  const ChannelStats st = make_stats(beta, 2, sigma2, 1.0);
  const Eigen::MatrixXcd h_hat = random_cmat(4, 3, 3);
  const Eigen::VectorXd p = (Eigen::VectorXd(3) << 0.5, 2.0, 1.0).finished();
  const Eigen::MatrixXcd v = mmse_combiner(h_hat, st, p, sigma2);

  // Oracle: assemble the system matrix entry by entry and LU-solve it.
  const int LN = 4;
  Eigen::MatrixXcd A = sigma2 * Eigen::MatrixXcd::Identity(LN, LN);
  for (int i = 0; i < 3; ++i) {
    A += p(i) * h_hat.col(i) * h_hat.col(i).adjoint();
    for (int l = 0; l < 2; ++l) A.block(2 * l, 2 * l, 2, 2) += p(i) * (st.R(i, l) - st.Phi(i, l));
  }
  const Eigen::MatrixXcd oracle = A.fullPivLu().solve(h_hat);
  CHECK((v - oracle).norm() < 1e-10 * oracle.norm());
}

TEST_CASE("precoder normalization") {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(3, 1);
  v(0, 0) = 2.0;
  Eigen::MatrixXcd w = normalize_precoders(v);
  CHECK(w(0, 0) == cd(1.0, 0.0));
  const Eigen::MatrixXcd r = random_cmat(6, 4, 4);
  w = normalize_precoders(r);
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(w.col(k).norm() - 1.0) < 1e-12);
    const cd wv = w.col(k).dot(r.col(k));  // w^H v
    CHECK(std::abs(wv.imag()) < 1e-12);
    CHECK(wv.real() == doctest::Approx(r.col(k).norm()).epsilon(1e-12));
  }
  CHECK_THROWS(normalize_precoders(Eigen::MatrixXcd::Zero(2, 1)));
}

TEST_CASE("accumulator on deterministic inputs") {
  SUBCASE("unit scalar channel") {
    HardeningAccumulator acc(1);
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = 0; i < 7; ++i) acc.add(one, one);
    const auto ul = acc.uplink();
    CHECK(ul.a(0) == doctest::Approx(1.0));
    CHECK(ul.b(0, 0) == doctest::Approx(1.0));
    CHECK(ul.c(0) == doctest::Approx(1.0));
  }
  SUBCASE("fixed channel, fixed combiner") {
    const Eigen::MatrixXcd h = random_cmat(4, 2, 5), v = random_cmat(4, 2, 6);
    HardeningAccumulator acc(2);
    for (int i = 0; i < 3; ++i) acc.add(h, v);
    const auto ul = acc.uplink();
    for (int k = 0; k < 2; ++k) {
      CHECK(ul.a(k) == doctest::Approx(std::norm(v.col(k).dot(h.col(k)))));
      CHECK(ul.c(k) == doctest::Approx(v.col(k).squaredNorm()));
      for (int i = 0; i < 2; ++i) CHECK(ul.b(k, i) == doctest::Approx(std::norm(v.col(k).dot(h.col(i)))));
    }
    const auto dl = acc.downlink();
    const Eigen::MatrixXcd w = normalize_precoders(v);
    for (int k = 0; k < 2; ++k) {
      CHECK(dl.a_bar(k) == doctest::Approx(std::norm(h.col(k).dot(w.col(k)))));
      for (int i = 0; i < 2; ++i) CHECK(dl.b_bar(k, i) == doctest::Approx(std::norm(h.col(k).dot(w.col(i)))));
    }
  }
  SUBCASE("relabeling UEs permutes the coefficients") {
    HardeningAccumulator a(3), b(3);
    const Eigen::Vector3i perm(2, 0, 1);
    for (int r = 0; r < 5; ++r) {
      const Eigen::MatrixXcd h = random_cmat(4, 3, 10 + r), v = random_cmat(4, 3, 20 + r);
      Eigen::MatrixXcd hp(4, 3), vp(4, 3);
      for (int k = 0; k < 3; ++k) {
        hp.col(k) = h.col(perm(k));
        vp.col(k) = v.col(perm(k));
      }
      a.add(h, v);
      b.add(hp, vp);
    }
    const auto ua = a.uplink(), ub = b.uplink();
    const auto da = a.downlink(), db = b.downlink();
    for (int k = 0; k < 3; ++k) {
      CHECK(ub.a(k) == doctest::Approx(ua.a(perm(k))));
      CHECK(ub.c(k) == doctest::Approx(ua.c(perm(k))));
      CHECK(db.a_bar(k) == doctest::Approx(da.a_bar(perm(k))));
      for (int i = 0; i < 3; ++i) {
        CHECK(ub.b(k, i) == doctest::Approx(ua.b(perm(k), perm(i))));
        CHECK(db.b_bar(k, i) == doctest::Approx(da.b_bar(perm(k), perm(i))));
      }
    }
  }
}

TEST_CASE("single-UE MR hardening matches the closed form") {
  // With zero filter powers v = hhat / sigma2, and for R = beta I, Phi = phi I:
  //   SINR = p (tr Phi)^2 / (p tr(Phi R) + sigma2 tr Phi).
  const int N = 3;
  const double beta = 2.0, sigma2 = 0.5, p = 1.5;
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = beta;
  const ChannelStats st = make_stats(b, N, sigma2, 1.0);
  const double phi = st.Phi(0, 0)(0, 0).real();
  const double closed = p * std::pow(N * phi, 2) / (p * N * phi * beta + sigma2 * N * phi);

  const int n_mc = 20000;
  const auto [ul, dl] = mc_hardening(st, Eigen::VectorXd::Zero(1), n_mc, 8);
  const double mc = sinr_ul(Eigen::VectorXd::Constant(1, p), ul, sigma2)(0);

  // Standard error by independent replications.
  std::vector<double> reps;
  for (std::uint64_t s = 0; s < 8; ++s) {
    const auto [u, d] = mc_hardening(st, Eigen::VectorXd::Zero(1), n_mc, 100 + s);
    reps.push_back(sinr_ul(Eigen::VectorXd::Constant(1, p), u, sigma2)(0));
  }
  const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / reps.size();
  double var = 0.0;
  for (double r : reps) var += (r - mean) * (r - mean);
  const double se = std::sqrt(var / (reps.size() - 1));
  CHECK(std::abs(mc - closed) < 3 * se + 1e-12);
  CHECK(se < 0.02 * closed);
}

TEST_CASE("Monte-Carlo coefficients converge") {
  Eigen::MatrixXd beta(2, 2);
  beta << 1.0, 0.2, 0.3, 0.8;
  const double sigma2 = 0.1;
  const ChannelStats st = make_stats(beta, 2, sigma2, 1.0);
  const Eigen::VectorXd pf = Eigen::VectorXd::Ones(2);
  const auto [ul_big, dl_big] = mc_hardening(st, pf, 100000, 1);
  std::vector<HardeningCoeffsUL> small;
  for (std::uint64_t s = 0; s < 10; ++s) small.push_back(mc_hardening(st, pf, 10000, 50 + s).first);
  auto check = [&](auto get) {
    std::vector<double> v;
    for (const auto& c : small) v.push_back(get(c));
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double se_small = std::sqrt(var / (v.size() - 1));
    const double se = se_small * std::sqrt(1.0 + 0.1);
    CHECK(std::abs(get(small[0]) - get(ul_big)) <= 3 * se + 1e-15);
  };
  check([](const HardeningCoeffsUL& c) { return c.a(0); });
  check([](const HardeningCoeffsUL& c) { return c.a(1); });
  check([](const HardeningCoeffsUL& c) { return c.b(0, 1); });
  check([](const HardeningCoeffsUL& c) { return c.c(1); });
}

TEST_CASE("hardening coefficients satisfy Jensen and positivity") {
  Eigen::MatrixXd beta(3, 4);
  beta << 1, 0.1, 0.01, 0.5, 0.2, 2, 0.3, 0.05, 0.7, 0.7, 0.7, 0.7;
  const double sigma2 = 0.05;
  const ChannelStats st = make_stats(beta, 2, sigma2, 1.0);
  const auto [ul, dl] = mc_hardening(st, Eigen::VectorXd::Ones(3), 300, 4);
  for (int k = 0; k < 3; ++k) {
    CHECK(ul.a(k) >= 0.0);
    CHECK(ul.b(k, k) >= ul.a(k));
    CHECK(ul.c(k) > 0.0);
    CHECK(dl.b_bar(k, k) >= dl.a_bar(k));
    CHECK((ul.b.row(k).array() >= 0).all());
  }
  const auto [ul2, dl2] = mc_hardening(st, Eigen::VectorXd::Ones(3), 300, 4);
  CHECK(ul.b == ul2.b);
  CHECK(dl.b_bar == dl2.b_bar);
}

TEST_CASE("SINR formulas") {
  HardeningCoeffsUL u;
  u.a = Eigen::VectorXd::Constant(1, 2.0);
  u.b = Eigen::MatrixXd::Constant(1, 1, 2.5);
  u.c = Eigen::VectorXd::Constant(1, 1.0);
  CHECK(sinr_ul(Eigen::VectorXd::Constant(1, 4.0), u, 1.0)(0) == doctest::Approx(8.0 / 3.0));
  CHECK(sinr_ul(Eigen::VectorXd::Zero(1), u, 1.0)(0) == 0.0);

  HardeningCoeffsDL d;
  d.a_bar = Eigen::VectorXd::Constant(1, 1.0);
  d.b_bar = Eigen::MatrixXd::Constant(1, 1, 1.5);
  CHECK(sinr_dl(Eigen::VectorXd::Constant(1, 2.0), d, 1.0)(0) == doctest::Approx(1.0));
  CHECK(sinr_dl(Eigen::VectorXd::Zero(1), d, 1.0)(0) == 0.0);

  // Noise-free homogeneity.
  HardeningCoeffsUL u2;
  u2.a = Eigen::Vector2d(1.0, 2.0);
  u2.b = (Eigen::Matrix2d() << 1.5, 0.3, 0.4, 2.5).finished();
  u2.c = Eigen::Vector2d::Zero();
  const Eigen::Vector2d p(1.0, 3.0);
  CHECK((sinr_ul(p, u2, 1.0) - sinr_ul(7.0 * p, u2, 1.0)).norm() < 1e-12);

  // Symmetric instance, equal powers.
  HardeningCoeffsDL d2;
  d2.a_bar = Eigen::Vector2d(1.0, 1.0);
  d2.b_bar = (Eigen::Matrix2d() << 1.2, 0.4, 0.4, 1.2).finished();
  const Eigen::VectorXd s = sinr_dl(Eigen::Vector2d(2.0, 2.0), d2, 0.3);
  CHECK(s(0) == doctest::Approx(s(1)));

  // Invalid coefficients make a nonpositive denominator.
  u.b(0, 0) = 0.5;
  u.c(0) = 0.0;
  CHECK_THROWS(sinr_ul(Eigen::VectorXd::Constant(1, 1.0), u, 1.0));
}

TEST_CASE("SINR monotonicity in powers") {
  Eigen::MatrixXd beta(3, 3);
  beta << 1, 0.1, 0.2, 0.3, 1, 0.1, 0.2, 0.3, 1;
  const ChannelStats st = make_stats(beta, 2, 0.1, 1.0);
  const auto [ul, dl] = mc_hardening(st, Eigen::VectorXd::Ones(3), 200, 2);
  const Eigen::Vector3d p(1.0, 0.5, 2.0);
  const Eigen::VectorXd su = sinr_ul(p, ul, 0.1), sd = sinr_dl(p, dl, 0.1);
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d q = p;
    q(i) *= 1.5;
    const Eigen::VectorXd tu = sinr_ul(q, ul, 0.1), td = sinr_dl(q, dl, 0.1);
    for (int k = 0; k < 3; ++k) {
      if (k == i) {
        CHECK(tu(k) >= su(k));
        CHECK(td(k) >= sd(k));
      } else {
        CHECK(tu(k) <= su(k) + 1e-15);
        CHECK(td(k) <= sd(k) + 1e-15);
      }
    }
  }
}

TEST_CASE("SE from SINR") {
  CHECK(se_from_sinr(Eigen::VectorXd::Constant(1, 1.0), 0.475)(0) == doctest::Approx(0.475));
  CHECK(se_from_sinr(Eigen::VectorXd::Zero(1), 0.5)(0) == 0.0);
  CHECK(se_from_sinr(Eigen::VectorXd::Constant(1, 3.0), 1.0)(0) == doctest::Approx(2.0));
  CHECK(tau_split(200, 10).prelog_ul() == doctest::Approx(0.475));
}
