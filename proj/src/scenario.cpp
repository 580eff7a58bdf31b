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

#include "cfpower/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include "cfpower/random.hpp"

namespace cfpower {

void NetworkConfig::validate() const {
  if (!(area_side > 0.0)) throw std::invalid_argument("area_side must be positive");
  if (antennas < 1) throw std::invalid_argument("antennas per AP must be >= 1");
  if (!(p_ul_max_mw > 0.0) || !(p_dl_max_per_ap_mw > 0.0))
    throw std::invalid_argument("power limits must be positive");
  if (tau_c < 2) throw std::invalid_argument("tau_c must be >= 2");
  if (!(shadow_decorr_m > 0.0)) throw std::invalid_argument("shadow_decorr_m must be positive");
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be positive");
  if (!(height_diff_m >= 0.0)) throw std::invalid_argument("height_diff_m must be >= 0");
  if (!(shadow_var_db >= 0.0)) throw std::invalid_argument("shadow_var_db must be >= 0");
  if (correlation != "uncorrelated" && correlation != "local-scattering")
    throw std::invalid_argument("unknown correlation model: " + correlation);
}

double NetworkConfig::sigma2_mw() const {
  return dbm_to_mw(noise_power_dbm(bandwidth_hz, noise_figure_db));
}

void to_json(nlohmann::json& j, const NetworkConfig& cfg) {
  j = nlohmann::json{{"area_side", cfg.area_side},
                     {"antennas", cfg.antennas},
                     {"p_ul_max_mw", cfg.p_ul_max_mw},
                     {"p_dl_max_per_ap_mw", cfg.p_dl_max_per_ap_mw},
                     {"tau_c", cfg.tau_c},
                     {"carrier_ghz", cfg.carrier_ghz},
                     {"pathloss_exponent", cfg.pathloss_exponent},
                     {"pathloss_intercept_db", cfg.pathloss_intercept_db},
                     {"height_diff_m", cfg.height_diff_m},
                     {"shadow_var_db", cfg.shadow_var_db},
                     {"shadow_decorr_m", cfg.shadow_decorr_m},
                     {"bandwidth_hz", cfg.bandwidth_hz},
                     {"noise_figure_db", cfg.noise_figure_db},
                     {"correlation", cfg.correlation},
                     {"asd_deg", cfg.asd_deg}};
}

void from_json(const nlohmann::json& j, NetworkConfig& cfg) {
  const NetworkConfig d;
  cfg.area_side = j.value("area_side", d.area_side);
  cfg.antennas = j.value("antennas", d.antennas);
  cfg.p_ul_max_mw = j.value("p_ul_max_mw", d.p_ul_max_mw);
  cfg.p_dl_max_per_ap_mw = j.value("p_dl_max_per_ap_mw", d.p_dl_max_per_ap_mw);
  cfg.tau_c = j.value("tau_c", d.tau_c);
  cfg.carrier_ghz = j.value("carrier_ghz", d.carrier_ghz);
  cfg.pathloss_exponent = j.value("pathloss_exponent", d.pathloss_exponent);
  cfg.pathloss_intercept_db = j.value("pathloss_intercept_db", d.pathloss_intercept_db);
  cfg.height_diff_m = j.value("height_diff_m", d.height_diff_m);
  cfg.shadow_var_db = j.value("shadow_var_db", d.shadow_var_db);
  cfg.shadow_decorr_m = j.value("shadow_decorr_m", d.shadow_decorr_m);
  cfg.bandwidth_hz = j.value("bandwidth_hz", d.bandwidth_hz);
  cfg.noise_figure_db = j.value("noise_figure_db", d.noise_figure_db);
  cfg.correlation = j.value("correlation", d.correlation);
  cfg.asd_deg = j.value("asd_deg", d.asd_deg);
}

NetworkConfig load_network_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  NetworkConfig cfg = nlohmann::json::parse(in).get<NetworkConfig>();
  cfg.validate();
  return cfg;
}

Scenario sample_scenario(const NetworkConfig& cfg, int K, int L, std::uint64_t seed) {
  if (K < 1 || L < 1) throw std::invalid_argument("scenario needs K >= 1 and L >= 1");
  cfg.validate();
  auto rng = make_rng(seed, stream::kPlacement);
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side);
  Scenario s;
  s.K = K;
  s.L = L;
  s.seed = seed;
  s.ue.resize(K);
  s.ap.resize(L);
  for (auto& p : s.ue) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  for (auto& p : s.ap) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  return s;
}

double pathloss_db(double d3d_m, const NetworkConfig& cfg) {
  return cfg.pathloss_intercept_db - 10.0 * cfg.pathloss_exponent * std::log10(d3d_m);
}

double distance_3d(const Point& a, const Point& b, double height_diff_m) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy + height_diff_m * height_diff_m);
}

Eigen::MatrixXd sample_shadowing(const std::vector<Point>& ue, int L, double shadow_var_db,
                                 double decorr_m, std::uint64_t seed) {
  if (!(decorr_m > 0.0)) throw std::invalid_argument("decorrelation distance must be positive");
  if (L < 1) throw std::invalid_argument("shadowing needs L >= 1");
  const int K = static_cast<int>(ue.size());
  Eigen::MatrixXd cov(K, K);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < K; ++i) {
      const double d = std::hypot(ue[k].x - ue[i].x, ue[k].y - ue[i].y);
      cov(k, i) = shadow_var_db * std::exp2(-d / decorr_m);
    }
  }
  // Symmetric square root through the eigendecomposition; co-located UEs make
  // the covariance singular, which Cholesky would reject.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("shadowing covariance eigensolve failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  if (lambda.minCoeff() < -1e-9 * scale)
    throw std::runtime_error("shadowing covariance is not positive semi-definite");
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd factor = eig.eigenvectors() * lambda.asDiagonal();

  auto rng = make_rng(seed, stream::kShadowing);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd white(K, L);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) white(k, l) = gauss(rng);
  return factor * white;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

CoherenceSplit tau_split(int tau_c, int K) {
  if (K < 1) throw std::invalid_argument("tau_split needs K >= 1");
  if (K >= tau_c)
    throw std::invalid_argument("coherence block overloaded: K must be below tau_c");
  CoherenceSplit s;
  s.tau_c = tau_c;
  s.tau_p = K;
  s.tau_u = (tau_c - K) / 2;
  s.tau_d = tau_c - s.tau_p - s.tau_u;
  return s;
}

LargeScaleTable large_scale_fading(const Scenario& scenario, const NetworkConfig& cfg) {
  LargeScaleTable t;
  t.shadow_db = sample_shadowing(scenario.ue, scenario.L, cfg.shadow_var_db,
                                 cfg.shadow_decorr_m, scenario.seed);
  t.beta_db.resize(scenario.K, scenario.L);
  for (int k = 0; k < scenario.K; ++k) {
    for (int l = 0; l < scenario.L; ++l) {
      const double d = distance_3d(scenario.ue[k], scenario.ap[l], cfg.height_diff_m);
      t.beta_db(k, l) = pathloss_db(d, cfg) + t.shadow_db(k, l);
    }
  }
  t.beta = t.beta_db.unaryExpr([](double db) { return std::pow(10.0, db / 10.0); });
  return t;
}

}  // namespace cfpower
