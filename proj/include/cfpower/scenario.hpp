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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cfpower {

/// Deployment and radio parameters shared by every scenario.
struct NetworkConfig {
  double area_side = 500.0;          // m
  int antennas = 4;                  // N per AP
  double p_ul_max_mw = 100.0;        // per UE
  double p_dl_max_per_ap_mw = 200.0; // per AP
  int tau_c = 200;                   // channel uses per coherence block
  double carrier_ghz = 2.0;
  double pathloss_exponent = 3.67;
  double pathloss_intercept_db = -30.5;  // at 1 m
  double height_diff_m = 10.0;
  double shadow_var_db = 4.0;        // dB^2
  double shadow_decorr_m = 9.0;
  double bandwidth_hz = 2e7;
  double noise_figure_db = 7.0;
  std::string correlation = "uncorrelated";  // or "local-scattering"
  double asd_deg = 10.0;             // used by local-scattering only

  void validate() const;

  double sigma2_mw() const;
  double dl_budget_mw(int num_aps) const { return num_aps * p_dl_max_per_ap_mw; }
};

void to_json(nlohmann::json& j, const NetworkConfig& cfg);
void from_json(const nlohmann::json& j, NetworkConfig& cfg);

/// Reads a config file; keys that are absent keep their defaults.
NetworkConfig load_network_config(const std::string& path);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Scenario {
  int K = 0;
  int L = 0;
  std::vector<Point> ue;
  std::vector<Point> ap;
  std::uint64_t seed = 0;
  bool operator==(const Scenario&) const = default;
};

/// Large-scale fading indexed (UE k, AP l).
struct LargeScaleTable {
  Eigen::MatrixXd beta;
  Eigen::MatrixXd beta_db;
  Eigen::MatrixXd shadow_db;
};

struct CoherenceSplit {
  int tau_c = 0;
  int tau_p = 0;
  int tau_u = 0;
  int tau_d = 0;

  double prelog_ul() const { return static_cast<double>(tau_u) / tau_c; }
  double prelog_dl() const { return static_cast<double>(tau_d) / tau_c; }
};

Scenario sample_scenario(const NetworkConfig& cfg, int K, int L, std::uint64_t seed);

double pathloss_db(double d3d_m, const NetworkConfig& cfg);

double distance_3d(const Point& a, const Point& b, double height_diff_m);

/// K x L matrix of shadowing terms in dB, spatially correlated across UEs
/// with covariance var * 2^(-d/decorr) and independent across APs.
Eigen::MatrixXd sample_shadowing(const std::vector<Point>& ue, int L,
                                 double shadow_var_db, double decorr_m,
                                 std::uint64_t seed);

double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

CoherenceSplit tau_split(int tau_c, int K);

LargeScaleTable large_scale_fading(const Scenario& scenario, const NetworkConfig& cfg);

}  // namespace cfpower
