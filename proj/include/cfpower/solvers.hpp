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

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cfpower/scenario.hpp"
#include "cfpower/se_engine.hpp"

namespace cfpower {

struct SolverOptions {
  double bisect_tol = 1e-6;  // relative width of the final SINR bracket
  double fp_tol = 1e-10;     // relative step size that ends the fixed point
  int max_iter = 500;        // fixed-point iterations per feasibility test

  void validate() const;
};

/// Per-UE cap (uplink) or a total budget (downlink).
struct PowerConstraint {
  enum class Kind { kPerUser, kSumBudget };
  Kind kind = Kind::kPerUser;
  double cap = 0.0;  // mW

  static PowerConstraint per_user(double p_max) { return {Kind::kPerUser, p_max}; }
  static PowerConstraint sum_budget(double budget) { return {Kind::kSumBudget, budget}; }

  /// max_k p_k or sum_k p_k, whichever the constraint limits.
  double usage(const Eigen::VectorXd& p) const;
  bool satisfied(const Eigen::VectorXd& p, double rel_tol = 0.0) const;
};

/// Common form of both directions:
///   SINR_k = p_k g_k / (sum_i B_ki p_i - p_k g_k + n_k).
/// Uplink: g = a, B = b, n = sigma2 c. Downlink: g = a_bar, B = b_bar, n = sigma2.
struct LinkCoefficients {
  Eigen::VectorXd gain;
  Eigen::MatrixXd cross;
  Eigen::VectorXd noise;

  static LinkCoefficients uplink(const HardeningCoeffsUL& c, double sigma2);
  static LinkCoefficients downlink(const HardeningCoeffsDL& c, double sigma2);

  int size() const { return static_cast<int>(gain.size()); }
  Eigen::VectorXd sinr(const Eigen::VectorXd& p) const;
};

struct FixedPointResult {
  enum class Status { kConverged, kExceeded, kInfeasible, kMaxIter };
  Status status = Status::kInfeasible;
  Eigen::VectorXd p;
  int iterations = 0;
};

/// Standard-interference-function iteration
///   p_k <- t (sum_i B_ki p_i - p_k g_k + n_k) / g_k
/// from p = 0. The iterates are nondecreasing, so the run stops with
/// kExceeded as soon as `limit` is violated. kInfeasible means some g_k = 0.
FixedPointResult feasibility_fixed_point(double t, const LinkCoefficients& link,
                                         const PowerConstraint& limit, const SolverOptions& opts);

/// Divergence-monitored form: the limit is 1e6 times the constraint scale.
FixedPointResult feasibility_fixed_point(double t, const LinkCoefficients& link, double scale,
                                         const SolverOptions& opts);

/// Minimal powers achieving SINR t for every UE by a dense solve of
/// (I - t D) p = t r. Empty when no nonnegative solution exists, which is
/// exactly the case spectral_radius(t D) >= 1.
std::optional<Eigen::VectorXd> minimal_power_direct(double t, const LinkCoefficients& link);

struct PowerSolution {
  PowerVector power;
  Eigen::VectorXd sinr;
  double t_star = 0.0;
  double min_se = 0.0;
  int iterations = 0;       // fixed-point iterations summed over the bisection
  int bisection_steps = 0;
  bool converged = false;
  std::string active_constraint;
};

PowerSolution maxmin(const LinkCoefficients& link, const PowerConstraint& constraint,
                     Direction direction, double prelog, const SolverOptions& opts = {});

PowerSolution maxmin_ul(const HardeningCoeffsUL& coeffs, double sigma2, double p_max,
                        const CoherenceSplit& split, const SolverOptions& opts = {});

PowerSolution maxmin_dl(const HardeningCoeffsDL& coeffs, double sigma2, double budget,
                        const CoherenceSplit& split, const SolverOptions& opts = {});

/// Exhaustive grid oracle for K <= 3 over the boundary of the feasible set:
/// one UE at the cap (UL) or the full-budget simplex (DL).
PowerSolution brute_force_maxmin(const LinkCoefficients& link, const PowerConstraint& constraint,
                                 Direction direction, double prelog, int grid_n);

/// Equal power: full power per UE (UL) or an equal split of L * P_dl (DL).
PowerVector epa(Direction direction, int K, int L, const NetworkConfig& cfg);

/// Fractional power from aggregate gains beta_k = sum_l beta_kl, weights
/// beta_k^nu; max-normalized (UL) or sum-normalized to the budget (DL).
PowerVector fpa(const Eigen::MatrixXd& beta, double nu, Direction direction,
                const NetworkConfig& cfg);

nlohmann::json to_json(const PowerSolution& s);

}  // namespace cfpower
