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

#include "cfpower/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfpower {

void SolverOptions::validate() const {
  if (!(bisect_tol > 0.0) || !(fp_tol > 0.0) || max_iter < 1)
    throw std::invalid_argument("solver tolerances must be positive");
}

double PowerConstraint::usage(const Eigen::VectorXd& p) const {
  if (p.size() == 0) return 0.0;
  return kind == Kind::kPerUser ? p.maxCoeff() : p.sum();
}

bool PowerConstraint::satisfied(const Eigen::VectorXd& p, double rel_tol) const {
  return (p.array() >= 0.0).all() && usage(p) <= cap * (1.0 + rel_tol);
}

LinkCoefficients LinkCoefficients::uplink(const HardeningCoeffsUL& c, double sigma2) {
  return {c.a, c.b, sigma2 * c.c};
}

LinkCoefficients LinkCoefficients::downlink(const HardeningCoeffsDL& c, double sigma2) {
  return {c.a_bar, c.b_bar, Eigen::VectorXd::Constant(c.a_bar.size(), sigma2)};
}

Eigen::VectorXd LinkCoefficients::sinr(const Eigen::VectorXd& p) const {
  Eigen::VectorXd out(gain.size());
  for (Eigen::Index k = 0; k < gain.size(); ++k) {
    const double signal = p(k) * gain(k);
    const double denom = cross.row(k).dot(p) - signal + noise(k);
    if (!(denom > 0.0)) throw std::domain_error("sinr: non-positive denominator");
    out(k) = signal / denom;
  }
  return out;
}

namespace {

// Interference-plus-noise seen by each UE, normalized by its own gain.
Eigen::VectorXd normalized_interference(const LinkCoefficients& link, const Eigen::VectorXd& p) {
  Eigen::VectorXd q = link.cross * p;
  q.array() -= p.array() * link.gain.array();
  q += link.noise;
  return q.cwiseQuotient(link.gain);
}

}  // namespace

FixedPointResult feasibility_fixed_point(double t, const LinkCoefficients& link,
                                         const PowerConstraint& limit, const SolverOptions& opts) {
  if (!(t >= 0.0)) throw std::invalid_argument("fixed point: SINR target must be >= 0");
  const int K = link.size();
  FixedPointResult res;
  res.p = Eigen::VectorXd::Zero(K);
  if (t == 0.0) {
    res.status = FixedPointResult::Status::kConverged;
    return res;
  }
  if ((link.gain.array() <= 0.0).any()) {
    res.status = FixedPointResult::Status::kInfeasible;
    return res;
  }
  for (int it = 1; it <= opts.max_iter; ++it) {
    Eigen::VectorXd next = t * normalized_interference(link, res.p);
    res.iterations = it;
    const double step = (next - res.p).cwiseAbs().maxCoeff();
    res.p = std::move(next);
    if (limit.usage(res.p) > limit.cap || !res.p.allFinite()) {
      res.status = FixedPointResult::Status::kExceeded;
      return res;
    }
    if (step <= opts.fp_tol * res.p.cwiseAbs().maxCoeff()) {
      res.status = FixedPointResult::Status::kConverged;
      return res;
    }
  }
  res.status = FixedPointResult::Status::kMaxIter;
  return res;
}

FixedPointResult feasibility_fixed_point(double t, const LinkCoefficients& link, double scale,
                                         const SolverOptions& opts) {
  return feasibility_fixed_point(t, link, PowerConstraint::per_user(1e6 * scale), opts);
}

std::optional<Eigen::VectorXd> minimal_power_direct(double t, const LinkCoefficients& link) {
  const int K = link.size();
  if (t == 0.0) return Eigen::VectorXd::Zero(K);
  if ((link.gain.array() <= 0.0).any()) return std::nullopt;
  Eigen::MatrixXd m = -t * link.cross;
  for (int k = 0; k < K; ++k) {
    m.row(k) /= link.gain(k);
    m(k, k) += 1.0 + t;  // the -p_k g_k term cancels one diagonal share
  }
  const Eigen::VectorXd rhs = t * link.noise.cwiseQuotient(link.gain);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd p = lu.solve(rhs);
  if (!p.allFinite()) return std::nullopt;
  const double scale = p.cwiseAbs().maxCoeff();
  if ((p.array() < -1e-12 * scale).any()) return std::nullopt;
  // Reject a numerically singular system whose residual is not small.
  if ((m * p - rhs).norm() > 1e-8 * rhs.norm()) return std::nullopt;
  return p.cwiseMax(0.0);
}

PowerSolution maxmin(const LinkCoefficients& link, const PowerConstraint& constraint,
                     Direction direction, double prelog, const SolverOptions& opts) {
  opts.validate();
  const int K = link.size();
  if (K < 1) throw std::invalid_argument("maxmin: no users");
  if (!(constraint.cap > 0.0)) throw std::invalid_argument("maxmin: power cap must be positive");
  if ((link.cross.array() < 0.0).any() || (link.gain.array() < 0.0).any() ||
      (link.noise.array() < 0.0).any())
    throw std::invalid_argument("maxmin: coefficients must be non-negative");

  PowerSolution sol;
  sol.power.direction = direction;

  if ((link.gain.array() <= 0.0).any()) {
    // Some UE cannot be served: the max-min value is zero.
    sol.power.p = Eigen::VectorXd::Constant(
        K, constraint.kind == PowerConstraint::Kind::kPerUser ? constraint.cap : constraint.cap / K);
    sol.sinr = link.sinr(sol.power.p);
    sol.active_constraint = "degenerate: zero channel gain";
    sol.converged = false;
    return sol;
  }

  int fp_iterations = 0;
  auto feasible = [&](double t, Eigen::VectorXd& p_out) {
    FixedPointResult fp = feasibility_fixed_point(t, link, constraint, opts);
    fp_iterations += fp.iterations;
    switch (fp.status) {
      case FixedPointResult::Status::kConverged:
        p_out = std::move(fp.p);
        return true;
      case FixedPointResult::Status::kExceeded:
      case FixedPointResult::Status::kInfeasible:
        return false;
      case FixedPointResult::Status::kMaxIter:
        break;
    }
    // Slow contraction: settle feasibility with the exact M-matrix test.
    auto direct = minimal_power_direct(t, link);
    if (!direct || constraint.usage(*direct) > constraint.cap) return false;
    p_out = std::move(*direct);
    return true;
  };

  // Interference-free bound on any UE's SINR at the cap.
  double t_hi = 0.0;
  for (int k = 0; k < K; ++k) {
    const double bound = link.noise(k) > 0.0 ? constraint.cap * link.gain(k) / link.noise(k)
                                             : std::numeric_limits<double>::max() / 4;
    t_hi = std::max(t_hi, bound);
  }
  Eigen::VectorXd p_lo = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd scratch;
  double t_lo = 0.0;
  for (int grow = 0; grow < 64 && feasible(t_hi, scratch); ++grow) {
    t_lo = t_hi;
    p_lo = scratch;
    t_hi *= 2.0;
  }

  constexpr int kMaxBisection = 200;
  int steps = 0;
  while (t_hi - t_lo > opts.bisect_tol * t_hi && steps < kMaxBisection) {
    const double t = 0.5 * (t_lo + t_hi);
    if (feasible(t, scratch)) {
      t_lo = t;
      p_lo = scratch;
    } else {
      t_hi = t;
    }
    ++steps;
  }
  const bool bracketed = t_hi - t_lo <= opts.bisect_tol * t_hi && t_lo > 0.0;

  // Direct-solve polish: equal SINRs, constraint met with equality.
  if (bracketed) {
    if (auto p = minimal_power_direct(t_lo, link); p && constraint.usage(*p) <= constraint.cap)
      p_lo = *p;
    for (int i = 0; i < 100 && t_hi - t_lo > 4 * std::numeric_limits<double>::epsilon() * t_hi;
         ++i) {
      const double t = 0.5 * (t_lo + t_hi);
      auto p = minimal_power_direct(t, link);
      if (p && constraint.usage(*p) <= constraint.cap) {
        t_lo = t;
        p_lo = std::move(*p);
      } else {
        t_hi = t;
      }
    }
    const double used = constraint.usage(p_lo);
    if (used > 0.0) p_lo *= constraint.cap / used;
  }

  sol.power.p = p_lo;
  sol.sinr = link.sinr(p_lo);
  sol.t_star = sol.sinr.minCoeff();
  sol.min_se = prelog * std::log2(1.0 + sol.t_star);
  sol.iterations = fp_iterations;
  sol.bisection_steps = steps;
  sol.converged = bracketed;
  if (constraint.kind == PowerConstraint::Kind::kPerUser) {
    Eigen::Index k_max = 0;
    p_lo.maxCoeff(&k_max);
    sol.active_constraint = "per-UE cap at UE " + std::to_string(k_max);
  } else {
    sol.active_constraint = "sum budget";
  }
  return sol;
}

PowerSolution maxmin_ul(const HardeningCoeffsUL& coeffs, double sigma2, double p_max,
                        const CoherenceSplit& split, const SolverOptions& opts) {
  return maxmin(LinkCoefficients::uplink(coeffs, sigma2), PowerConstraint::per_user(p_max),
                Direction::kUplink, split.prelog_ul(), opts);
}

PowerSolution maxmin_dl(const HardeningCoeffsDL& coeffs, double sigma2, double budget,
                        const CoherenceSplit& split, const SolverOptions& opts) {
  return maxmin(LinkCoefficients::downlink(coeffs, sigma2), PowerConstraint::sum_budget(budget),
                Direction::kDownlink, split.prelog_dl(), opts);
}

PowerSolution brute_force_maxmin(const LinkCoefficients& link, const PowerConstraint& constraint,
                                 Direction direction, double prelog, int grid_n) {
  const int K = link.size();
  if (K < 1 || K > 3) throw std::invalid_argument("brute force oracle supports 1 <= K <= 3");
  if (grid_n < 1) throw std::invalid_argument("brute force oracle needs grid_n >= 1");
  const double cap = constraint.cap;
  const double step = cap / grid_n;

  double best = -1.0;
  Eigen::VectorXd best_p = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd p(K);
  auto consider = [&] {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const double signal = p(k) * link.gain(k);
      const double denom = link.cross.row(k).dot(p) - signal + link.noise(k);
      worst = std::min(worst, denom > 0.0 ? signal / denom : 0.0);
      if (worst <= best) return;
    }
    best = worst;
    best_p = p;
  };

  if (constraint.kind == PowerConstraint::Kind::kPerUser) {
    // Faces of the box where UE j transmits at the cap.
    const int free = K - 1;
    long total = 1;
    for (int d = 0; d < free; ++d) total *= grid_n + 1;
    for (int j = 0; j < K; ++j) {
      for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int k = 0, d = 0; k < K; ++k) {
          if (k == j) {
            p(k) = cap;
          } else {
            p(k) = static_cast<double>(rem % (grid_n + 1)) * step;
            rem /= grid_n + 1;
            ++d;
          }
        }
        consider();
      }
    }
  } else {
    if (K == 1) {
      p(0) = cap;
      consider();
    } else if (K == 2) {
      for (int i = 0; i <= grid_n; ++i) {
        p(0) = i * step;
        p(1) = (grid_n - i) * step;
        consider();
      }
    } else {
      for (int i = 0; i <= grid_n; ++i) {
        for (int j = 0; i + j <= grid_n; ++j) {
          p(0) = i * step;
          p(1) = j * step;
          p(2) = (grid_n - i - j) * step;
          consider();
        }
      }
    }
  }

  PowerSolution sol;
  sol.power = {direction, best_p};
  sol.sinr = link.sinr(best_p);
  sol.t_star = sol.sinr.minCoeff();
  sol.min_se = prelog * std::log2(1.0 + sol.t_star);
  sol.converged = true;
  sol.active_constraint = "grid search";
  return sol;
}

PowerVector epa(Direction direction, int K, int L, const NetworkConfig& cfg) {
  if (K < 1) throw std::invalid_argument("epa needs K >= 1");
  if (direction == Direction::kUplink)
    return {direction, Eigen::VectorXd::Constant(K, cfg.p_ul_max_mw)};
  return {direction, Eigen::VectorXd::Constant(K, cfg.dl_budget_mw(L) / K)};
}

PowerVector fpa(const Eigen::MatrixXd& beta, double nu, Direction direction,
                const NetworkConfig& cfg) {
  if ((beta.array() <= 0.0).any()) throw std::invalid_argument("fpa needs positive gains");
  const Eigen::VectorXd aggregate = beta.rowwise().sum();
  const Eigen::VectorXd w = aggregate.array().pow(nu).matrix();
  if (direction == Direction::kUplink)
    return {direction, cfg.p_ul_max_mw * w / w.maxCoeff()};
  const int L = static_cast<int>(beta.cols());
  return {direction, cfg.dl_budget_mw(L) * w / w.sum()};
}

nlohmann::json to_json(const PowerSolution& s) {
  return {{"direction", to_string(s.power.direction)},
          {"p_mw", std::vector<double>(s.power.p.data(), s.power.p.data() + s.power.p.size())},
          {"sinr", std::vector<double>(s.sinr.data(), s.sinr.data() + s.sinr.size())},
          {"t_star", s.t_star},
          {"min_se", s.min_se},
          {"iterations", s.iterations},
          {"bisection_steps", s.bisection_steps},
          {"converged", s.converged},
          {"active_constraint", s.active_constraint}};
}

}  // namespace cfpower
