/*
 Copyright 2026 The gsip Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef GSIP_QUADROTOR_HPP
#define GSIP_QUADROTOR_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gsip/core.hpp"

namespace gsip::quad
{
  /// Planar quadrotor with two rotors, open-loop thrust plan over N steps.
  struct QuadParams
  {
    double mass = 0.15;
    double inertia = 0.00125;
    double arm = 0.1;
    double gravity = 9.81;
    double sample_time = 0.2;
    int horizon = 10;
    double r_ref = 1.0;
    double s_ref = 2.0;
    Eigen::Matrix<double, 6, 1> x0 = Eigen::Matrix<double, 6, 1>::Zero();
    double v_lo = -2.0;
    double v_hi = 2.0;
    double uncert_frac = 0.05;
    double s_lo = 0.0;
    double s_hi = 2.5;
    /// Half-width of the decision-independent boxes used by SIP 1 and SIP 2.
    double union_bound = 0.1;
    /// Use |v| in the thrust-error bands instead of v. Off: negative reference
    /// thrusts give an empty admissible slice.
    bool magnitude_bands = false;

    void validate() const;
  };

  enum class VariantId
  {
    Esip,
    Sip1,
    Sip2,
    Rsip,
  };

  std::string_view to_string(VariantId id);
  VariantId variant_from_string(std::string_view name);

  using State = Eigen::Matrix<double, 6, 1>;

  /// Reference thrusts interleaved as (v1_1, v2_1, v1_2, v2_2, ...).
  struct ThrustPlan
  {
    Vector v;
  };

  /// Additive thrust errors (length 2N, interleaved like the plan), or the
  /// shared multiplicative errors w' (length N) for the RSIP variant.
  struct Disturbance
  {
    Vector w;
  };

  /// States (r, r_dot, s, s_dot, psi, psi_dot) at k = 0..N.
  struct Trajectory
  {
    std::vector<State> states;
  };

  struct Accelerations
  {
    double r_dd = 0.0;
    double s_dd = 0.0;
    double psi_dd = 0.0;
  };

  struct McReport
  {
    std::size_t samples = 0;
    double avg_cost = 0.0;
    double worst_cost = 0.0;
    std::size_t violation_count = 0;
    double gamma = 0.0;
  };

  Accelerations accelerations(const State &state, double u1, double u2, const QuadParams &p);

  /// Realized motor thrusts (length 2N) for a plan under a disturbance.
  Vector realized_thrusts(const ThrustPlan &plan, const Disturbance &dist, VariantId variant,
                          const QuadParams &p);

  /// Implicit midpoint rule with the step's thrust held at both stencil ends,
  /// resolved in closed form (psi_dot, psi, velocities, positions).
  Trajectory simulate(const ThrustPlan &plan, const Disturbance &dist, VariantId variant,
                      const QuadParams &p);

  Trajectory simulate_thrusts(const Vector &thrusts, const QuadParams &p);

  /// Residual of the implicit midpoint relation (6N rows), evaluated directly
  /// from the stencil and independent of simulate().
  Vector midpoint_residual(const Trajectory &traj, const Vector &thrusts, const QuadParams &p);

  double cost(const Trajectory &traj, const QuadParams &p);

  /// (-s_i, s_i - s_hi) for i = 1..N; feasible when every row <= 0.
  Vector path_constraint_rows(const Trajectory &traj, const QuadParams &p);

  /// Six rows per step in the h >= 0 convention: thrust-error bands for both
  /// rotors and the proportionality coupling split into two opposed rows.
  Vector uncertainty_rows(const ThrustPlan &plan, const Disturbance &dist, const QuadParams &p);

  struct VariantProblem
  {
    VariantId id = VariantId::Esip;
    GsipProblem problem;
    /// True when the admissible set depends on the decision (ESIP only).
    bool decision_dependent = false;
  };

  VariantProblem build_variant(VariantId id, const QuadParams &p = {});

  /// Disturbance drawn from the true decision-dependent set: w'_i uniform on
  /// [-frac, frac], then w_{1,i} = v_{1,i} w'_i and w_{2,i} = v_{2,i} w'_i.
  /// Sample `index` of stream `seed` is independent of every other index.
  Disturbance sample_disturbance(const ThrustPlan &plan, std::uint64_t seed, std::uint64_t index,
                                 const QuadParams &p);

  /// The multiplicative draw w' behind sample_disturbance.
  Vector sample_shared_error(std::uint64_t seed, std::uint64_t index, const QuadParams &p);

  /// Statistics of simulating `plan` under the given additive disturbances.
  McReport evaluate_disturbances(const ThrustPlan &plan, std::span<const Disturbance> dists,
                                 double gamma, const QuadParams &p);

  /// Monte Carlo over n samples of the true set. Samples run concurrently.
  McReport monte_carlo(const ThrustPlan &plan, std::size_t n, std::uint64_t seed, double gamma,
                       const QuadParams &p);

  /// Serial reference for monte_carlo; identical results.
  McReport monte_carlo_serial(const ThrustPlan &plan, std::size_t n, std::uint64_t seed,
                              double gamma, const QuadParams &p);

  /// Violation threshold used when counting constraint violations.
  inline constexpr double kViolationThreshold = 1e-9;

  /// CSV with header `sample_id,k,x1,...,x6`, one row per (sample, step),
  /// 17 significant digits.
  void export_trajectories(const std::filesystem::path &path, std::span<const Trajectory> trajectories);

  std::vector<Trajectory> read_trajectories(const std::filesystem::path &path);

} // namespace gsip::quad

#endif // GSIP_QUADROTOR_HPP
