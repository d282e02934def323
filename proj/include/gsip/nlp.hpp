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

#ifndef GSIP_NLP_HPP
#define GSIP_NLP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <string_view>
#include <vector>

#include "gsip/core.hpp"

namespace gsip
{
  /// min f(z)  s.t.  c(z) <= 0,  lower <= z <= upper.
  ///
  /// Equalities are not supported; encode them as opposed inequality pairs.
  struct SmoothProgram
  {
    Index n = 0;
    std::function<double(const Vector &)> objective;
    std::function<Vector(const Vector &)> ineq_constraints; // empty: unconstrained
    Vector lower;
    Vector upper;

    // Optional analytic derivatives; central differences otherwise.
    std::function<Vector(const Vector &)> objective_gradient;
    std::function<Matrix(const Vector &)> constraint_jacobian;

    // Optional fused evaluators. When set they take precedence over the
    // separate maps above (useful when f and c share an expensive simulation).
    std::function<std::pair<double, Vector>(const Vector &)> evaluate;
    std::function<std::pair<Vector, Matrix>(const Vector &)> differentiate;

    void validate() const;
  };

  struct SolverOptions
  {
    double feas_tol = 1e-6;
    double opt_tol = 1e-6;
    int max_outer = 50;
    int max_inner = 500;
    double penalty_init = 10.0;
    double penalty_growth = 10.0;
    int multistart_count = 8;
    std::uint64_t seed = 0;

    void validate() const;
  };

  enum class SolverStatus
  {
    Optimal,
    Infeasible,
    IterLimit,
    NumericalFailure,
  };

  std::string_view to_string(SolverStatus status);

  struct SolverOutcome
  {
    Vector z_star;
    double objective_value = 0.0;
    double max_violation = 0.0;
    SolverStatus status = SolverStatus::NumericalFailure;

    // diagnostics
    double stationarity = 0.0;
    int outer_rounds = 0;
    int inner_iterations = 0;
    int start_index = 0;
    /// max(0, max_violation - feas_tol) after every accepted outer round.
    std::vector<double> infeasibility_history;
  };

  struct FeasibilityOutcome
  {
    /// Smallest max_j max(c_j(z), 0) found over all starts.
    double residual = 0.0;
    Vector z;
    SolverStatus status = SolverStatus::NumericalFailure;

    bool feasible(const SolverOptions &opts) const { return residual <= opts.feas_tol; }
  };

  /// Default central-difference step for coordinate value z_i.
  inline double finite_diff_step(double zi) { return 1e-6 * (1.0 + std::abs(zi)); }

  /// Central differences; `h <= 0` selects the default per-coordinate step.
  Vector finite_diff_gradient(const std::function<double(const Vector &)> &fn, const Vector &z,
                              double h = 0.0);

  Matrix finite_diff_jacobian(const std::function<Vector(const Vector &)> &fn, const Vector &z,
                              double h = 0.0);

  /// Augmented Lagrangian on the inequalities with a projected quasi-Newton
  /// inner solver on the box. The start is clamped into the box.
  SolverOutcome minimize(const SmoothProgram &p, const Vector &start, const SolverOptions &opts);

  /// Start points used by the multistart routines: `first` (or the box
  /// midpoint), then points drawn uniformly in the box from the mt19937_64
  /// stream seeded with `opts.seed`.
  std::vector<Vector> multistart_points(const SmoothProgram &p, const SolverOptions &opts,
                                        const std::optional<Vector> &first = std::nullopt);

  /// Best Optimal outcome over the starts (lower objective, then
  /// lexicographically smaller z). Starts run concurrently.
  SolverOutcome multistart_minimize(const SmoothProgram &p, const SolverOptions &opts,
                                    const std::optional<Vector> &first = std::nullopt);

  /// Runs minimize from every start and keeps the best outcome.
  SolverOutcome minimize_from_starts(const SmoothProgram &p, std::span<const Vector> starts,
                                     const SolverOptions &opts, bool parallel = true);

  /// Serial reference for multistart_minimize; identical results.
  SolverOutcome multistart_minimize_serial(const SmoothProgram &p, const SolverOptions &opts,
                                           const std::optional<Vector> &first = std::nullopt);

  /// Minimizes the squared-hinge infeasibility over the starts and reports the
  /// smallest residual reached.
  FeasibilityOutcome feasibility_phase(const SmoothProgram &p, const SolverOptions &opts,
                                       const std::optional<Vector> &first = std::nullopt);

  /// Deterministic ordering used to pick the winner among several outcomes.
  bool better_outcome(const SolverOutcome &a, const SolverOutcome &b);

} // namespace gsip

#endif // GSIP_NLP_HPP
