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

#ifndef GSIP_CORE_HPP
#define GSIP_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gsip
{
  using Vector = Eigen::VectorXd;
  using Matrix = Eigen::MatrixXd;
  using Index = Eigen::Index;

  /// Raised when a caller breaks a documented precondition (dimensions,
  /// bounds, option ranges).
  class ContractViolation : public std::logic_error
  {
  public:
    using std::logic_error::logic_error;
  };

  /// Raised when an evaluator produces a non-finite value.
  class NumericalFailure : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// How the "w is not admissible" branch aggregates the admissibility rows.
  ///
  /// `PaperMax` requires every row to be negative (max over rows), which is the
  /// literal row aggregation. `LogicalMin` requires at least one negative row
  /// (min over rows), the exact negation of membership in the admissible set.
  enum class NegationMode
  {
    PaperMax,
    LogicalMin,
  };

  std::string_view to_string(NegationMode mode);
  NegationMode negation_mode_from_string(std::string_view name);

  /// Values of the reduced maps (u, w) -> J, g, h after the forward
  /// simulation has been substituted for x.
  struct ReducedValues
  {
    double cost = 0.0;
    Vector g;
    Vector h;
  };

  /// Jacobians of the stacked reduced vector [J; g; h] with respect to u and w.
  struct ReducedJacobian
  {
    ReducedValues values;
    Matrix d_du; ///< (1 + n_g + n_h) x n_u
    Matrix d_dw; ///< (1 + n_g + n_h) x n_w
  };

  /// A generalized semi-infinite program
  ///
  ///   min_u max_{w in Y(u)} J(X(u,w), u, w)
  ///   s.t.  g(X(u,w), u, w) <= 0   for all w in Y(u),
  ///   Y(u) = { w : h(X(u,w), u, w) >= 0 }.
  ///
  /// The state is never a decision variable; `forward_state` resolves it.
  struct GsipProblem
  {
    using StateMap = std::function<Vector(const Vector &u, const Vector &w)>;
    using ScalarMap = std::function<double(const Vector &x, const Vector &u, const Vector &w)>;
    using VectorMap = std::function<Vector(const Vector &x, const Vector &u, const Vector &w)>;

    std::string name;
    Index n_u = 0;
    Index n_w = 0;
    Index n_g = 0;
    Index n_h = 0;
    Vector u_lower;
    Vector u_upper;
    /// Box enclosing every admissible uncertainty for every u; the separation
    /// problem searches inside it.
    Vector w_lower;
    Vector w_upper;
    double gamma_lower = 0.0;
    double gamma_upper = 1e4;

    StateMap forward_state;
    ScalarMap cost;
    VectorMap constraints;
    VectorMap admissibility;
    VectorMap dynamics_residual; // optional, validation only

    // Optional analytic derivatives of the reduced maps. Finite differences
    // are used when empty.
    std::function<ReducedJacobian(const Vector &u, const Vector &w)> reduced_jacobian;
    // Optional generator of points inside Y(u), used to seed the separation
    // search. `draw` selects an independent reproducible sample.
    std::function<Vector(const Vector &u, std::uint64_t draw)> sample_admissible;

    /// Throws ContractViolation when sizes or bounds are inconsistent.
    void validate() const;
  };

  /// Decision of the transformed problem: u together with the cost bound gamma.
  struct DecisionPoint
  {
    Vector u;
    double gamma = 0.0;
  };

  struct Scenario
  {
    Vector w;
    std::size_t found_at_iteration = 0;
    double violation_at_discovery = 0.0;
  };

  /// Ordered, duplicate-free (in the l-infinity sense) set of scenarios.
  class ScenarioSet
  {
  public:
    explicit ScenarioSet(double dup_tol = 1e-8);

    /// Returns false and leaves the set unchanged when `s` lies within
    /// dup_tol of an existing scenario. Throws on non-finite entries.
    bool add(Scenario s);
    bool contains(const Vector &w) const;

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const Scenario &operator[](std::size_t i) const { return items_[i]; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    double dup_tol() const { return dup_tol_; }

  private:
    double dup_tol_;
    std::vector<Scenario> items_;
  };

  /// A point (l1, l2) of the two-dimensional probability simplex.
  struct SimplexWeight
  {
    double l1 = 1.0;
    double l2 = 0.0;

    bool valid() const;
  };

  /// The existence-constrained reformulation of a GsipProblem:
  ///
  ///   min gamma  s.t. for all w:  exists lambda in simplex:
  ///     l1 * (agg_h(d,w) + epsilon) + l2 * max_j v_j(d,w) <= 0,
  ///
  /// where v = [J - gamma; g] and agg_h is selected by the negation mode.
  struct EsipProblem
  {
    GsipProblem base;
    double epsilon = 1e-3;
    NegationMode negation_mode = NegationMode::LogicalMin;
  };

  ReducedValues evaluate_reduced(const GsipProblem &prob, const Vector &u, const Vector &w);

  /// Analytic derivatives when the problem provides them, central differences
  /// otherwise.
  ReducedJacobian evaluate_reduced_jacobian(const GsipProblem &prob, const Vector &u,
                                            const Vector &w);

  /// Combined constraint vector v = [J(X(u,w),u,w) - gamma; g(X(u,w),u,w)].
  /// The robust requirement is max_j v_j <= 0.
  Vector combined_constraints(const GsipProblem &prob, const DecisionPoint &d, const Vector &w);

  /// h(X(u,w), u, w); w is admissible for d iff every entry is >= 0.
  Vector admissibility_values(const GsipProblem &prob, const DecisionPoint &d, const Vector &w);

  double negation_margin(const Vector &hvals, NegationMode mode);

  /// min(negation_margin(h) + epsilon, max_j v_j). The existence constraint
  /// holds at (d, w) iff the result is <= 0.
  double violation(const EsipProblem &esip, const DecisionPoint &d, const Vector &w);

  /// Same quantity from precomputed rows.
  double violation_from_rows(const Vector &hvals, const Vector &combined, double epsilon,
                             NegationMode mode);

  double lambda_smoothed_value(const SimplexWeight &lam, const Vector &hvals, const Vector &gvals,
                               double epsilon, NegationMode mode);

  EsipProblem build_esip(GsipProblem prob, double epsilon = 1e-3,
                         NegationMode mode = NegationMode::LogicalMin);

  /// Checks that a decision lies inside the (u, gamma) box.
  void check_decision(const GsipProblem &prob, const DecisionPoint &d);

} // namespace gsip

#endif // GSIP_CORE_HPP
