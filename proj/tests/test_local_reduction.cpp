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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "gsip/local_reduction.hpp"
#include "gsip/toy.hpp"

using namespace gsip;

namespace
{
  struct GridResult
  {
    double u = 0.0;
    double gamma = 0.0;
  };

  /// Brute force of the toy: for each grid u, the smallest gamma such that
  /// every grid w satisfies the existence constraint.
  GridResult toy_grid_optimum(double eps, int points = 201)
  {
    GridResult best{0.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < points; ++i)
    {
      const double u = static_cast<double>(i) / (points - 1);
      bool ok = true;
      for (int k = 0; k < points && ok; ++k)
      {
        const double w = static_cast<double>(k) / (points - 1);
        const bool refuted = std::min(w, u - w) <= -eps;
        ok = refuted || w - 0.5 <= 0.0;
      }
      // J = -u is the only cost, so the tightest bound is gamma = -u
      if (ok && -u < best.gamma)
      {
        best = {u, -u};
      }
    }
    return best;
  }

  /// Grid search of the violation at d over the admissible part of [0, 1].
  double toy_grid_sigma(double eps, const DecisionPoint &d, int points = 401)
  {
    double best = -std::numeric_limits<double>::infinity();
    const double u = d.u(0);
    for (int k = 0; k < points; ++k)
    {
      const double w = static_cast<double>(k) / (points - 1);
      const double agg = std::min(w, u - w);
      if (agg < 0.0)
      {
        continue;
      }
      best = std::max(best, std::min(agg + eps, std::max(-u - d.gamma, w - 0.5)));
    }
    return best;
  }

  ReductionOptions defaults(double eps = 1e-3)
  {
    ReductionOptions o;
    o.epsilon = eps;
    return o;
  }

  void expect_monotone(const std::vector<double> &gammas)
  {
    for (std::size_t i = 1; i < gammas.size(); ++i)
    {
      EXPECT_GE(gammas[i], gammas[i - 1] - 1e-6) << "iteration " << i;
    }
  }

  /// Toy variant whose rows are never violated at gamma_lower.
  GsipProblem never_violated()
  {
    GsipProblem p = toy::t1();
    p.name = "never";
    p.reduced_jacobian = nullptr;
    p.cost = [](const Vector &, const Vector &, const Vector &) { return -1.0; };
    p.constraints = [](const Vector &, const Vector &, const Vector &) { return Vector::Constant(1, -1.0); };
    return p;
  }
} // namespace

TEST(GridOracle, LibraryAndTestOraclesAgree)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  const GridResult g = toy_grid_optimum(1e-3);
  EXPECT_NEAR(g.u, 0.5, 1e-12);
  const toy::GridOptimum lib = toy::grid_optimum(e);
  EXPECT_NEAR(lib.u, g.u, 1e-12);
  const DecisionPoint d{Vector::Ones(1), 1.0};
  EXPECT_NEAR(toy::grid_sigma(e, d), toy_grid_sigma(1e-3, d), 1e-12);
}

TEST(Master, EmptyScenarioSetGivesMidpointAndLowerGamma)
{
  GsipProblem p = toy::t1();
  p.gamma_lower = 0.0;
  p.gamma_upper = 1e4;
  const EsipProblem e = build_esip(p, 1e-3);
  const ScenarioSet none;
  const MasterResult m = master_step(e, none, defaults(), nullptr);
  ASSERT_TRUE(m.feasible);
  EXPECT_EQ(m.decision.gamma, 0.0);
  EXPECT_EQ(m.decision.u(0), 0.5);
  EXPECT_TRUE(m.assignment.empty());
}

TEST(Master, InadmissibleScenarioIsRefuted)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  ScenarioSet s;
  s.add({Vector::Constant(1, 0.7), 1, 0.2});
  const MasterResult m = master_step(e, s, defaults(), nullptr);
  ASSERT_TRUE(m.feasible);
  ASSERT_EQ(m.assignment.size(), 1u);
  // g(0.7) > 0, so w = 0.7 must be refuted through the row u - w; a refuted
  // scenario carries no cost row, so gamma drops to its lower bound
  EXPECT_EQ(m.assignment[0], DisjunctChoice::refute(1));
  EXPECT_LE(m.decision.u(0), 0.7 - 1e-3 + 1e-6);
  EXPECT_EQ(m.decision.gamma, -1.0);
}

TEST(Master, WarmAndColdAssignmentsAgree)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  ScenarioSet s;
  for (double w : {0.9, 0.7, 0.2, 0.55})
  {
    s.add({Vector::Constant(1, w), 1, 0.0});
  }
  const MasterResult cold = master_step(e, s, defaults(), nullptr);
  ASSERT_TRUE(cold.feasible);
  const MasterResult warm = master_step(e, s, defaults(), &cold.assignment);
  ASSERT_TRUE(warm.feasible);
  EXPECT_NEAR(warm.decision.gamma, cold.decision.gamma, 1e-4);
  EXPECT_EQ(warm.assignment, cold.assignment);
}

TEST(Separation, ToyMatchesGridSearch)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  for (double u : {1.0, 0.8, 0.6, 0.52})
  {
    const DecisionPoint d{Vector::Constant(1, u), -1.0};
    const SeparationResult s = separation_step(e, d, defaults());
    EXPECT_NEAR(s.sigma_star, toy_grid_sigma(1e-3, d), 1e-3) << "u=" << u;
    EXPECT_EQ(s.active_g_row, 1);
    EXPECT_NEAR(s.sigma_star, violation(e, d, s.scenario.w), 1e-8);
    EXPECT_FALSE(s.admissible_set_empty);
  }
}

TEST(Separation, LargeGammaWithEpigraphOnly)
{
  GsipProblem p = toy::t1();
  p.name = "epigraph";
  p.n_g = 0;
  p.gamma_upper = 1e4;
  p.reduced_jacobian = nullptr;
  p.constraints = [](const Vector &, const Vector &, const Vector &) { return Vector(0); };
  const EsipProblem e = build_esip(p, 1e-3);
  const SeparationResult s = separation_step(e, {Vector::Constant(1, 0.5), 1e4}, defaults());
  EXPECT_LT(s.sigma_star, 0.0);
}

TEST(Separation, EmptyAdmissibleSet)
{
  GsipProblem p = toy::t1();
  p.reduced_jacobian = nullptr;
  p.admissibility = [](const Vector &, const Vector &, const Vector &) { return Vector::Constant(2, -1.0); };
  const EsipProblem e = build_esip(p, 1e-3);
  const SeparationResult s = separation_step(e, {Vector::Constant(1, 0.5), 0.0}, defaults());
  EXPECT_TRUE(s.admissible_set_empty);
  EXPECT_EQ(s.sigma_star, -std::numeric_limits<double>::infinity());
}

TEST(Separation, StandardRowsOverFixedSet)
{
  // SIP over the union [0, 1]: worst w is 1 for every u
  GsipProblem p = toy::t1();
  p.reduced_jacobian = nullptr;
  p.admissibility = [](const Vector &, const Vector &, const Vector &w) {
    Vector h(2);
    h << w(0), 1.0 - w(0);
    return h;
  };
  const SeparationResult s = standard_separation_step(p, {Vector::Constant(1, 0.2), 0.5}, defaults());
  EXPECT_NEAR(s.scenario.w(0), 1.0, 1e-6);
  EXPECT_NEAR(s.sigma_star, 0.5, 1e-6);
  EXPECT_EQ(s.active_g_row, 1);
}

TEST(SolveEsip, ToyMatchesGridOptimum)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  const SolveReport r = solve_esip(e, defaults());
  ASSERT_EQ(r.status, ReductionStatus::Converged) << r.message;
  const GridResult g = toy_grid_optimum(1e-3);
  EXPECT_NEAR(r.decision.u(0), g.u, 1e-3);
  EXPECT_NEAR(r.decision.gamma, g.gamma, 1e-3);
  EXPECT_LE(r.sigma_history.back(), 1e-6);
  EXPECT_EQ(r.sigma_history.size(), r.iterations);
  EXPECT_EQ(r.gamma_history.size(), r.iterations);
  EXPECT_EQ(r.log.size(), r.iterations);
  EXPECT_EQ(r.assignment.size(), r.scenarios.size());
  expect_monotone(r.gamma_history);
}

TEST(SolveEsip, LargerEpsilonShiftsOptimumBySlack)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-2);
  const SolveReport r = solve_esip(e, defaults(1e-2));
  ASSERT_EQ(r.status, ReductionStatus::Converged) << r.message;
  const GridResult g = toy_grid_optimum(1e-2);
  EXPECT_NEAR(r.decision.u(0), g.u, 2e-2);
  expect_monotone(r.gamma_history);
}

TEST(SolveEsip, ConvergenceCertificateBySampling)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  const ReductionOptions o = defaults();
  const SolveReport r = solve_esip(e, o);
  ASSERT_EQ(r.status, ReductionStatus::Converged);
  std::mt19937_64 rng(2);
  const double u = r.decision.u(0);
  std::uniform_real_distribution<double> w(0.0, u);
  for (int k = 0; k < 10000; ++k)
  {
    EXPECT_LE(violation(e, r.decision, Vector::Constant(1, w(rng))), o.viol_tol + 1e-6);
  }
}

TEST(SolveEsip, PaperMaxOnToyIsInfeasible)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3, NegationMode::PaperMax);
  ReductionOptions o = defaults();
  o.mode = NegationMode::PaperMax;
  const SolveReport r = solve_esip(e, o);
  EXPECT_EQ(r.status, ReductionStatus::MasterInfeasible);
  EXPECT_FALSE(r.message.empty());
}

TEST(SolveEsip, NeverViolatedConvergesAtFirstIteration)
{
  const EsipProblem e = build_esip(never_violated(), 1e-3);
  const SolveReport r = solve_esip(e, defaults());
  EXPECT_EQ(r.status, ReductionStatus::Converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_TRUE(r.scenarios.empty());
  EXPECT_EQ(r.decision.u(0), 0.5);
}

TEST(SolveEsip, DeterministicAcrossRuns)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  const SolveReport a = solve_esip(e, defaults());
  const SolveReport b = solve_esip(e, defaults());
  EXPECT_TRUE(a.decision.u == b.decision.u);
  EXPECT_EQ(a.decision.gamma, b.decision.gamma);
  EXPECT_EQ(a.sigma_history, b.sigma_history);
  ASSERT_EQ(a.scenarios.size(), b.scenarios.size());
  for (std::size_t i = 0; i < a.scenarios.size(); ++i)
  {
    EXPECT_TRUE(a.scenarios[i].w == b.scenarios[i].w);
  }
}

TEST(SolveEsip, ContractChecks)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  EXPECT_THROW(solve_esip(e, defaults(1e-2)), ContractViolation);
  ReductionOptions o = defaults();
  o.viol_tol = 1e-2;
  EXPECT_THROW(solve_esip(e, o), ContractViolation);
  o = defaults();
  o.max_outer_iters = 0;
  EXPECT_THROW(o.validate(), ContractViolation);
}

TEST(SolveStandardSip, UnionSetOfToyIsInfeasible)
{
  // the SIP over [0, 1] needs w - 0.5 <= 0 at w = 1
  GsipProblem p = toy::t1();
  p.reduced_jacobian = nullptr;
  p.admissibility = [](const Vector &, const Vector &, const Vector &w) {
    Vector h(2);
    h << w(0), 1.0 - w(0);
    return h;
  };
  const SolveReport r = solve_standard_sip(p, defaults());
  EXPECT_EQ(r.status, ReductionStatus::MasterInfeasible);
  EXPECT_LE(r.scenarios.size(), 2u);
}

TEST(SolveStandardSip, CostBoundOverFixedInterval)
{
  // min_u max_{w in [0,1]} (u - w)^2, optimum u = 0.5 with gamma = 0.25
  GsipProblem p;
  p.name = "minimax";
  p.n_u = 1;
  p.n_w = 1;
  p.n_g = 0;
  p.n_h = 2;
  p.u_lower = Vector::Zero(1);
  p.u_upper = Vector::Ones(1);
  p.w_lower = Vector::Zero(1);
  p.w_upper = Vector::Ones(1);
  p.gamma_lower = 0.0;
  p.gamma_upper = 10.0;
  p.forward_state = [](const Vector &u, const Vector &w) { return Vector::Constant(1, u(0) - w(0)); };
  p.cost = [](const Vector &x, const Vector &, const Vector &) { return x(0) * x(0); };
  p.constraints = [](const Vector &, const Vector &, const Vector &) { return Vector(0); };
  p.admissibility = [](const Vector &, const Vector &, const Vector &w) {
    Vector h(2);
    h << w(0), 1.0 - w(0);
    return h;
  };
  const SolveReport r = solve_standard_sip(p, defaults());
  ASSERT_EQ(r.status, ReductionStatus::Converged) << r.message;
  EXPECT_NEAR(r.decision.u(0), 0.5, 1e-4);
  EXPECT_NEAR(r.decision.gamma, 0.25, 1e-4);
  expect_monotone(r.gamma_history);
}

TEST(Strings, Names)
{
  EXPECT_EQ(to_string(DisjunctChoice::satisfy()), "satisfy");
  EXPECT_EQ(to_string(DisjunctChoice::refute(3)), "refute:3");
  EXPECT_EQ(to_string(DisjunctChoice::refute(-1)), "refute:all");
  EXPECT_EQ(to_string(ReductionStatus::MasterInfeasible), "MasterInfeasible");
}
