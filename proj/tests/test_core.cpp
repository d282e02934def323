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

#include "gsip/core.hpp"
#include "gsip/quadrotor.hpp"
#include "gsip/toy.hpp"

using namespace gsip;

namespace
{
  Vector vec(std::initializer_list<double> xs)
  {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs)
    {
      v(i++) = x;
    }
    return v;
  }

  DecisionPoint point(double u, double gamma) { return {Vector::Constant(1, u), gamma}; }

  /// Scalar problem with no robust rows: n_g = 0.
  GsipProblem epigraph_only()
  {
    GsipProblem p;
    p.name = "epigraph";
    p.n_u = 1;
    p.n_w = 1;
    p.n_g = 0;
    p.n_h = 1;
    p.u_lower = Vector::Zero(1);
    p.u_upper = Vector::Ones(1);
    p.w_lower = Vector::Zero(1);
    p.w_upper = Vector::Ones(1);
    p.forward_state = [](const Vector &u, const Vector &w) { return Vector::Constant(1, u(0) + w(0)); };
    p.cost = [](const Vector &x, const Vector &, const Vector &) { return x(0) * x(0); };
    p.constraints = [](const Vector &, const Vector &, const Vector &) { return Vector(0); };
    p.admissibility = [](const Vector &, const Vector &, const Vector &w) { return Vector::Constant(1, w(0)); };
    return p;
  }
} // namespace

TEST(CombinedConstraints, ToyRowsBySubstitution)
{
  const GsipProblem p = toy::t1();
  const Vector v = combined_constraints(p, point(0.5, 0.25), Vector::Constant(1, 0.5));
  ASSERT_EQ(v.size(), 2);
  EXPECT_DOUBLE_EQ(v(0), -0.5 - 0.25); // J - gamma with J = -u
  EXPECT_DOUBLE_EQ(v(1), 0.0);         // g = w - 0.5
}

TEST(CombinedConstraints, QuadrotorHoverCostIsFifty)
{
  const auto vp = quad::build_variant(quad::VariantId::Esip);
  const Vector hover = Vector::Constant(vp.problem.n_u, 0.15 * 9.81 / 2.0);
  const Vector v = combined_constraints(vp.problem, {hover, 50.0}, Vector::Zero(vp.problem.n_w));
  EXPECT_NEAR(v(0), 0.0, 1e-12);
}

TEST(CombinedConstraints, LargeGammaGivesNegativeEpigraphRow)
{
  const GsipProblem p = toy::t1();
  // toy gamma box is [-1, 1]; widen it to reach the documented upper value
  GsipProblem q = p;
  q.gamma_upper = 1e4;
  const Vector v = combined_constraints(q, point(0.3, 1e4), Vector::Constant(1, 0.2));
  EXPECT_LT(v(0), 0.0);
}

TEST(CombinedConstraints, DimensionMismatchIsContractViolation)
{
  const GsipProblem p = toy::t1();
  EXPECT_THROW(combined_constraints(p, point(0.5, 0.0), Vector::Zero(2)), ContractViolation);
  EXPECT_THROW(combined_constraints(p, {Vector::Zero(3), 0.0}, Vector::Zero(1)), ContractViolation);
}

TEST(CombinedConstraints, NonFiniteEvaluatorIsNumericalFailure)
{
  GsipProblem p = toy::t1();
  p.reduced_jacobian = nullptr;
  p.cost = [](const Vector &, const Vector &, const Vector &) { return std::nan(""); };
  EXPECT_THROW(combined_constraints(p, point(0.5, 0.0), Vector::Zero(1)), NumericalFailure);
}

TEST(Admissibility, ToyRowsBySubstitution)
{
  const Vector h = admissibility_values(toy::t1(), point(0.5, 0.0), Vector::Constant(1, 0.7));
  ASSERT_EQ(h.size(), 2);
  EXPECT_DOUBLE_EQ(h(0), 0.7);
  EXPECT_NEAR(h(1), -0.2, 1e-15);
}

TEST(Admissibility, QuadrotorInsideAndOutsideBand)
{
  const auto vp = quad::build_variant(quad::VariantId::Esip);
  const GsipProblem &p = vp.problem;
  Vector v = Vector::Ones(p.n_u);
  for (Index i = 1; i < p.n_u; i += 2)
  {
    v(i) = 0.5 + 0.1 * static_cast<double>(i); // uneven second rotor
  }
  Vector w(p.n_w);
  for (Index i = 0; i < p.n_w; i += 2)
  {
    w(i) = 0.03;
    w(i + 1) = 0.03 * v(i + 1) / v(i);
  }
  const Vector h_in = admissibility_values(p, {v, 0.0}, w);
  EXPECT_GE(h_in.minCoeff(), -1e-15);

  Vector w_out = Vector::Zero(p.n_w);
  w_out(0) = 0.06;
  const Vector h_out = admissibility_values(p, {Vector::Ones(p.n_u), 0.0}, w_out);
  EXPECT_NEAR(h_out(0), -0.01, 1e-15);
}

TEST(NegationMargin, Examples)
{
  EXPECT_EQ(negation_margin(vec({-1.0, 2.0}), NegationMode::PaperMax), 2.0);
  EXPECT_EQ(negation_margin(vec({-1.0, 2.0}), NegationMode::LogicalMin), -1.0);
  EXPECT_EQ(negation_margin(vec({0.0}), NegationMode::PaperMax), 0.0);
  EXPECT_EQ(negation_margin(vec({0.0}), NegationMode::LogicalMin), 0.0);
  EXPECT_THROW(negation_margin(Vector(0), NegationMode::LogicalMin), ContractViolation);
}

TEST(Violation, Examples)
{
  const double eps = 1e-3;
  EXPECT_DOUBLE_EQ(violation_from_rows(vec({2.0}), vec({1.0}), eps, NegationMode::LogicalMin), 1.0);
  EXPECT_DOUBLE_EQ(violation_from_rows(vec({-1.0}), vec({5.0}), eps, NegationMode::LogicalMin), -0.999);
  EXPECT_DOUBLE_EQ(violation_from_rows(vec({2.0}), vec({-3.0}), eps, NegationMode::LogicalMin), -3.0);
}

TEST(Violation, MatchesRowsOnToy)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  const DecisionPoint d = point(0.8, -0.1);
  const Vector w = Vector::Constant(1, 0.6);
  const double direct = violation(e, d, w);
  // h = (0.6, 0.2), v = (-0.8 + 0.1, 0.1) -> min(0.2 + eps, 0.1)
  EXPECT_NEAR(direct, 0.1, 1e-15);
}

TEST(LambdaSmoothed, Examples)
{
  const double eps = 1e-3;
  EXPECT_DOUBLE_EQ(lambda_smoothed_value({1.0, 0.0}, vec({2.0}), vec({7.0}), eps, NegationMode::LogicalMin), 2.001);
  EXPECT_DOUBLE_EQ(lambda_smoothed_value({0.0, 1.0}, vec({9.0}), vec({-3.0}), eps, NegationMode::LogicalMin), -3.0);
  EXPECT_NEAR(lambda_smoothed_value({0.5, 0.5}, vec({2.0}), vec({-3.0}), eps, NegationMode::LogicalMin), -0.4995,
              1e-15);
  EXPECT_THROW(lambda_smoothed_value({0.7, 0.7}, vec({2.0}), vec({-3.0}), eps, NegationMode::LogicalMin),
               ContractViolation);
  EXPECT_THROW(lambda_smoothed_value({-0.1, 1.1}, vec({2.0}), vec({-3.0}), eps, NegationMode::LogicalMin),
               ContractViolation);
}

TEST(BuildEsip, RejectsNonPositiveEpsilon)
{
  EXPECT_THROW(build_esip(toy::t1(), 0.0), ContractViolation);
  EXPECT_THROW(build_esip(toy::t1(), -1e-3), ContractViolation);
  const EsipProblem e = build_esip(toy::t1(), 1e-2, NegationMode::PaperMax);
  EXPECT_EQ(e.epsilon, 1e-2);
  EXPECT_EQ(e.negation_mode, NegationMode::PaperMax);
}

TEST(BuildEsip, NoRobustRowsLeavesEpigraphOnly)
{
  const EsipProblem e = build_esip(epigraph_only(), 1e-3);
  const DecisionPoint d = point(0.5, 0.1);
  const Vector w = Vector::Constant(1, 0.25);
  const Vector v = combined_constraints(e.base, d, w);
  ASSERT_EQ(v.size(), 1);
  const double cost = 0.75 * 0.75;
  EXPECT_DOUBLE_EQ(violation(e, d, w), std::min(0.25 + 1e-3, cost - 0.1));
}

TEST(ProblemValidate, RejectsInconsistentBounds)
{
  GsipProblem p = toy::t1();
  p.u_lower(0) = 2.0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = toy::t1();
  p.gamma_lower = 5.0;
  p.gamma_upper = 4.0;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = toy::t1();
  p.w_upper = Vector::Ones(2);
  EXPECT_THROW(p.validate(), ContractViolation);
}

TEST(ScenarioSet, DeduplicatesInInfinityNorm)
{
  ScenarioSet s(1e-8);
  EXPECT_TRUE(s.add({vec({0.1, 0.2}), 1, 0.5}));
  EXPECT_FALSE(s.add({vec({0.1 + 5e-9, 0.2 - 5e-9}), 2, 0.4}));
  EXPECT_TRUE(s.add({vec({0.1 + 2e-8, 0.2}), 3, 0.3}));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_TRUE(s.contains(vec({0.1, 0.2})));
  EXPECT_EQ(s[1].found_at_iteration, 3u);
  EXPECT_THROW(s.add({vec({std::numeric_limits<double>::infinity(), 0.0}), 4, 0.0}), ContractViolation);
}

TEST(SimplexWeight, Validity)
{
  EXPECT_TRUE((SimplexWeight{1.0, 0.0}).valid());
  EXPECT_TRUE((SimplexWeight{0.3, 0.7}).valid());
  EXPECT_FALSE((SimplexWeight{0.3, 0.6}).valid());
  EXPECT_FALSE((SimplexWeight{-0.5, 1.5}).valid());
}

// Over the simplex the smoothed value is affine in lambda, so its minimum sits
// at a vertex and equals the violation.
TEST(Property, LambdaVertexAttainment)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const Vector h = Vector::NullaryExpr(3, [&](Index) { return val(rng); });
    const Vector g = Vector::NullaryExpr(4, [&](Index) { return val(rng); });
    const double eps = 1e-3 + 0.1 * unit(rng);
    for (NegationMode mode : {NegationMode::LogicalMin, NegationMode::PaperMax})
    {
      const double sigma = violation_from_rows(h, g, eps, mode);
      const double v1 = lambda_smoothed_value({1.0, 0.0}, h, g, eps, mode);
      const double v2 = lambda_smoothed_value({0.0, 1.0}, h, g, eps, mode);
      EXPECT_EQ(std::min(v1, v2), sigma);

      double sampled_min = std::min(v1, v2);
      bool exists_nonpositive = false;
      for (int k = 0; k < 1000; ++k)
      {
        const double l1 = unit(rng);
        const double value = lambda_smoothed_value({l1, 1.0 - l1}, h, g, eps, mode);
        EXPECT_GE(value, sigma - 1e-12);
        sampled_min = std::min(sampled_min, value);
        exists_nonpositive = exists_nonpositive || value <= 0.0;
      }
      EXPECT_EQ(sampled_min, sigma);
      // a sampled interior lambda certifies the constraint only if a vertex does
      if (exists_nonpositive)
      {
        EXPECT_LE(sigma, 0.0);
      }
      EXPECT_EQ(sigma <= 0.0, v1 <= 0.0 || v2 <= 0.0);
    }
  }
}

TEST(Property, DisjunctionEquivalence)
{
  const EsipProblem e = build_esip(toy::t1(), 1e-3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> gam(-1.0, 1.0);
  int satisfied = 0;
  for (int k = 0; k < 10000; ++k)
  {
    const DecisionPoint d = point(u01(rng), gam(rng));
    const Vector w = Vector::Constant(1, u01(rng));
    const double w0 = w(0);
    const double u = d.u(0);
    // direct boolean evaluation of the toy rows
    const bool refuted = std::min(w0, u - w0) <= -e.epsilon;
    const bool holds = std::max(-u - d.gamma, w0 - 0.5) <= 0.0;
    const bool expected = refuted || holds;
    EXPECT_EQ(violation(e, d, w) <= 0.0, expected) << "u=" << u << " w=" << w0 << " gamma=" << d.gamma;
    satisfied += expected ? 1 : 0;
  }
  // both outcomes must be exercised
  EXPECT_GT(satisfied, 100);
  EXPECT_LT(satisfied, 9900);
}

TEST(Property, EvaluatorsAreDeterministic)
{
  const auto vp = quad::build_variant(quad::VariantId::Esip);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(0.2, 1.5);
  std::uniform_real_distribution<double> w(-0.02, 0.02);
  for (int k = 0; k < 20; ++k)
  {
    const Vector u = Vector::NullaryExpr(vp.problem.n_u, [&](Index) { return v(rng); });
    const Vector ww = Vector::NullaryExpr(vp.problem.n_w, [&](Index) { return w(rng); });
    const ReducedValues a = evaluate_reduced(vp.problem, u, ww);
    const ReducedValues b = evaluate_reduced(vp.problem, u, ww);
    EXPECT_EQ(a.cost, b.cost);
    EXPECT_TRUE(a.g == b.g);
    EXPECT_TRUE(a.h == b.h);
  }
}

TEST(Property, QuadrotorDynamicsResidual)
{
  const auto vp = quad::build_variant(quad::VariantId::Esip);
  ASSERT_TRUE(static_cast<bool>(vp.problem.dynamics_residual));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(-2.0, 2.0);
  std::uniform_real_distribution<double> w(-0.1, 0.1);
  for (int k = 0; k < 1000; ++k)
  {
    const Vector u = Vector::NullaryExpr(vp.problem.n_u, [&](Index) { return v(rng); });
    const Vector ww = Vector::NullaryExpr(vp.problem.n_w, [&](Index) { return w(rng); });
    const Vector x = vp.problem.forward_state(u, ww);
    EXPECT_LE(vp.problem.dynamics_residual(x, u, ww).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}
