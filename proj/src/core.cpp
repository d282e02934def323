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

#include "gsip/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gsip/nlp.hpp"

namespace gsip
{
  namespace
  {
    void require(bool ok, const std::string &what)
    {
      if (!ok)
      {
        throw ContractViolation(what);
      }
    }

    void require_finite(const Vector &v, const char *what)
    {
      if (!v.allFinite())
      {
        throw NumericalFailure(std::string("non-finite value from ") + what);
      }
    }

    void require_size(const Vector &v, Index n, const char *what)
    {
      if (v.size() != n)
      {
        std::ostringstream os;
        os << what << ": expected length " << n << ", got " << v.size();
        throw ContractViolation(os.str());
      }
    }
  } // namespace

  std::string_view to_string(NegationMode mode)
  {
    switch (mode)
    {
    case NegationMode::PaperMax:
      return "paper_max";
    case NegationMode::LogicalMin:
      return "logical_min";
    }
    return "unknown";
  }

  NegationMode negation_mode_from_string(std::string_view name)
  {
    if (name == "paper_max")
    {
      return NegationMode::PaperMax;
    }
    if (name == "logical_min")
    {
      return NegationMode::LogicalMin;
    }
    throw ContractViolation("unknown negation mode '" + std::string(name) +
                            "' (expected paper_max or logical_min)");
  }

  void GsipProblem::validate() const
  {
    require(n_u > 0 && n_w > 0, name + ": n_u and n_w must be positive");
    require(n_g >= 0 && n_h > 0, name + ": n_h must be positive");
    require(u_lower.size() == n_u && u_upper.size() == n_u, name + ": u bounds size");
    require(w_lower.size() == n_w && w_upper.size() == n_w, name + ": w bounds size");
    require((u_lower.array() <= u_upper.array()).all(), name + ": u_lower > u_upper");
    require((w_lower.array() <= w_upper.array()).all(), name + ": w_lower > w_upper");
    require(gamma_lower <= gamma_upper, name + ": gamma_lower > gamma_upper");
    require(std::isfinite(gamma_lower) && std::isfinite(gamma_upper), name + ": unbounded gamma range");
    require(static_cast<bool>(forward_state) && static_cast<bool>(cost) &&
                static_cast<bool>(constraints) && static_cast<bool>(admissibility),
            name + ": missing evaluator");
  }

  ScenarioSet::ScenarioSet(double dup_tol) : dup_tol_(dup_tol)
  {
    require(dup_tol >= 0.0, "dup_tol must be non-negative");
  }

  bool ScenarioSet::contains(const Vector &w) const
  {
    return std::any_of(items_.begin(), items_.end(), [&](const Scenario &s) {
      return s.w.size() == w.size() && (s.w - w).lpNorm<Eigen::Infinity>() <= dup_tol_;
    });
  }

  bool ScenarioSet::add(Scenario s)
  {
    require(s.w.allFinite(), "scenario has non-finite entries");
    if (contains(s.w))
    {
      return false;
    }
    items_.push_back(std::move(s));
    return true;
  }

  bool SimplexWeight::valid() const
  {
    return l1 >= 0.0 && l2 >= 0.0 && std::abs(l1 + l2 - 1.0) <= 1e-12;
  }

  ReducedValues evaluate_reduced(const GsipProblem &prob, const Vector &u, const Vector &w)
  {
    require_size(u, prob.n_u, "u");
    require_size(w, prob.n_w, "w");
    const Vector x = prob.forward_state(u, w);
    require_finite(x, "forward_state");
    ReducedValues out;
    out.cost = prob.cost(x, u, w);
    if (!std::isfinite(out.cost))
    {
      throw NumericalFailure("non-finite value from cost");
    }
    out.g = prob.n_g > 0 ? prob.constraints(x, u, w) : Vector();
    out.h = prob.admissibility(x, u, w);
    require_size(out.g, prob.n_g, "constraints");
    require_size(out.h, prob.n_h, "admissibility");
    require_finite(out.g, "constraints");
    require_finite(out.h, "admissibility");
    return out;
  }

  namespace
  {
    Vector stack(const ReducedValues &r)
    {
      Vector s(1 + r.g.size() + r.h.size());
      s << r.cost, r.g, r.h;
      return s;
    }
  } // namespace

  ReducedJacobian evaluate_reduced_jacobian(const GsipProblem &prob, const Vector &u,
                                            const Vector &w)
  {
    if (prob.reduced_jacobian)
    {
      ReducedJacobian jac = prob.reduced_jacobian(u, w);
      if (!jac.d_du.allFinite() || !jac.d_dw.allFinite())
      {
        throw NumericalFailure("non-finite reduced Jacobian");
      }
      return jac;
    }
    ReducedJacobian jac;
    jac.values = evaluate_reduced(prob, u, w);
    jac.d_du = finite_diff_jacobian([&](const Vector &uu) { return stack(evaluate_reduced(prob, uu, w)); }, u);
    jac.d_dw = finite_diff_jacobian([&](const Vector &ww) { return stack(evaluate_reduced(prob, u, ww)); }, w);
    return jac;
  }

  void check_decision(const GsipProblem &prob, const DecisionPoint &d)
  {
    require_size(d.u, prob.n_u, "decision u");
    constexpr double slack = 1e-12;
    require((d.u.array() >= prob.u_lower.array() - slack).all() &&
                (d.u.array() <= prob.u_upper.array() + slack).all(),
            "decision u outside its box");
    require(d.gamma >= prob.gamma_lower - slack && d.gamma <= prob.gamma_upper + slack,
            "decision gamma outside its range");
  }

  Vector combined_constraints(const GsipProblem &prob, const DecisionPoint &d, const Vector &w)
  {
    require_size(d.u, prob.n_u, "decision u");
    const ReducedValues r = evaluate_reduced(prob, d.u, w);
    Vector v(1 + prob.n_g);
    v(0) = r.cost - d.gamma;
    v.tail(prob.n_g) = r.g;
    return v;
  }

  Vector admissibility_values(const GsipProblem &prob, const DecisionPoint &d, const Vector &w)
  {
    require_size(d.u, prob.n_u, "decision u");
    return evaluate_reduced(prob, d.u, w).h;
  }

  double negation_margin(const Vector &hvals, NegationMode mode)
  {
    require(hvals.size() > 0, "negation_margin of an empty vector");
    return mode == NegationMode::PaperMax ? hvals.maxCoeff() : hvals.minCoeff();
  }

  double violation_from_rows(const Vector &hvals, const Vector &combined, double epsilon,
                             NegationMode mode)
  {
    require(combined.size() > 0, "empty combined constraint vector");
    return std::min(negation_margin(hvals, mode) + epsilon, combined.maxCoeff());
  }

  double violation(const EsipProblem &esip, const DecisionPoint &d, const Vector &w)
  {
    check_decision(esip.base, d);
    const ReducedValues r = evaluate_reduced(esip.base, d.u, w);
    Vector v(1 + esip.base.n_g);
    v(0) = r.cost - d.gamma;
    v.tail(esip.base.n_g) = r.g;
    return violation_from_rows(r.h, v, esip.epsilon, esip.negation_mode);
  }

  double lambda_smoothed_value(const SimplexWeight &lam, const Vector &hvals, const Vector &gvals,
                               double epsilon, NegationMode mode)
  {
    require(lam.valid(), "lambda is not on the simplex");
    require(gvals.size() > 0, "empty combined constraint vector");
    return lam.l1 * (negation_margin(hvals, mode) + epsilon) + lam.l2 * gvals.maxCoeff();
  }

  EsipProblem build_esip(GsipProblem prob, double epsilon, NegationMode mode)
  {
    require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
    prob.validate();
    return EsipProblem{std::move(prob), epsilon, mode};
  }

} // namespace gsip
