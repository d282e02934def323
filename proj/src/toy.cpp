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

#include "gsip/toy.hpp"

#include <limits>

namespace gsip::toy
{
  GsipProblem t1()
  {
    GsipProblem p;
    p.name = "toy-t1";
    p.n_u = 1;
    p.n_w = 1;
    p.n_g = 1;
    p.n_h = 2;
    p.u_lower = Vector::Zero(1);
    p.u_upper = Vector::Ones(1);
    p.w_lower = Vector::Zero(1);
    p.w_upper = Vector::Ones(1);
    p.gamma_lower = -1.0;
    p.gamma_upper = 1.0;
    p.forward_state = [](const Vector &, const Vector &) { return Vector(0); };
    p.cost = [](const Vector &, const Vector &u, const Vector &) { return -u(0); };
    p.constraints = [](const Vector &, const Vector &, const Vector &w) {
      Vector g(1);
      g(0) = w(0) - 0.5;
      return g;
    };
    p.admissibility = [](const Vector &, const Vector &u, const Vector &w) {
      Vector h(2);
      h << w(0), u(0) - w(0);
      return h;
    };
    p.reduced_jacobian = [](const Vector &u, const Vector &w) {
      ReducedJacobian d;
      d.values.cost = -u(0);
      d.values.g = Vector::Constant(1, w(0) - 0.5);
      d.values.h = Vector(2);
      d.values.h << w(0), u(0) - w(0);
      d.d_du = Matrix::Zero(4, 1);
      d.d_dw = Matrix::Zero(4, 1);
      d.d_du(0, 0) = -1.0;
      d.d_du(3, 0) = 1.0;
      d.d_dw(1, 0) = 1.0;
      d.d_dw(2, 0) = 1.0;
      d.d_dw(3, 0) = -1.0;
      return d;
    };
    p.validate();
    return p;
  }

  namespace
  {
    double grid_point(int i, int points) { return static_cast<double>(i) / (points - 1); }
  } // namespace

  double grid_sigma(const EsipProblem &esip, const DecisionPoint &d, int points)
  {
    const GsipProblem &p = esip.base;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i)
    {
      Vector w(1);
      w(0) = p.w_lower(0) + (p.w_upper(0) - p.w_lower(0)) * grid_point(i, points);
      if (admissibility_values(p, d, w).minCoeff() >= 0.0)
      {
        best = std::max(best, violation(esip, d, w));
      }
    }
    return best;
  }

  GridOptimum grid_optimum(const EsipProblem &esip, int points)
  {
    const GsipProblem &p = esip.base;
    GridOptimum best{0.0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < points; ++i)
    {
      const double u = p.u_lower(0) + (p.u_upper(0) - p.u_lower(0)) * grid_point(i, points);
      // smallest gamma with every grid w satisfying the existence constraint
      double gamma = p.gamma_lower;
      bool ok = true;
      for (int k = 0; k < points && ok; ++k)
      {
        Vector w(1);
        w(0) = p.w_lower(0) + (p.w_upper(0) - p.w_lower(0)) * grid_point(k, points);
        const DecisionPoint d{Vector::Constant(1, u), gamma};
        const Vector h = admissibility_values(p, d, w);
        if (negation_margin(h, esip.negation_mode) + esip.epsilon <= 0.0)
        {
          continue;
        }
        const Vector v = combined_constraints(p, d, w);
        if (v.tail(p.n_g).maxCoeff() > 0.0)
        {
          ok = false;
          break;
        }
        gamma = std::max(gamma, v(0) + gamma);
      }
      if (ok && gamma <= p.gamma_upper && gamma < best.gamma)
      {
        best = {u, gamma};
      }
    }
    return best;
  }

} // namespace gsip::toy
