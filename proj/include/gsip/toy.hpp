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

#ifndef GSIP_TOY_HPP
#define GSIP_TOY_HPP

#include "gsip/core.hpp"

namespace gsip::toy
{
  /// One-dimensional GSIP: maximize u in [0, 1] subject to w - 0.5 <= 0 for
  /// every w in Y(u) = [0, u]. Encoded as min -u with the cost bound gamma in
  /// [-1, 1]; h = (w, u - w), g = w - 0.5, w searched in [0, 1].
  ///
  /// The GSIP optimum is u = 0.5. The SIP over the union [0, 1] is infeasible.
  GsipProblem t1();

  /// Brute-force optimum of the existence-constrained form on a grid of
  /// `points` values per axis over (u, w).
  struct GridOptimum
  {
    double u = 0.0;
    double gamma = 0.0;
  };

  GridOptimum grid_optimum(const EsipProblem &esip, int points = 201);

  /// max over the admissible points of a grid on [0, 1] of the
  /// existence-constraint violation at d.
  double grid_sigma(const EsipProblem &esip, const DecisionPoint &d, int points = 401);

} // namespace gsip::toy

#endif // GSIP_TOY_HPP
