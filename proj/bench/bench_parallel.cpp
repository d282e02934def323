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

// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "gsip/nlp.hpp"
#include "gsip/quadrotor.hpp"

namespace
{
  using namespace gsip;

  quad::ThrustPlan plan()
  {
    Vector v(20);
    for (Index i = 0; i < v.size(); ++i)
    {
      v(i) = 0.7 + 0.05 * static_cast<double>(i % 5);
    }
    return {v};
  }

  /// Worst path-constraint value over the shared thrust error, as in the
  /// separation subproblem of the RSIP variant.
  SmoothProgram worst_altitude()
  {
    const quad::QuadParams qp;
    SmoothProgram p;
    p.n = qp.horizon;
    p.lower = Vector::Constant(p.n, -qp.uncert_frac);
    p.upper = Vector::Constant(p.n, qp.uncert_frac);
    const quad::ThrustPlan v = plan();
    p.objective = [qp, v](const Vector &w) {
      const quad::Trajectory t = quad::simulate(v, {w}, quad::VariantId::Rsip, qp);
      return -quad::path_constraint_rows(t, qp).maxCoeff();
    };
    return p;
  }

  void BM_MonteCarloParallel(benchmark::State &state)
  {
    const quad::QuadParams qp;
    const quad::ThrustPlan v = plan();
    for (auto _ : state)
    {
      benchmark::DoNotOptimize(quad::monte_carlo(v, static_cast<std::size_t>(state.range(0)), 1, 20.0, qp));
    }
  }

  void BM_MonteCarloSerial(benchmark::State &state)
  {
    const quad::QuadParams qp;
    const quad::ThrustPlan v = plan();
    for (auto _ : state)
    {
      benchmark::DoNotOptimize(
          quad::monte_carlo_serial(v, static_cast<std::size_t>(state.range(0)), 1, 20.0, qp));
    }
  }

  void BM_MultistartParallel(benchmark::State &state)
  {
    const SmoothProgram p = worst_altitude();
    SolverOptions o;
    o.multistart_count = static_cast<int>(state.range(0));
    for (auto _ : state)
    {
      benchmark::DoNotOptimize(multistart_minimize(p, o));
    }
  }

  void BM_MultistartSerial(benchmark::State &state)
  {
    const SmoothProgram p = worst_altitude();
    SolverOptions o;
    o.multistart_count = static_cast<int>(state.range(0));
    for (auto _ : state)
    {
      benchmark::DoNotOptimize(multistart_minimize_serial(p, o));
    }
  }
} // namespace

BENCHMARK(BM_MonteCarloParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartParallel)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartSerial)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
