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

#include "gsip/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

namespace gsip
{
  namespace
  {
    constexpr double kInf = std::numeric_limits<double>::infinity();

    Vector clamp_to_box(const Vector &z, const Vector &lo, const Vector &hi)
    {
      return z.cwiseMax(lo).cwiseMin(hi);
    }

    bool lexicographically_less(const Vector &a, const Vector &b)
    {
      for (Index i = 0; i < std::min(a.size(), b.size()); ++i)
      {
        if (a(i) != b(i))
        {
          return a(i) < b(i);
        }
      }
      return a.size() < b.size();
    }

    /// f, c and the derived augmented Lagrangian at one point.
    struct Sample
    {
      Vector z;
      double f = kInf;
      Vector c;
      double merit = kInf;
      bool ok = false;
      bool evaluated = false;
    };

    class Evaluator
    {
    public:
      explicit Evaluator(const SmoothProgram &p) : p_(p) {}

      Sample sample(const Vector &z) const
      {
        Sample s;
        s.z = z;
        s.evaluated = true;
        try
        {
          if (p_.evaluate)
          {
            auto [f, c] = p_.evaluate(z);
            s.f = f;
            s.c = std::move(c);
          }
          else
          {
            s.f = p_.objective(z);
            s.c = p_.ineq_constraints ? p_.ineq_constraints(z) : Vector();
          }
        }
        catch (const NumericalFailure &)
        {
          return s;
        }
        s.ok = std::isfinite(s.f) && s.c.allFinite();
        return s;
      }

      bool fused_derivatives() const { return static_cast<bool>(p_.differentiate); }

      std::pair<Vector, Matrix> derivatives(const Vector &z) const { return p_.differentiate(z); }

      Vector objective_gradient(const Vector &z) const
      {
        if (p_.objective_gradient)
        {
          return p_.objective_gradient(z);
        }
        if (p_.objective)
        {
          return finite_diff_gradient(p_.objective, z);
        }
        return finite_diff_gradient([this](const Vector &x) { return p_.evaluate(x).first; }, z);
      }

      Matrix constraint_jacobian(const Vector &z, Index m) const
      {
        if (m == 0)
        {
          return Matrix(0, z.size());
        }
        if (p_.constraint_jacobian)
        {
          return p_.constraint_jacobian(z);
        }
        if (p_.ineq_constraints)
        {
          return finite_diff_jacobian(p_.ineq_constraints, z);
        }
        return finite_diff_jacobian([this](const Vector &x) { return p_.evaluate(x).second; }, z);
      }

    private:
      const SmoothProgram &p_;
    };

    /// Augmented Lagrangian for inequalities (Rockafellar form).
    double augmented_value(double f, const Vector &c, const Vector &mu, double rho)
    {
      double value = f;
      for (Index j = 0; j < c.size(); ++j)
      {
        const double t = std::max(0.0, mu(j) + rho * c(j));
        value += (t * t - mu(j) * mu(j)) / (2.0 * rho);
      }
      return value;
    }

    Vector shifted_multipliers(const Vector &c, const Vector &mu, double rho)
    {
      return (mu + rho * c).cwiseMax(0.0);
    }

    /// rho * J_A^T J_A over the rows flagged in `rows`.
    template <class Mask>
    Matrix penalty_curvature(const Matrix &jac, const Mask &rows, double rho)
    {
      const Index n = jac.cols();
      Matrix G = Matrix::Zero(n, n);
      for (Index j = 0; j < jac.rows(); ++j)
      {
        if (rows(j))
        {
          G.selfadjointView<Eigen::Lower>().rankUpdate(jac.row(j).transpose(), rho);
        }
      }
      return G.selfadjointView<Eigen::Lower>();
    }

    double max_violation(const Vector &c)
    {
      return c.size() == 0 ? 0.0 : std::max(0.0, c.maxCoeff());
    }

    struct InnerResult
    {
      Sample at;
      Vector gradient;
      double projected_gradient = kInf;
      int iterations = 0;
      bool converged = false;
    };

    /// Merit gradient plus the part of the merit Hessian that is known
    /// exactly (the penalty Gauss-Newton term); `curvature` may be empty.
    struct MeritDerivatives
    {
      Vector gradient;
      Matrix curvature;
    };

    /// Projected quasi-Newton on the box for a differentiable merit.
    ///
    /// The model Hessian is curvature + B, where B is a damped BFGS estimate of
    /// the remaining second-order term. Variables at a bound with an outward
    /// gradient take a diagonally scaled step; the free block takes the full
    /// Newton step (two-metric projection).
    template <class Merit, class Derivs, class Stop>
    InnerResult projected_quasi_newton(Sample start, const Vector &lo, const Vector &hi, double tol,
                                       int max_iter, const Merit &merit, const Derivs &derivs,
                                       const Stop &stop_early)
    {
      const Index n = start.z.size();
      const Vector width = (hi - lo).cwiseMax(1e-12);
      const double max_step = width.lpNorm<Eigen::Infinity>();
      InnerResult out;
      out.at = std::move(start);
      merit(out.at);
      MeritDerivatives md = derivs(out.at);
      Vector &g = md.gradient;
      if (!g.allFinite())
      {
        out.gradient = g;
        return out;
      }
      Matrix B = Matrix::Identity(n, n);
      bool scaled = false;

      auto model = [&](const MeritDerivatives &m) {
        Matrix M = B;
        if (m.curvature.size() != 0)
        {
          M += m.curvature;
        }
        const double reg = 1e-10 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
        M.diagonal().array() += reg;
        return M;
      };

      for (int it = 0; it < max_iter; ++it)
      {
        const Vector pg = clamp_to_box(out.at.z - g, lo, hi) - out.at.z;
        out.projected_gradient = pg.lpNorm<Eigen::Infinity>();
        if (out.projected_gradient <= tol || stop_early(out.at))
        {
          out.converged = true;
          break;
        }

        const double eps_active = std::min(1e-3, out.projected_gradient);
        std::vector<Index> free;
        std::vector<bool> active(static_cast<std::size_t>(n), false);
        for (Index i = 0; i < n; ++i)
        {
          active[i] = (out.at.z(i) <= lo(i) + eps_active && g(i) > 0.0) ||
                      (out.at.z(i) >= hi(i) - eps_active && g(i) < 0.0);
          if (!active[i])
          {
            free.push_back(i);
          }
        }

        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt)
        {
          const Matrix M = model(md);
          Vector d(n);
          for (Index i = 0; i < n; ++i)
          {
            if (active[i])
            {
              d(i) = -g(i) / std::max(M(i, i), 1e-300);
            }
          }
          if (!free.empty())
          {
            const Index nf = static_cast<Index>(free.size());
            Matrix Mf(nf, nf);
            Vector gf(nf);
            for (Index a = 0; a < nf; ++a)
            {
              gf(a) = g(free[a]);
              for (Index b = 0; b < nf; ++b)
              {
                Mf(a, b) = M(free[a], free[b]);
              }
            }
            const Eigen::LDLT<Matrix> ldlt(Mf);
            Vector df = ldlt.solve(-gf);
            if (ldlt.info() != Eigen::Success || !df.allFinite() || gf.dot(df) >= 0.0)
            {
              df = -gf.cwiseQuotient(Mf.diagonal().cwiseMax(1e-300));
            }
            for (Index a = 0; a < nf; ++a)
            {
              d(free[a]) = df(a);
            }
          }
          if (!d.allFinite() || g.dot(d) >= 0.0)
          {
            d = -g;
          }
          const double dnorm = d.lpNorm<Eigen::Infinity>();
          if (dnorm > max_step)
          {
            d *= max_step / dnorm;
          }

          double alpha = 1.0;
          for (int ls = 0; ls < 60; ++ls, alpha *= 0.5)
          {
            const Vector trial_z = clamp_to_box(out.at.z + alpha * d, lo, hi);
            const Vector step = trial_z - out.at.z;
            if (step.lpNorm<Eigen::Infinity>() == 0.0)
            {
              break;
            }
            Sample trial = Sample{};
            trial.z = trial_z;
            merit(trial);
            if (!trial.ok || !std::isfinite(trial.merit))
            {
              continue;
            }
            const double decrease = g.dot(step);
            if (trial.merit <= out.at.merit + 1e-4 * decrease && decrease < 0.0)
            {
              MeritDerivatives md_new = derivs(trial);
              if (!md_new.gradient.allFinite())
              {
                continue;
              }
              Vector y = md_new.gradient - g;
              if (md_new.curvature.size() != 0)
              {
                y.noalias() -= md_new.curvature * step;
              }
              const double sy = step.dot(y);
              if (!scaled && sy > 1e-12 * step.norm() * y.norm())
              {
                B = Matrix::Identity(n, n) * (y.squaredNorm() / sy);
                scaled = true;
              }
              else if (!scaled)
              {
                B = Matrix::Identity(n, n) * 1e-8;
                scaled = true;
              }
              // damped BFGS keeps B positive definite
              const Vector Bs = B * step;
              const double sBs = step.dot(Bs);
              if (sBs > 1e-300)
              {
                const double theta = sy >= 0.2 * sBs ? 1.0 : 0.8 * sBs / (sBs - sy);
                const Vector r = theta * y + (1.0 - theta) * Bs;
                const double sr = step.dot(r);
                if (sr > 1e-300)
                {
                  B += (r * r.transpose()) / sr - (Bs * Bs.transpose()) / sBs;
                }
              }
              out.at = std::move(trial);
              md = std::move(md_new);
              accepted = true;
              break;
            }
          }
          if (!accepted)
          {
            if (!scaled)
            {
              break;
            }
            B = Matrix::Identity(n, n);
            scaled = false;
          }
        }
        out.iterations = it + 1;
        if (!accepted)
        {
          break;
        }
      }
      const Vector pg = clamp_to_box(out.at.z - g, lo, hi) - out.at.z;
      out.projected_gradient = pg.lpNorm<Eigen::Infinity>();
      out.converged = out.converged || out.projected_gradient <= tol;
      out.gradient = g;
      return out;
    }

    std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
    {
      // splitmix64 finalizer over (seed, stream)
      std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    }

    double unit_draw(std::mt19937_64 &gen)
    {
      return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }

    template <class Fn>
    std::vector<SolverOutcome> run_starts(const std::vector<Vector> &starts, const Fn &fn,
                                          bool parallel)
    {
      std::vector<SolverOutcome> outcomes(starts.size());
      std::exception_ptr error;
      const int count = static_cast<int>(starts.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
      for (int i = 0; i < count; ++i)
      {
        try
        {
          outcomes[i] = fn(starts[i]);
          outcomes[i].start_index = i;
        }
        catch (...)
        {
#pragma omp critical(gsip_multistart_error)
          if (!error)
          {
            error = std::current_exception();
          }
        }
      }
      if (error)
      {
        std::rethrow_exception(error);
      }
      return outcomes;
    }

    int status_rank(SolverStatus s)
    {
      switch (s)
      {
      case SolverStatus::Optimal:
        return 0;
      case SolverStatus::IterLimit:
        return 1;
      case SolverStatus::Infeasible:
        return 2;
      case SolverStatus::NumericalFailure:
        return 3;
      }
      return 4;
    }

    SolverOutcome reduce_outcomes(const std::vector<SolverOutcome> &outcomes)
    {
      const SolverOutcome *best = nullptr;
      for (const auto &o : outcomes)
      {
        if (best == nullptr || better_outcome(o, *best))
        {
          best = &o;
        }
      }
      return best ? *best : SolverOutcome{};
    }

    SolverOutcome multistart_impl(const SmoothProgram &p, const SolverOptions &opts,
                                  const std::optional<Vector> &first, bool parallel)
    {
      const auto starts = multistart_points(p, opts, first);
      return reduce_outcomes(
          run_starts(starts, [&](const Vector &s) { return minimize(p, s, opts); }, parallel));
    }
  } // namespace

  std::string_view to_string(SolverStatus status)
  {
    switch (status)
    {
    case SolverStatus::Optimal:
      return "Optimal";
    case SolverStatus::Infeasible:
      return "Infeasible";
    case SolverStatus::IterLimit:
      return "IterLimit";
    case SolverStatus::NumericalFailure:
      return "NumericalFailure";
    }
    return "Unknown";
  }

  void SmoothProgram::validate() const
  {
    if (n <= 0 || lower.size() != n || upper.size() != n)
    {
      throw ContractViolation("SmoothProgram: inconsistent dimension or bounds");
    }
    if (!(lower.array() <= upper.array()).all())
    {
      throw ContractViolation("SmoothProgram: lower > upper");
    }
    if (!objective && !evaluate)
    {
      throw ContractViolation("SmoothProgram: missing objective");
    }
  }

  void SolverOptions::validate() const
  {
    if (!(feas_tol > 0.0 && opt_tol > 0.0 && penalty_init > 0.0 && penalty_growth > 1.0 &&
          max_outer > 0 && max_inner > 0 && multistart_count > 0))
    {
      throw ContractViolation("SolverOptions: tolerances must be positive, penalty_growth > 1, "
                              "iteration counts positive");
    }
  }

  Vector finite_diff_gradient(const std::function<double(const Vector &)> &fn, const Vector &z,
                              double h)
  {
    Vector grad(z.size());
    Vector probe = z;
    for (Index i = 0; i < z.size(); ++i)
    {
      const double step = h > 0.0 ? h : finite_diff_step(z(i));
      probe(i) = z(i) + step;
      const double up = fn(probe);
      probe(i) = z(i) - step;
      const double down = fn(probe);
      probe(i) = z(i);
      if (!std::isfinite(up) || !std::isfinite(down))
      {
        throw NumericalFailure("non-finite value in finite-difference stencil");
      }
      grad(i) = (up - down) / (2.0 * step);
    }
    return grad;
  }

  Matrix finite_diff_jacobian(const std::function<Vector(const Vector &)> &fn, const Vector &z,
                              double h)
  {
    Matrix jac;
    Vector probe = z;
    for (Index i = 0; i < z.size(); ++i)
    {
      const double step = h > 0.0 ? h : finite_diff_step(z(i));
      probe(i) = z(i) + step;
      const Vector up = fn(probe);
      probe(i) = z(i) - step;
      const Vector down = fn(probe);
      probe(i) = z(i);
      if (!up.allFinite() || !down.allFinite())
      {
        throw NumericalFailure("non-finite value in finite-difference stencil");
      }
      if (i == 0)
      {
        jac.resize(up.size(), z.size());
      }
      jac.col(i) = (up - down) / (2.0 * step);
    }
    return jac;
  }

  bool better_outcome(const SolverOutcome &a, const SolverOutcome &b)
  {
    const int ra = status_rank(a.status);
    const int rb = status_rank(b.status);
    if (ra != rb)
    {
      return ra < rb;
    }
    if (a.status != SolverStatus::Optimal && a.max_violation != b.max_violation)
    {
      return a.max_violation < b.max_violation;
    }
    if (a.objective_value != b.objective_value)
    {
      return a.objective_value < b.objective_value;
    }
    return lexicographically_less(a.z_star, b.z_star);
  }

  SolverOutcome minimize(const SmoothProgram &p, const Vector &start, const SolverOptions &opts)
  {
    p.validate();
    opts.validate();
    if (start.size() != p.n)
    {
      throw ContractViolation("minimize: start has wrong dimension");
    }
    const Evaluator eval(p);
    SolverOutcome out;

    Sample current = eval.sample(clamp_to_box(start, p.lower, p.upper));
    if (!current.ok)
    {
      out.z_star = current.z;
      out.status = SolverStatus::NumericalFailure;
      out.objective_value = current.f;
      out.max_violation = kInf;
      return out;
    }
    const Index m = current.c.size();
    Vector mu = Vector::Zero(m);
    double rho = opts.penalty_init;
    constexpr double kMaxPenalty = 1e12;
    constexpr double kStallPenalty = 1e6;

    double accepted_excess = kInf;
    double previous_violation = kInf;
    Sample accepted_sample = current;
    Vector accepted_mu = mu;
    bool stalled = false;

    for (int round = 0; round < opts.max_outer; ++round)
    {
      out.outer_rounds = round + 1;
      auto merit = [&](Sample &s) {
        if (!s.evaluated)
        {
          s = eval.sample(s.z);
        }
        s.merit = s.ok ? augmented_value(s.f, s.c, mu, rho) : kInf;
      };
      auto gradient = [&](const Sample &s) -> MeritDerivatives {
        MeritDerivatives md;
        Matrix jac;
        if (eval.fused_derivatives())
        {
          auto [grad, j] = eval.derivatives(s.z);
          md.gradient = std::move(grad);
          jac = std::move(j);
        }
        else
        {
          md.gradient = eval.objective_gradient(s.z);
          jac = eval.constraint_jacobian(s.z, m);
        }
        if (m > 0)
        {
          md.gradient.noalias() += jac.transpose() * shifted_multipliers(s.c, mu, rho);
          md.curvature = penalty_curvature(jac, (mu + rho * s.c).array() > 0.0, rho);
        }
        return md;
      };
      InnerResult inner;
      try
      {
        inner = projected_quasi_newton(current, p.lower, p.upper, opts.opt_tol, opts.max_inner, merit, gradient,
                               [](const Sample &) { return false; });
      }
      catch (const NumericalFailure &)
      {
        out.status = SolverStatus::NumericalFailure;
        out.z_star = current.z;
        out.objective_value = current.f;
        out.max_violation = max_violation(current.c);
        return out;
      }
      out.inner_iterations += inner.iterations;
      Sample candidate = inner.at;
      const double viol = max_violation(candidate.c);
      const double excess = std::max(0.0, viol - opts.feas_tol);

      if (excess > accepted_excess + 1e-12)
      {
        // reject: infeasibility grew, retry from the last accepted point
        current = accepted_sample;
        mu = accepted_mu;
        if (rho >= kMaxPenalty)
        {
          stalled = true;
          break;
        }
        rho = std::min(kMaxPenalty, rho * opts.penalty_growth);
        continue;
      }

      accepted_excess = excess;
      out.infeasibility_history.push_back(excess);
      {
        // a large penalty that no longer moves the violation signals infeasibility
        const auto &hist = out.infeasibility_history;
        const std::size_t n = hist.size();
        if (rho >= kStallPenalty && n >= 4 && hist[n - 1] > 0.0 && hist[n - 1] >= 0.99 * hist[n - 4])
        {
          current = candidate;
          accepted_sample = candidate;
          stalled = true;
          break;
        }
      }
      const Vector mu_new = shifted_multipliers(candidate.c, mu, rho);
      double complementarity = 0.0;
      for (Index j = 0; j < m; ++j)
      {
        complementarity = std::max(complementarity, std::min(mu_new(j), -candidate.c(j)));
      }
      mu = mu_new;
      current = candidate;
      current.merit = kInf;
      accepted_sample = current;
      accepted_mu = mu;
      out.stationarity = inner.projected_gradient;

      if (viol <= opts.feas_tol && inner.converged &&
          complementarity <= std::max(opts.feas_tol, opts.opt_tol))
      {
        out.status = SolverStatus::Optimal;
        break;
      }
      if (m == 0 && !inner.converged && inner.iterations < opts.max_inner)
      {
        // line search stalled on an unconstrained problem
        stalled = true;
        break;
      }
      if (viol > 0.25 * previous_violation && rho < kMaxPenalty)
      {
        rho = std::min(kMaxPenalty, rho * opts.penalty_growth);
      }
      previous_violation = viol;
    }

    out.z_star = accepted_sample.z;
    out.objective_value = accepted_sample.f;
    out.max_violation = max_violation(accepted_sample.c);
    if (out.status != SolverStatus::Optimal)
    {
      const auto &hist = out.infeasibility_history;
      const bool decreasing = hist.size() >= 2 ? hist.back() < hist[hist.size() - 2] : true;
      if (out.max_violation <= opts.feas_tol || (!stalled && decreasing))
      {
        out.status = SolverStatus::IterLimit;
      }
      else
      {
        out.status = SolverStatus::Infeasible;
      }
    }
    return out;
  }

  std::vector<Vector> multistart_points(const SmoothProgram &p, const SolverOptions &opts,
                                        const std::optional<Vector> &first)
  {
    p.validate();
    opts.validate();
    std::vector<Vector> starts;
    starts.reserve(static_cast<std::size_t>(opts.multistart_count));
    starts.push_back(first ? clamp_to_box(*first, p.lower, p.upper) : Vector(0.5 * (p.lower + p.upper)));
    for (int k = 1; k < opts.multistart_count; ++k)
    {
      std::mt19937_64 gen(mix_seed(opts.seed, static_cast<std::uint64_t>(k)));
      Vector z(p.n);
      for (Index i = 0; i < p.n; ++i)
      {
        z(i) = p.lower(i) + unit_draw(gen) * (p.upper(i) - p.lower(i));
      }
      starts.push_back(std::move(z));
    }
    return starts;
  }

  SolverOutcome multistart_minimize(const SmoothProgram &p, const SolverOptions &opts,
                                    const std::optional<Vector> &first)
  {
    return multistart_impl(p, opts, first, true);
  }

  SolverOutcome minimize_from_starts(const SmoothProgram &p, std::span<const Vector> starts,
                                     const SolverOptions &opts, bool parallel)
  {
    const std::vector<Vector> copy(starts.begin(), starts.end());
    return reduce_outcomes(
        run_starts(copy, [&](const Vector &s) { return minimize(p, s, opts); }, parallel));
  }

  SolverOutcome multistart_minimize_serial(const SmoothProgram &p, const SolverOptions &opts,
                                           const std::optional<Vector> &first)
  {
    return multistart_impl(p, opts, first, false);
  }

  FeasibilityOutcome feasibility_phase(const SmoothProgram &p, const SolverOptions &opts,
                                       const std::optional<Vector> &first)
  {
    p.validate();
    opts.validate();
    FeasibilityOutcome result;
    if (!p.ineq_constraints && !p.evaluate)
    {
      result.residual = 0.0;
      result.z = first ? clamp_to_box(*first, p.lower, p.upper) : Vector(0.5 * (p.lower + p.upper));
      result.status = SolverStatus::Optimal;
      return result;
    }
    const Evaluator eval(p);
    const double target = 0.1 * opts.feas_tol;
    const auto starts = multistart_points(p, opts, first);

    auto one_start = [&](const Vector &s) -> SolverOutcome {
      SolverOutcome o;
      Sample at = eval.sample(s);
      if (!at.ok)
      {
        o.z_star = s;
        o.max_violation = kInf;
        o.status = SolverStatus::NumericalFailure;
        return o;
      }
      auto merit = [&](Sample &smp) {
        if (!smp.evaluated)
        {
          smp = eval.sample(smp.z);
        }
        smp.merit = smp.ok ? 0.5 * smp.c.cwiseMax(0.0).squaredNorm() : kInf;
      };
      auto gradient = [&](const Sample &smp) -> MeritDerivatives {
        const Matrix jac = eval.fused_derivatives() ? eval.derivatives(smp.z).second
                                                    : eval.constraint_jacobian(smp.z, smp.c.size());
        MeritDerivatives md;
        md.gradient = jac.transpose() * smp.c.cwiseMax(0.0);
        md.curvature = penalty_curvature(jac, smp.c.array() > 0.0, 1.0);
        return md;
      };
      auto done = [&](const Sample &smp) { return max_violation(smp.c) <= target; };
      InnerResult inner = projected_quasi_newton(at, p.lower, p.upper, 1e-14, opts.max_inner * 2, merit, gradient, done);
      o.z_star = inner.at.z;
      o.max_violation = max_violation(inner.at.c);
      o.objective_value = o.max_violation;
      o.inner_iterations = inner.iterations;
      o.status = o.max_violation <= opts.feas_tol ? SolverStatus::Optimal : SolverStatus::Infeasible;
      return o;
    };

    const auto outcomes = run_starts(starts, one_start, true);
    const SolverOutcome best = reduce_outcomes(outcomes);
    result.residual = best.max_violation;
    result.z = best.z_star;
    result.status = best.status;
    return result;
  }

} // namespace gsip
