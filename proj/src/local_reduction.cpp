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

#include "gsip/local_reduction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>

namespace gsip
{
  namespace
  {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // Bound for the auxiliary sigma variable of the capped separation programs.
    constexpr double kSigmaBound = 1e6;

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
      return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    bool usable(const SolverOutcome &o, const SolverOptions &opts)
    {
      return o.status == SolverStatus::Optimal ||
             (o.status == SolverStatus::IterLimit && o.max_violation <= 10.0 * opts.feas_tol);
    }

    // ------------------------------------------------------------------
    // master problem

    struct Block
    {
      const Scenario *scenario;
      DisjunctChoice choice;
    };

    Index block_rows(const GsipProblem &prob, const DisjunctChoice &c)
    {
      if (c.kind == DisjunctChoice::Kind::SatisfyG)
      {
        return 1 + prob.n_g;
      }
      return c.row >= 0 ? 1 : prob.n_h;
    }

    /// min gamma over (u, gamma) subject to the blocks, with gamma >= floor.
    SmoothProgram master_program(const GsipProblem &prob, std::vector<Block> blocks, double epsilon,
                                 double gamma_floor = -kInf)
    {
      SmoothProgram sp;
      const Index nu = prob.n_u;
      sp.n = nu + 1;
      sp.lower.resize(sp.n);
      sp.upper.resize(sp.n);
      sp.lower << prob.u_lower, std::clamp(gamma_floor, prob.gamma_lower, prob.gamma_upper);
      sp.upper << prob.u_upper, prob.gamma_upper;
      Index rows = 0;
      for (const auto &b : blocks)
      {
        rows += block_rows(prob, b.choice);
      }
      if (blocks.empty())
      {
        sp.objective = [nu](const Vector &z) { return z(nu); };
        sp.objective_gradient = [nu](const Vector &z) {
          Vector g = Vector::Zero(z.size());
          g(nu) = 1.0;
          return g;
        };
        return sp;
      }
      sp.evaluate = [&prob, blocks, rows, nu, epsilon](const Vector &z) {
        const Vector u = z.head(nu);
        const double gamma = z(nu);
        Vector c(rows);
        Index r = 0;
        for (const auto &b : blocks)
        {
          const ReducedValues v = evaluate_reduced(prob, u, b.scenario->w);
          if (b.choice.kind == DisjunctChoice::Kind::SatisfyG)
          {
            c(r++) = v.cost - gamma;
            c.segment(r, prob.n_g) = v.g;
            r += prob.n_g;
          }
          else if (b.choice.row >= 0)
          {
            c(r++) = v.h(b.choice.row) + epsilon;
          }
          else
          {
            c.segment(r, prob.n_h) = v.h.array() + epsilon;
            r += prob.n_h;
          }
        }
        return std::make_pair(gamma, c);
      };
      sp.differentiate = [&prob, blocks, rows, nu](const Vector &z) {
        const Vector u = z.head(nu);
        Vector grad = Vector::Zero(nu + 1);
        grad(nu) = 1.0;
        Matrix jac = Matrix::Zero(rows, nu + 1);
        Index r = 0;
        for (const auto &b : blocks)
        {
          const ReducedJacobian d = evaluate_reduced_jacobian(prob, u, b.scenario->w);
          if (b.choice.kind == DisjunctChoice::Kind::SatisfyG)
          {
            jac.block(r, 0, 1 + prob.n_g, nu) = d.d_du.topRows(1 + prob.n_g);
            jac(r, nu) = -1.0;
            r += 1 + prob.n_g;
          }
          else if (b.choice.row >= 0)
          {
            jac.block(r, 0, 1, nu) = d.d_du.row(1 + prob.n_g + b.choice.row);
            r += 1;
          }
          else
          {
            jac.block(r, 0, prob.n_h, nu) = d.d_du.bottomRows(prob.n_h);
            r += prob.n_h;
          }
        }
        return std::make_pair(grad, jac);
      };
      return sp;
    }

    struct NodeSolve
    {
      bool feasible = false;
      Vector z;
      double gamma = kInf;
    };

    /// Local solve from the warm start, then random restarts, then a
    /// feasibility phase that decides infeasibility.
    NodeSolve solve_master_program(const SmoothProgram &sp, const Vector &start, const ReductionOptions &opts)
    {
      NodeSolve out;
      SolverOutcome best = minimize(sp, start, opts.nlp);
      if (!usable(best, opts.nlp) && opts.master_restarts > 0)
      {
        SolverOptions ms = opts.nlp;
        ms.multistart_count = opts.master_restarts + 1;
        SolverOutcome other = multistart_minimize(sp, ms, start);
        if (better_outcome(other, best))
        {
          best = other;
        }
      }
      if (!usable(best, opts.nlp))
      {
        const FeasibilityOutcome feas = feasibility_phase(sp, opts.nlp, start);
        if (feas.residual > 10.0 * opts.nlp.feas_tol)
        {
          return out;
        }
        SolverOutcome again = minimize(sp, feas.z, opts.nlp);
        if (!usable(again, opts.nlp))
        {
          // feasible but the optimizer did not settle; keep the feasible point
          if (again.max_violation > 10.0 * opts.nlp.feas_tol)
          {
            again.z_star = feas.z;
            again.objective_value = feas.z(feas.z.size() - 1);
          }
        }
        best = again;
      }
      out.feasible = true;
      out.z = best.z_star;
      out.gamma = best.objective_value;
      return out;
    }

    class DisjunctSearch
    {
    public:
      DisjunctSearch(const EsipProblem &esip, const ScenarioSet &scen, const ReductionOptions &opts,
                     const DisjunctAssignment *warm, Vector start, double gamma_floor, DisjunctCache *cache)
          : esip_(esip), scen_(scen), opts_(opts), warm_(warm), start_(std::move(start)),
            gamma_floor_(gamma_floor), cache_(cache)
      {
      }

      MasterResult run()
      {
        build_options();
        DisjunctAssignment prefix;
        dfs(prefix, start_);
        MasterResult res;
        res.nlp_solves = solves_;
        if (!incumbent_)
        {
          return res;
        }
        res.feasible = true;
        res.decision = to_decision(incumbent_->z);
        res.assignment = incumbent_->assignment;
        return res;
      }

    private:
      struct Incumbent
      {
        double gamma;
        Vector z;
        DisjunctAssignment assignment;
      };

      DecisionPoint to_decision(const Vector &z) const
      {
        const Index nu = esip_.base.n_u;
        return {z.head(nu), z(nu)};
      }

      /// A choice whose single-scenario program is infeasible can never be
      /// part of a feasible assignment.
      bool choice_possible(const Scenario &s, const DisjunctChoice &c)
      {
        if (cache_ != nullptr)
        {
          if (const auto hit = cache_->find(s.w, c))
          {
            return *hit;
          }
        }
        const SmoothProgram sp = master_program(esip_.base, {Block{&s, c}}, esip_.epsilon);
        SolverOptions fo = opts_.nlp;
        fo.multistart_count = std::min(fo.multistart_count, 4);
        const bool ok = feasibility_phase(sp, fo, start_).residual <= 10.0 * opts_.nlp.feas_tol;
        if (cache_ != nullptr)
        {
          cache_->store(s.w, c, ok);
        }
        return ok;
      }

      void build_options()
      {
        const Index m = static_cast<Index>(scen_.size());
        options_.assign(static_cast<std::size_t>(m), {});
        for (Index i = 0; i < m; ++i)
        {
          auto &opts = options_[i];
          std::vector<DisjunctChoice> candidates;
          if (warm_ != nullptr && i < static_cast<Index>(warm_->size()))
          {
            candidates.push_back((*warm_)[i]);
          }
          candidates.push_back(DisjunctChoice::satisfy());
          if (esip_.negation_mode == NegationMode::PaperMax)
          {
            candidates.push_back(DisjunctChoice::refute(-1));
          }
          else
          {
            for (Index j = 0; j < esip_.base.n_h; ++j)
            {
              candidates.push_back(DisjunctChoice::refute(j));
            }
          }
          for (const auto &c : candidates)
          {
            if (std::find(opts.begin(), opts.end(), c) == opts.end() &&
                choice_possible(scen_[static_cast<std::size_t>(i)], c))
            {
              opts.push_back(c);
            }
          }
        }
      }

      std::vector<Block> blocks_of(const DisjunctAssignment &a) const
      {
        std::vector<Block> blocks;
        blocks.reserve(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
        {
          blocks.push_back({&scen_[i], a[i]});
        }
        return blocks;
      }

      NodeSolve solve(const DisjunctAssignment &a, const Vector &start)
      {
        ++solves_;
        const SmoothProgram sp = master_program(esip_.base, blocks_of(a), esip_.epsilon, gamma_floor_);
        return solve_master_program(sp, start, opts_);
      }

      bool budget_left() const { return solves_ < opts_.master_node_limit; }

      void dfs(DisjunctAssignment &prefix, const Vector &start)
      {
        if (!budget_left())
        {
          return;
        }
        const std::size_t level = prefix.size();
        Vector child_start = start;
        if (level == scen_.size())
        {
          const NodeSolve leaf = solve(prefix, start);
          if (leaf.feasible && (!incumbent_ || leaf.gamma < incumbent_->gamma - 1e-9))
          {
            incumbent_ = Incumbent{leaf.gamma, leaf.z, prefix};
          }
          return;
        }
        if (incumbent_ && level > 0)
        {
          const NodeSolve relaxed = solve(prefix, start);
          if (!relaxed.feasible || relaxed.gamma >= incumbent_->gamma - 1e-9)
          {
            return;
          }
          child_start = relaxed.z;
        }
        for (const auto &choice : options_[level])
        {
          prefix.push_back(choice);
          dfs(prefix, child_start);
          prefix.pop_back();
          if (!budget_left())
          {
            return;
          }
        }
      }

      const EsipProblem &esip_;
      const ScenarioSet &scen_;
      const ReductionOptions &opts_;
      const DisjunctAssignment *warm_;
      Vector start_;
      double gamma_floor_;
      std::vector<std::vector<DisjunctChoice>> options_;
      DisjunctCache *cache_;
      std::optional<Incumbent> incumbent_;
      int solves_ = 0;
    };

    Vector master_start(const GsipProblem &prob, const std::optional<DecisionPoint> &start)
    {
      Vector z(prob.n_u + 1);
      if (start)
      {
        z << start->u, start->gamma;
      }
      else
      {
        z << 0.5 * (prob.u_lower + prob.u_upper), prob.gamma_lower;
      }
      return z;
    }

    /// Adding scenarios only tightens the master, so the previous optimum
    /// bounds the next one from below.
    double master_floor(const std::optional<DecisionPoint> &start)
    {
      return start ? start->gamma : -kInf;
    }

    // ------------------------------------------------------------------
    // separation problem

    /// How the admissibility rows cap the separation objective.
    struct CapSpec
    {
      enum class Kind
      {
        None,     ///< maximize v_j over the admissible set
        Sigma,    ///< maximize sigma with sigma <= v_j and sigma <= h_l + eps
        Floor,    ///< maximize v_j with h_l + eps >= floor
      };
      Kind kind = Kind::None;
      std::vector<Index> rows; ///< capped admissibility rows
      double floor = 0.0;
    };

    /// Separation subprogram for combined row j at decision d. Variables are
    /// w, plus sigma last for CapSpec::Sigma.
    SmoothProgram separation_program(const GsipProblem &prob, const DecisionPoint &d, Index j,
                                     double epsilon, const CapSpec &cap)
    {
      SmoothProgram sp;
      const Index nw = prob.n_w;
      const Index nh = prob.n_h;
      const bool with_sigma = cap.kind == CapSpec::Kind::Sigma;
      const Index ncap = cap.kind == CapSpec::Kind::None ? 0 : static_cast<Index>(cap.rows.size());
      const Index rows = nh + ncap + (with_sigma ? 1 : 0);
      sp.n = nw + (with_sigma ? 1 : 0);
      sp.lower.resize(sp.n);
      sp.upper.resize(sp.n);
      sp.lower.head(nw) = prob.w_lower;
      sp.upper.head(nw) = prob.w_upper;
      if (with_sigma)
      {
        sp.lower(nw) = -kSigmaBound;
        sp.upper(nw) = kSigmaBound;
      }
      const Vector u = d.u;
      const double gamma = d.gamma;

      auto combined_row = [j, gamma](const ReducedValues &v) { return j == 0 ? v.cost - gamma : v.g(j - 1); };

      sp.evaluate = [&prob, u, nw, nh, rows, with_sigma, cap, epsilon, combined_row](const Vector &z) {
        const ReducedValues v = evaluate_reduced(prob, u, z.head(nw));
        const double vj = combined_row(v);
        Vector c(rows);
        c.head(nh) = -v.h;
        Index r = nh;
        if (with_sigma)
        {
          const double sigma = z(nw);
          for (Index l : cap.rows)
          {
            c(r++) = sigma - v.h(l) - epsilon;
          }
          c(r++) = sigma - vj;
          return std::make_pair(-sigma, c);
        }
        if (cap.kind == CapSpec::Kind::Floor)
        {
          for (Index l : cap.rows)
          {
            c(r++) = cap.floor - v.h(l) - epsilon;
          }
        }
        return std::make_pair(-vj, c);
      };
      sp.differentiate = [&prob, u, nw, nh, rows, with_sigma, cap, j](const Vector &z) {
        const ReducedJacobian d = evaluate_reduced_jacobian(prob, u, z.head(nw));
        const Index hrow = 1 + prob.n_g;
        Matrix jac = Matrix::Zero(rows, z.size());
        Vector grad = Vector::Zero(z.size());
        jac.block(0, 0, nh, nw) = -d.d_dw.middleRows(hrow, nh);
        Index r = nh;
        if (with_sigma)
        {
          for (Index l : cap.rows)
          {
            jac.block(r, 0, 1, nw) = -d.d_dw.row(hrow + l);
            jac(r, nw) = 1.0;
            ++r;
          }
          jac.block(r, 0, 1, nw) = -d.d_dw.row(j);
          jac(r, nw) = 1.0;
          grad(nw) = -1.0;
          return std::make_pair(grad, jac);
        }
        if (cap.kind == CapSpec::Kind::Floor)
        {
          for (Index l : cap.rows)
          {
            jac.block(r, 0, 1, nw) = -d.d_dw.row(hrow + l);
            ++r;
          }
        }
        grad.head(nw) = -d.d_dw.row(j).transpose();
        return std::make_pair(grad, jac);
      };
      return sp;
    }

    std::vector<Vector> separation_starts(const GsipProblem &prob, const DecisionPoint &d,
                                          const ReductionOptions &opts)
    {
      std::vector<Vector> starts;
      const int count = std::max(1, opts.separation_starts);
      if (prob.sample_admissible)
      {
        for (int k = 0; k < count; ++k)
        {
          starts.push_back(prob.sample_admissible(d.u, opts.nlp.seed * 1000003ULL + static_cast<std::uint64_t>(k)));
        }
        return starts;
      }
      SmoothProgram box;
      box.n = prob.n_w;
      box.lower = prob.w_lower;
      box.upper = prob.w_upper;
      box.objective = [](const Vector &) { return 0.0; };
      SolverOptions so = opts.nlp;
      so.multistart_count = count;
      return multistart_points(box, so);
    }

    std::vector<Index> all_rows(Index n)
    {
      std::vector<Index> rows(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i)
      {
        rows[i] = i;
      }
      return rows;
    }

    struct RowCandidate
    {
      bool found = false;
      Vector w;
      double sigma = -kInf;
      double depth = -kInf; ///< raw combined-row value at w
    };

    /// Keeps the candidate with larger sigma, then deeper raw violation.
    void consider(RowCandidate &best, const RowCandidate &c)
    {
      if (!c.found)
      {
        return;
      }
      if (!best.found || c.sigma > best.sigma + 1e-9 ||
          (std::abs(c.sigma - best.sigma) <= 1e-9 && c.depth > best.depth))
      {
        best = c;
      }
    }

    RowCandidate make_candidate(const EsipProblem &esip, const DecisionPoint &d, Index j, const Vector &w)
    {
      RowCandidate c;
      c.found = true;
      c.w = w;
      const Vector v = combined_constraints(esip.base, d, w);
      const Vector h = admissibility_values(esip.base, d, w);
      c.sigma = violation_from_rows(h, v, esip.epsilon, esip.negation_mode);
      c.depth = v(j);
      return c;
    }

    /// Row-j separation: raw maximization of v_j, then (when the admissibility
    /// cap binds) the capped problem, then a deepest-cut refinement among the
    /// sigma-optimal points.
    RowCandidate separate_row(const EsipProblem &esip, const DecisionPoint &d, Index j,
                              const std::vector<Vector> &starts, const ReductionOptions &opts)
    {
      const GsipProblem &prob = esip.base;
      RowCandidate best;
      const SmoothProgram raw = separation_program(prob, d, j, esip.epsilon, CapSpec{});
      const SolverOutcome raw_out = minimize_from_starts(raw, starts, opts.nlp, true);
      if (!usable(raw_out, opts.nlp))
      {
        return best;
      }
      best = make_candidate(esip, d, j, raw_out.z_star);
      const double raw_value = -raw_out.objective_value;
      if (best.sigma >= raw_value - 1e-9)
      {
        // the cap does not bind: sigma equals the row maximum
        return best;
      }

      std::vector<std::vector<Index>> cap_sets;
      if (esip.negation_mode == NegationMode::LogicalMin)
      {
        cap_sets.push_back(all_rows(prob.n_h));
      }
      else
      {
        for (Index l = 0; l < prob.n_h; ++l)
        {
          cap_sets.push_back({l});
        }
      }
      for (const auto &rows : cap_sets)
      {
        CapSpec cap{CapSpec::Kind::Sigma, rows, 0.0};
        const SmoothProgram capped = separation_program(prob, d, j, esip.epsilon, cap);
        std::vector<Vector> cstarts;
        for (const Vector &w : {Vector(raw_out.z_star), Vector(starts.front())})
        {
          Vector z(prob.n_w + 1);
          z << w, std::min(best.sigma, kSigmaBound);
          cstarts.push_back(z);
        }
        const SolverOutcome cap_out = minimize_from_starts(capped, cstarts, opts.nlp, false);
        if (!usable(cap_out, opts.nlp))
        {
          continue;
        }
        const Vector w_cap = cap_out.z_star.head(prob.n_w);
        RowCandidate cand = make_candidate(esip, d, j, w_cap);
        // deepest cut among points whose sigma matches the capped optimum
        CapSpec floor{CapSpec::Kind::Floor, rows, cand.sigma - 1e-10};
        const SmoothProgram deep = separation_program(prob, d, j, esip.epsilon, floor);
        const std::vector<Vector> dstart{w_cap};
        const SolverOutcome deep_out = minimize_from_starts(deep, dstart, opts.nlp, false);
        if (usable(deep_out, opts.nlp))
        {
          const RowCandidate refined = make_candidate(esip, d, j, deep_out.z_star);
          if (refined.sigma >= cand.sigma - 1e-9 && refined.depth > cand.depth)
          {
            cand = refined;
          }
        }
        consider(best, cand);
      }
      return best;
    }

    template <class RowFn>
    SeparationResult separate_all_rows(const GsipProblem &prob, const DecisionPoint &d,
                                       const ReductionOptions &opts, const RowFn &row_fn)
    {
      check_decision(prob, d);
      const std::vector<Vector> starts = separation_starts(prob, d, opts);
      const Index rows = 1 + prob.n_g;
      std::vector<RowCandidate> per_row(static_cast<std::size_t>(rows));
      std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
      for (Index j = 0; j < rows; ++j)
      {
        try
        {
          per_row[j] = row_fn(j, starts);
        }
        catch (...)
        {
#pragma omp critical(gsip_separation_error)
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

      SeparationResult res;
      RowCandidate best;
      Index best_row = 0;
      for (Index j = 0; j < rows; ++j)
      {
        const RowCandidate before = best;
        consider(best, per_row[j]);
        if (best.found && (!before.found || best.w.data() != before.w.data()))
        {
          best_row = j;
        }
      }
      if (!best.found)
      {
        // every row subproblem failed: decide whether the admissible set is empty
        SmoothProgram adm;
        adm.n = prob.n_w;
        adm.lower = prob.w_lower;
        adm.upper = prob.w_upper;
        const Vector u = d.u;
        adm.evaluate = [&prob, u](const Vector &w) {
          return std::make_pair(0.0, Vector(-evaluate_reduced(prob, u, w).h));
        };
        const FeasibilityOutcome feas = feasibility_phase(adm, opts.nlp, starts.front());
        if (feas.residual > 10.0 * opts.nlp.feas_tol)
        {
          res.admissible_set_empty = true;
          res.sigma_star = -kInf;
          res.scenario.w = feas.z;
          return res;
        }
        throw NumericalFailure("separation: every row subproblem failed on a non-empty admissible set");
      }
      res.scenario.w = best.w;
      res.scenario.violation_at_discovery = best.sigma;
      res.sigma_star = best.sigma;
      res.active_g_row = best_row;
      return res;
    }

    void record(SolveReport &rep, std::size_t k, const DecisionPoint &d, double sigma, Clock::time_point t0)
    {
      rep.gamma_history.push_back(d.gamma);
      rep.sigma_history.push_back(sigma);
      rep.log.push_back({k, d.gamma, sigma, seconds_since(t0), rep.scenarios.size()});
    }

    template <class MasterFn, class SeparationFn>
    SolveReport exchange_loop(const GsipProblem &prob, const ReductionOptions &opts, const MasterFn &master,
                              const SeparationFn &separate)
    {
      const auto t0 = Clock::now();
      SolveReport rep;
      rep.scenarios = ScenarioSet(opts.dup_tol);
      std::optional<DecisionPoint> current;
      for (int k = 1; k <= opts.max_outer_iters; ++k)
      {
        rep.iterations = static_cast<std::size_t>(k);
        MasterResult m = master(rep.scenarios, rep.assignment, current);
        if (!m.feasible)
        {
          rep.status = ReductionStatus::MasterInfeasible;
          rep.message = "master problem infeasible with " + std::to_string(rep.scenarios.size()) + " scenarios";
          rep.wall_time = seconds_since(t0);
          return rep;
        }
        rep.decision = m.decision;
        rep.assignment = m.assignment;
        current = m.decision;

        SeparationResult sep = separate(m.decision);
        record(rep, static_cast<std::size_t>(k), m.decision, sep.sigma_star, t0);
        if (sep.sigma_star <= opts.viol_tol)
        {
          rep.status = ReductionStatus::Converged;
          rep.message = sep.admissible_set_empty ? "admissible set empty at the decision" : "converged";
          rep.wall_time = seconds_since(t0);
          return rep;
        }
        sep.scenario.found_at_iteration = static_cast<std::size_t>(k);
        if (!rep.scenarios.add(sep.scenario))
        {
          std::ostringstream os;
          os << "separation returned an existing scenario with violation " << sep.sigma_star
             << " at iteration " << k;
          rep.status = ReductionStatus::IterationLimit;
          rep.message = os.str();
          rep.wall_time = seconds_since(t0);
          return rep;
        }
      }
      rep.status = ReductionStatus::IterationLimit;
      rep.message = "outer iteration limit reached";
      rep.wall_time = seconds_since(t0);
      (void)prob;
      return rep;
    }
  } // namespace

  std::optional<bool> DisjunctCache::find(const Vector &w, const DisjunctChoice &c) const
  {
    for (const auto &e : entries_)
    {
      if (e.choice == c && e.w.size() == w.size() && e.w == w)
      {
        return e.feasible;
      }
    }
    return std::nullopt;
  }

  void DisjunctCache::store(const Vector &w, const DisjunctChoice &c, bool feasible)
  {
    entries_.push_back({w, c, feasible});
  }

  std::string to_string(const DisjunctChoice &c)
  {
    if (c.kind == DisjunctChoice::Kind::SatisfyG)
    {
      return "satisfy";
    }
    return c.row >= 0 ? "refute:" + std::to_string(c.row) : "refute:all";
  }

  std::string_view to_string(ReductionStatus s)
  {
    switch (s)
    {
    case ReductionStatus::Converged:
      return "Converged";
    case ReductionStatus::IterationLimit:
      return "IterationLimit";
    case ReductionStatus::MasterInfeasible:
      return "MasterInfeasible";
    }
    return "Unknown";
  }

  void ReductionOptions::validate() const
  {
    nlp.validate();
    if (!(viol_tol > 0.0 && epsilon > 0.0 && viol_tol < epsilon))
    {
      throw ContractViolation("ReductionOptions: require 0 < viol_tol < epsilon");
    }
    if (max_outer_iters < 1 || dup_tol < 0.0 || separation_starts < 1 || master_node_limit < 1 ||
        master_restarts < 0)
    {
      throw ContractViolation("ReductionOptions: iteration limits must be positive");
    }
  }

  MasterResult master_step(const EsipProblem &esip, const ScenarioSet &scen, const ReductionOptions &opts,
                           const DisjunctAssignment *warm, const std::optional<DecisionPoint> &start,
                           DisjunctCache *cache)
  {
    DisjunctSearch search(esip, scen, opts, warm, master_start(esip.base, start), master_floor(start), cache);
    return search.run();
  }

  MasterResult standard_master_step(const GsipProblem &prob, const ScenarioSet &scen,
                                    const ReductionOptions &opts, const std::optional<DecisionPoint> &start)
  {
    std::vector<Block> blocks;
    for (const auto &s : scen)
    {
      blocks.push_back({&s, DisjunctChoice::satisfy()});
    }
    const SmoothProgram sp = master_program(prob, blocks, opts.epsilon, master_floor(start));
    const NodeSolve node = solve_master_program(sp, master_start(prob, start), opts);
    MasterResult res;
    res.nlp_solves = 1;
    res.feasible = node.feasible;
    if (node.feasible)
    {
      res.decision = {node.z.head(prob.n_u), node.z(prob.n_u)};
      res.assignment.assign(scen.size(), DisjunctChoice::satisfy());
    }
    return res;
  }

  SeparationResult separation_step(const EsipProblem &esip, const DecisionPoint &d, const ReductionOptions &opts)
  {
    return separate_all_rows(esip.base, d, opts, [&](Index j, const std::vector<Vector> &starts) {
      return separate_row(esip, d, j, starts, opts);
    });
  }

  SeparationResult standard_separation_step(const GsipProblem &prob, const DecisionPoint &d,
                                            const ReductionOptions &opts)
  {
    return separate_all_rows(prob, d, opts, [&](Index j, const std::vector<Vector> &starts) {
      RowCandidate c;
      const SmoothProgram raw = separation_program(prob, d, j, opts.epsilon, CapSpec{});
      const SolverOutcome out = minimize_from_starts(raw, starts, opts.nlp, true);
      if (usable(out, opts.nlp))
      {
        c.found = true;
        c.w = out.z_star;
        c.depth = combined_constraints(prob, d, c.w)(j);
        c.sigma = c.depth;
      }
      return c;
    });
  }

  SolveReport solve_esip(const EsipProblem &esip, const ReductionOptions &opts)
  {
    opts.validate();
    esip.base.validate();
    if (esip.epsilon != opts.epsilon)
    {
      throw ContractViolation("solve_esip: problem epsilon and options epsilon differ");
    }
    DisjunctCache cache;
    return exchange_loop(
        esip.base, opts,
        [&](const ScenarioSet &scen, const DisjunctAssignment &warm, const std::optional<DecisionPoint> &start) {
          return master_step(esip, scen, opts, &warm, start, &cache);
        },
        [&](const DecisionPoint &d) { return separation_step(esip, d, opts); });
  }

  SolveReport solve_standard_sip(const GsipProblem &prob, const ReductionOptions &opts)
  {
    opts.validate();
    prob.validate();
    return exchange_loop(
        prob, opts,
        [&](const ScenarioSet &scen, const DisjunctAssignment &, const std::optional<DecisionPoint> &start) {
          return standard_master_step(prob, scen, opts, start);
        },
        [&](const DecisionPoint &d) { return standard_separation_step(prob, d, opts); });
  }

} // namespace gsip
