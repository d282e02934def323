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

#include "gsip/quadrotor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/AutoDiff>

namespace gsip::quad
{
  namespace
  {
    using DerivVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 64, 1>;
    using AD = Eigen::AutoDiffScalar<DerivVector>;

    template <class S>
    using StateT = std::array<S, 6>;

    /// One midpoint step with thrusts (u1, u2) held across the interval.
    template <class S>
    StateT<S> midpoint_step(const StateT<S> &x, const S &u1, const S &u2, const QuadParams &p)
    {
      using std::cos;
      using std::sin;
      const double ts = p.sample_time;
      const S total = u1 + u2;
      const S psi_dd = p.arm * (u1 - u2) / p.inertia;
      StateT<S> next;
      next[5] = x[5] + ts * psi_dd;
      next[4] = x[4] + 0.5 * ts * (x[5] + next[5]);
      const S r_dd0 = sin(x[4]) * total / p.mass;
      const S r_dd1 = sin(next[4]) * total / p.mass;
      const S s_dd0 = cos(x[4]) * total / p.mass - p.gravity;
      const S s_dd1 = cos(next[4]) * total / p.mass - p.gravity;
      next[1] = x[1] + 0.5 * ts * (r_dd0 + r_dd1);
      next[3] = x[3] + 0.5 * ts * (s_dd0 + s_dd1);
      next[0] = x[0] + 0.5 * ts * (x[1] + next[1]);
      next[2] = x[2] + 0.5 * ts * (x[3] + next[3]);
      return next;
    }

    template <class S>
    std::vector<StateT<S>> propagate(const std::vector<S> &thrusts, const QuadParams &p)
    {
      std::vector<StateT<S>> xs;
      xs.reserve(static_cast<std::size_t>(p.horizon) + 1);
      StateT<S> x0;
      for (int i = 0; i < 6; ++i)
      {
        x0[i] = S(p.x0(i));
      }
      xs.push_back(x0);
      for (int k = 0; k < p.horizon; ++k)
      {
        xs.push_back(midpoint_step(xs.back(), thrusts[2 * k], thrusts[2 * k + 1], p));
      }
      return xs;
    }

    template <class S>
    std::vector<S> thrusts_of(VariantId variant, const std::vector<S> &v, const std::vector<S> &w,
                              const QuadParams &p)
    {
      std::vector<S> out(v.size());
      for (int k = 0; k < p.horizon; ++k)
      {
        if (variant == VariantId::Rsip)
        {
          out[2 * k] = v[2 * k] * (1.0 + w[k]);
          out[2 * k + 1] = v[2 * k + 1] * (1.0 + w[k]);
        }
        else
        {
          out[2 * k] = v[2 * k] + w[2 * k];
          out[2 * k + 1] = v[2 * k + 1] + w[2 * k + 1];
        }
      }
      return out;
    }

    template <class S>
    S cost_of(const std::vector<StateT<S>> &xs, const QuadParams &p)
    {
      S total(0.0);
      for (std::size_t i = 1; i < xs.size(); ++i)
      {
        const S dr = xs[i][0] - p.r_ref;
        const S ds = xs[i][2] - p.s_ref;
        total += dr * dr + ds * ds;
      }
      return total;
    }

    template <class S>
    void path_rows_of(const std::vector<StateT<S>> &xs, const QuadParams &p, std::vector<S> &rows)
    {
      for (std::size_t i = 1; i < xs.size(); ++i)
      {
        rows.push_back(p.s_lo - xs[i][2]);
        rows.push_back(xs[i][2] - p.s_hi);
      }
    }

    template <class S>
    S band_scale(const S &v, const QuadParams &p)
    {
      using std::abs;
      return p.magnitude_bands ? S(abs(v)) : v;
    }

    /// Admissibility rows (h >= 0) for each variant.
    template <class S>
    void admissibility_of(VariantId variant, const std::vector<S> &v, const std::vector<S> &w,
                          const QuadParams &p, std::vector<S> &rows)
    {
      const double frac = p.uncert_frac;
      const double bound = p.union_bound;
      for (int k = 0; k < p.horizon; ++k)
      {
        switch (variant)
        {
        case VariantId::Esip:
        {
          const S &v1 = v[2 * k];
          const S &v2 = v[2 * k + 1];
          const S &w1 = w[2 * k];
          const S &w2 = w[2 * k + 1];
          const S b1 = frac * band_scale(v1, p);
          const S b2 = frac * band_scale(v2, p);
          const S coupling = w1 * v2 - w2 * v1;
          rows.push_back(b1 - w1);
          rows.push_back(w1 + b1);
          rows.push_back(b2 - w2);
          rows.push_back(w2 + b2);
          rows.push_back(coupling);
          rows.push_back(-coupling);
          break;
        }
        case VariantId::Sip1:
        {
          const S &w1 = w[2 * k];
          const S &w2 = w[2 * k + 1];
          rows.push_back(bound - w1);
          rows.push_back(w1 + bound);
          rows.push_back(bound - w2);
          rows.push_back(w2 + bound);
          rows.push_back(w1 * w2);
          break;
        }
        case VariantId::Sip2:
        {
          const S &w1 = w[2 * k];
          const S &w2 = w[2 * k + 1];
          rows.push_back(bound - w1);
          rows.push_back(w1 + bound);
          rows.push_back(bound - w2);
          rows.push_back(w2 + bound);
          rows.push_back(w1 - w2);
          rows.push_back(w2 - w1);
          break;
        }
        case VariantId::Rsip:
          rows.push_back(frac - w[k]);
          rows.push_back(w[k] + frac);
          break;
        }
      }
    }

    int rows_per_step(VariantId id)
    {
      switch (id)
      {
      case VariantId::Esip:
      case VariantId::Sip2:
        return 6;
      case VariantId::Sip1:
        return 5;
      case VariantId::Rsip:
        return 2;
      }
      return 0;
    }

    Trajectory to_trajectory(const std::vector<StateT<double>> &xs)
    {
      Trajectory t;
      t.states.reserve(xs.size());
      for (const auto &x : xs)
      {
        State s;
        s << x[0], x[1], x[2], x[3], x[4], x[5];
        t.states.push_back(s);
      }
      return t;
    }

    std::vector<double> to_std(const Vector &v) { return {v.data(), v.data() + v.size()}; }

    Vector flatten(const Trajectory &t)
    {
      Vector x(6 * static_cast<Index>(t.states.size()));
      for (std::size_t k = 0; k < t.states.size(); ++k)
      {
        x.segment<6>(6 * static_cast<Index>(k)) = t.states[k];
      }
      return x;
    }

    Trajectory unflatten(const Vector &x)
    {
      Trajectory t;
      for (Index k = 0; k + 6 <= x.size(); k += 6)
      {
        t.states.push_back(x.segment<6>(k));
      }
      return t;
    }

    std::uint64_t mix(std::uint64_t seed, std::uint64_t stream)
    {
      std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      return z ^ (z >> 31);
    }

    double unit_draw(std::mt19937_64 &gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

    void require(bool ok, const std::string &what)
    {
      if (!ok)
      {
        throw ContractViolation(what);
      }
    }

    Index plan_size(const QuadParams &p) { return 2 * static_cast<Index>(p.horizon); }

    Index disturbance_size(VariantId id, const QuadParams &p)
    {
      return id == VariantId::Rsip ? static_cast<Index>(p.horizon) : plan_size(p);
    }

    struct SampleStats
    {
      double cost = 0.0;
      bool violated = false;
    };

    SampleStats evaluate_sample(const ThrustPlan &plan, const Disturbance &dist, const QuadParams &p)
    {
      const Trajectory traj = simulate(plan, dist, VariantId::Esip, p);
      const Vector rows = path_constraint_rows(traj, p);
      return {cost(traj, p), rows.maxCoeff() > kViolationThreshold};
    }

    McReport summarize(const std::vector<SampleStats> &stats, double gamma)
    {
      McReport r;
      r.samples = stats.size();
      r.gamma = gamma;
      if (stats.empty())
      {
        return r;
      }
      double sum = 0.0;
      r.worst_cost = stats.front().cost;
      for (const auto &s : stats)
      {
        sum += s.cost;
        r.worst_cost = std::max(r.worst_cost, s.cost);
        r.violation_count += s.violated ? 1U : 0U;
      }
      r.avg_cost = sum / static_cast<double>(stats.size());
      return r;
    }

    McReport monte_carlo_impl(const ThrustPlan &plan, std::size_t n, std::uint64_t seed, double gamma,
                              const QuadParams &p, bool parallel)
    {
      require(n >= 1, "monte_carlo needs at least one sample");
      require(plan.v.size() == plan_size(p), "monte_carlo: plan has wrong length");
      std::vector<SampleStats> stats(n);
      const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (parallel)
      for (long long i = 0; i < count; ++i)
      {
        const Disturbance d = sample_disturbance(plan, seed, static_cast<std::uint64_t>(i), p);
        stats[static_cast<std::size_t>(i)] = evaluate_sample(plan, d, p);
      }
      return summarize(stats, gamma);
    }
  } // namespace

  void QuadParams::validate() const
  {
    require(mass > 0 && inertia > 0 && arm > 0 && gravity > 0 && sample_time > 0,
            "QuadParams: physical constants must be positive");
    require(horizon >= 1, "QuadParams: horizon must be >= 1");
    require(v_lo <= v_hi && s_lo <= s_hi && uncert_frac >= 0 && union_bound >= 0,
            "QuadParams: inconsistent bounds");
  }

  std::string_view to_string(VariantId id)
  {
    switch (id)
    {
    case VariantId::Esip:
      return "esip";
    case VariantId::Sip1:
      return "sip1";
    case VariantId::Sip2:
      return "sip2";
    case VariantId::Rsip:
      return "rsip";
    }
    return "unknown";
  }

  VariantId variant_from_string(std::string_view name)
  {
    if (name == "esip")
      return VariantId::Esip;
    if (name == "sip1")
      return VariantId::Sip1;
    if (name == "sip2")
      return VariantId::Sip2;
    if (name == "rsip")
      return VariantId::Rsip;
    throw ContractViolation("unknown variant '" + std::string(name) + "' (expected esip|sip1|sip2|rsip)");
  }

  Accelerations accelerations(const State &state, double u1, double u2, const QuadParams &p)
  {
    const double total = u1 + u2;
    return {std::sin(state(4)) * total / p.mass, std::cos(state(4)) * total / p.mass - p.gravity,
            p.arm * (u1 - u2) / p.inertia};
  }

  Vector realized_thrusts(const ThrustPlan &plan, const Disturbance &dist, VariantId variant,
                          const QuadParams &p)
  {
    require(plan.v.size() == plan_size(p), "plan has wrong length");
    require(dist.w.size() == disturbance_size(variant, p), "disturbance has wrong length for variant");
    const auto t = thrusts_of(variant, to_std(plan.v), to_std(dist.w), p);
    return Eigen::Map<const Vector>(t.data(), static_cast<Index>(t.size()));
  }

  Trajectory simulate_thrusts(const Vector &thrusts, const QuadParams &p)
  {
    require(thrusts.size() == plan_size(p), "thrusts have wrong length");
    return to_trajectory(propagate(to_std(thrusts), p));
  }

  Trajectory simulate(const ThrustPlan &plan, const Disturbance &dist, VariantId variant,
                      const QuadParams &p)
  {
    return simulate_thrusts(realized_thrusts(plan, dist, variant, p), p);
  }

  Vector midpoint_residual(const Trajectory &traj, const Vector &thrusts, const QuadParams &p)
  {
    require(static_cast<int>(traj.states.size()) == p.horizon + 1, "trajectory has wrong length");
    require(thrusts.size() == plan_size(p), "thrusts have wrong length");
    const double ts = p.sample_time;
    Vector res(6 * p.horizon);
    for (int k = 0; k < p.horizon; ++k)
    {
      const State &a = traj.states[k];
      const State &b = traj.states[k + 1];
      const double u1 = thrusts(2 * k);
      const double u2 = thrusts(2 * k + 1);
      const Accelerations acc_a = accelerations(a, u1, u2, p);
      const Accelerations acc_b = accelerations(b, u1, u2, p);
      State rhs;
      rhs << 0.5 * (a(1) + b(1)), 0.5 * (acc_a.r_dd + acc_b.r_dd), 0.5 * (a(3) + b(3)),
          0.5 * (acc_a.s_dd + acc_b.s_dd), 0.5 * (a(5) + b(5)), 0.5 * (acc_a.psi_dd + acc_b.psi_dd);
      res.segment<6>(6 * k) = b - a - ts * rhs;
    }
    return res;
  }

  double cost(const Trajectory &traj, const QuadParams &p)
  {
    double total = 0.0;
    for (std::size_t i = 1; i < traj.states.size(); ++i)
    {
      const double dr = traj.states[i](0) - p.r_ref;
      const double ds = traj.states[i](2) - p.s_ref;
      total += dr * dr + ds * ds;
    }
    return total;
  }

  Vector path_constraint_rows(const Trajectory &traj, const QuadParams &p)
  {
    Vector rows(2 * static_cast<Index>(traj.states.size() - 1));
    for (std::size_t i = 1; i < traj.states.size(); ++i)
    {
      rows(2 * static_cast<Index>(i - 1)) = p.s_lo - traj.states[i](2);
      rows(2 * static_cast<Index>(i - 1) + 1) = traj.states[i](2) - p.s_hi;
    }
    return rows;
  }

  Vector uncertainty_rows(const ThrustPlan &plan, const Disturbance &dist, const QuadParams &p)
  {
    require(plan.v.size() == plan_size(p), "plan has wrong length");
    require(dist.w.size() == plan_size(p), "uncertainty_rows expects an additive disturbance");
    std::vector<double> rows;
    admissibility_of(VariantId::Esip, to_std(plan.v), to_std(dist.w), p, rows);
    return Eigen::Map<const Vector>(rows.data(), static_cast<Index>(rows.size()));
  }

  VariantProblem build_variant(VariantId id, const QuadParams &p)
  {
    p.validate();
    VariantProblem out;
    out.id = id;
    out.decision_dependent = id == VariantId::Esip;

    GsipProblem &prob = out.problem;
    prob.name = std::string("quadrotor-") + std::string(to_string(id));
    prob.n_u = plan_size(p);
    prob.n_w = disturbance_size(id, p);
    prob.n_g = 2 * p.horizon;
    prob.n_h = static_cast<Index>(rows_per_step(id)) * p.horizon;
    prob.u_lower = Vector::Constant(prob.n_u, p.v_lo);
    prob.u_upper = Vector::Constant(prob.n_u, p.v_hi);
    const double w_half = id == VariantId::Esip
                              ? p.uncert_frac * std::max(std::abs(p.v_lo), std::abs(p.v_hi))
                              : (id == VariantId::Rsip ? p.uncert_frac : p.union_bound);
    prob.w_lower = Vector::Constant(prob.n_w, -w_half);
    prob.w_upper = Vector::Constant(prob.n_w, w_half);
    prob.gamma_lower = 0.0;
    prob.gamma_upper = 1e4;

    prob.forward_state = [id, p](const Vector &u, const Vector &w) {
      return flatten(simulate(ThrustPlan{u}, Disturbance{w}, id, p));
    };
    prob.cost = [p](const Vector &x, const Vector &, const Vector &) { return cost(unflatten(x), p); };
    prob.constraints = [p](const Vector &x, const Vector &, const Vector &) {
      return path_constraint_rows(unflatten(x), p);
    };
    prob.admissibility = [id, p](const Vector &, const Vector &u, const Vector &w) {
      std::vector<double> rows;
      admissibility_of(id, to_std(u), to_std(w), p, rows);
      return Vector(Eigen::Map<const Vector>(rows.data(), static_cast<Index>(rows.size())));
    };
    prob.dynamics_residual = [id, p](const Vector &x, const Vector &u, const Vector &w) {
      return midpoint_residual(unflatten(x), realized_thrusts(ThrustPlan{u}, Disturbance{w}, id, p), p);
    };

    prob.reduced_jacobian = [id, p](const Vector &u, const Vector &w) {
      const Index nu = u.size();
      const Index nw = w.size();
      const Index nd = nu + nw;
      std::vector<AD> ua(static_cast<std::size_t>(nu));
      std::vector<AD> wa(static_cast<std::size_t>(nw));
      for (Index i = 0; i < nu; ++i)
      {
        ua[i] = AD(u(i), nd, i);
      }
      for (Index i = 0; i < nw; ++i)
      {
        wa[i] = AD(w(i), nd, nu + i);
      }
      const auto xs = propagate(thrusts_of(id, ua, wa, p), p);
      std::vector<AD> rows;
      rows.push_back(cost_of(xs, p));
      path_rows_of(xs, p, rows);
      admissibility_of(id, ua, wa, p, rows);

      const Index nrows = static_cast<Index>(rows.size());
      ReducedJacobian jac;
      jac.d_du.resize(nrows, nu);
      jac.d_dw.resize(nrows, nw);
      Vector values(nrows);
      for (Index r = 0; r < nrows; ++r)
      {
        values(r) = rows[r].value();
        const DerivVector &d = rows[r].derivatives();
        for (Index i = 0; i < nd; ++i)
        {
          const double di = d.size() > 0 ? d(i) : 0.0;
          if (i < nu)
          {
            jac.d_du(r, i) = di;
          }
          else
          {
            jac.d_dw(r, i - nu) = di;
          }
        }
      }
      const Index ng = 2 * p.horizon;
      jac.values.cost = values(0);
      jac.values.g = values.segment(1, ng);
      jac.values.h = values.tail(nrows - 1 - ng);
      return jac;
    };

    prob.sample_admissible = [id, p](const Vector &u, std::uint64_t draw) {
      std::mt19937_64 gen(mix(draw, 0xADu));
      const int n = p.horizon;
      Vector w(disturbance_size(id, p));
      for (int k = 0; k < n; ++k)
      {
        switch (id)
        {
        case VariantId::Esip:
        {
          const double t = p.uncert_frac * (2.0 * unit_draw(gen) - 1.0);
          w(2 * k) = u(2 * k) * t;
          w(2 * k + 1) = u(2 * k + 1) * t;
          break;
        }
        case VariantId::Sip1:
        {
          const double a = p.union_bound * (2.0 * unit_draw(gen) - 1.0);
          const double b = p.union_bound * unit_draw(gen);
          w(2 * k) = a;
          w(2 * k + 1) = a >= 0.0 ? b : -b;
          break;
        }
        case VariantId::Sip2:
        {
          const double t = p.union_bound * (2.0 * unit_draw(gen) - 1.0);
          w(2 * k) = t;
          w(2 * k + 1) = t;
          break;
        }
        case VariantId::Rsip:
          w(k) = p.uncert_frac * (2.0 * unit_draw(gen) - 1.0);
          break;
        }
      }
      return w;
    };
    prob.validate();
    return out;
  }

  Vector sample_shared_error(std::uint64_t seed, std::uint64_t index, const QuadParams &p)
  {
    std::mt19937_64 gen(mix(seed, index));
    Vector wp(p.horizon);
    for (int k = 0; k < p.horizon; ++k)
    {
      wp(k) = p.uncert_frac * (2.0 * unit_draw(gen) - 1.0);
    }
    return wp;
  }

  Disturbance sample_disturbance(const ThrustPlan &plan, std::uint64_t seed, std::uint64_t index,
                                 const QuadParams &p)
  {
    require(plan.v.size() == plan_size(p), "plan has wrong length");
    const Vector wp = sample_shared_error(seed, index, p);
    Disturbance d{Vector(plan_size(p))};
    for (int k = 0; k < p.horizon; ++k)
    {
      d.w(2 * k) = plan.v(2 * k) * wp(k);
      d.w(2 * k + 1) = plan.v(2 * k + 1) * wp(k);
    }
    return d;
  }

  McReport evaluate_disturbances(const ThrustPlan &plan, std::span<const Disturbance> dists,
                                 double gamma, const QuadParams &p)
  {
    std::vector<SampleStats> stats;
    stats.reserve(dists.size());
    for (const auto &d : dists)
    {
      stats.push_back(evaluate_sample(plan, d, p));
    }
    return summarize(stats, gamma);
  }

  McReport monte_carlo(const ThrustPlan &plan, std::size_t n, std::uint64_t seed, double gamma,
                       const QuadParams &p)
  {
    return monte_carlo_impl(plan, n, seed, gamma, p, true);
  }

  McReport monte_carlo_serial(const ThrustPlan &plan, std::size_t n, std::uint64_t seed, double gamma,
                              const QuadParams &p)
  {
    return monte_carlo_impl(plan, n, seed, gamma, p, false);
  }

  void export_trajectories(const std::filesystem::path &path, std::span<const Trajectory> trajectories)
  {
    std::ofstream out(path);
    if (!out)
    {
      throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out << "sample_id,k,x1,x2,x3,x4,x5,x6\n";
    out << std::setprecision(17);
    for (std::size_t s = 0; s < trajectories.size(); ++s)
    {
      const auto &states = trajectories[s].states;
      for (std::size_t k = 0; k < states.size(); ++k)
      {
        out << s << ',' << k;
        for (int i = 0; i < 6; ++i)
        {
          out << ',' << states[k](i);
        }
        out << '\n';
      }
    }
    if (!out)
    {
      throw std::runtime_error("write failed for '" + path.string() + "'");
    }
  }

  std::vector<Trajectory> read_trajectories(const std::filesystem::path &path)
  {
    std::ifstream in(path);
    if (!in)
    {
      throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);
    if (line != "sample_id,k,x1,x2,x3,x4,x5,x6")
    {
      throw std::runtime_error("'" + path.string() + "': unexpected header");
    }
    std::vector<Trajectory> out;
    while (std::getline(in, line))
    {
      if (line.empty())
      {
        continue;
      }
      std::istringstream row(line);
      std::string cell;
      std::array<double, 8> values{};
      for (double &v : values)
      {
        if (!std::getline(row, cell, ','))
        {
          throw std::runtime_error("'" + path.string() + "': short row");
        }
        v = std::stod(cell);
      }
      const auto sample = static_cast<std::size_t>(values[0]);
      if (sample >= out.size())
      {
        out.resize(sample + 1);
      }
      State s;
      s << values[2], values[3], values[4], values[5], values[6], values[7];
      out[sample].states.push_back(s);
    }
    return out;
  }

} // namespace gsip::quad
