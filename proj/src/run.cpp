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

#include "gsip/run.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gsip/toy.hpp"

namespace gsip::run
{
  using nlohmann::json;

  namespace
  {
    // JSON has no infinities; they are stored as strings.
    json number(double x)
    {
      if (std::isfinite(x))
      {
        return x;
      }
      if (std::isnan(x))
      {
        return "nan";
      }
      return x > 0 ? "inf" : "-inf";
    }

    double read_number(const json &j)
    {
      if (j.is_string())
      {
        const auto s = j.get<std::string>();
        if (s == "inf")
        {
          return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf")
        {
          return -std::numeric_limits<double>::infinity();
        }
        if (s == "nan")
        {
          return std::numeric_limits<double>::quiet_NaN();
        }
        throw ConfigError("expected a number, got \"" + s + "\"");
      }
      return j.get<double>();
    }

    json numbers(const std::vector<double> &xs)
    {
      json a = json::array();
      for (double x : xs)
      {
        a.push_back(number(x));
      }
      return a;
    }

    std::vector<double> read_numbers(const json &j)
    {
      std::vector<double> xs;
      for (const auto &e : j)
      {
        xs.push_back(read_number(e));
      }
      return xs;
    }

    std::vector<double> to_std(const Vector &v) { return {v.data(), v.data() + v.size()}; }

    json config_json(const RunConfig &c)
    {
      return json{
          {"variant", c.variant},
          {"epsilon", c.epsilon},
          {"negation_mode", c.negation_mode},
          {"viol_tol", c.viol_tol},
          {"max_outer_iters", c.max_outer_iters},
          {"nlp_feas_tol", c.nlp_feas_tol},
          {"nlp_opt_tol", c.nlp_opt_tol},
          {"nlp_max_outer", c.nlp_max_outer},
          {"nlp_max_inner", c.nlp_max_inner},
          {"nlp_penalty_init", c.nlp_penalty_init},
          {"nlp_penalty_growth", c.nlp_penalty_growth},
          {"nlp_multistart_count", c.nlp_multistart_count},
          {"separation_starts", c.separation_starts},
          {"master_restarts", c.master_restarts},
          {"master_node_limit", c.master_node_limit},
          {"magnitude_bands", c.magnitude_bands},
          {"mc_samples", c.mc_samples},
          {"trajectory_samples", c.trajectory_samples},
          {"seed", c.seed},
          {"out_dir", c.out_dir},
      };
    }

    template <class T>
    void take(const json &j, const char *key, T &field)
    {
      if (!j.contains(key))
      {
        return;
      }
      try
      {
        field = j.at(key).get<T>();
      }
      catch (const json::exception &e)
      {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
      }
    }

    RunConfig config_from(const json &j)
    {
      if (!j.is_object())
      {
        throw ConfigError("config must be a JSON object");
      }
      RunConfig c;
      const json known = config_json(c);
      for (const auto &item : j.items())
      {
        if (!known.contains(item.key()))
        {
          throw ConfigError("unknown config key '" + item.key() + "'");
        }
      }
      take(j, "variant", c.variant);
      take(j, "epsilon", c.epsilon);
      take(j, "negation_mode", c.negation_mode);
      take(j, "viol_tol", c.viol_tol);
      take(j, "max_outer_iters", c.max_outer_iters);
      take(j, "nlp_feas_tol", c.nlp_feas_tol);
      take(j, "nlp_opt_tol", c.nlp_opt_tol);
      take(j, "nlp_max_outer", c.nlp_max_outer);
      take(j, "nlp_max_inner", c.nlp_max_inner);
      take(j, "nlp_penalty_init", c.nlp_penalty_init);
      take(j, "nlp_penalty_growth", c.nlp_penalty_growth);
      take(j, "nlp_multistart_count", c.nlp_multistart_count);
      take(j, "separation_starts", c.separation_starts);
      take(j, "master_restarts", c.master_restarts);
      take(j, "master_node_limit", c.master_node_limit);
      take(j, "magnitude_bands", c.magnitude_bands);
      take(j, "mc_samples", c.mc_samples);
      take(j, "trajectory_samples", c.trajectory_samples);
      take(j, "seed", c.seed);
      take(j, "out_dir", c.out_dir);
      return c;
    }

    json mc_json(const quad::McReport &m)
    {
      return json{{"samples", m.samples},
                  {"avg_cost", number(m.avg_cost)},
                  {"worst_cost", number(m.worst_cost)},
                  {"violation_count", m.violation_count},
                  {"gamma", number(m.gamma)}};
    }

    quad::McReport mc_from(const json &j)
    {
      quad::McReport m;
      m.samples = j.at("samples").get<std::size_t>();
      m.avg_cost = read_number(j.at("avg_cost"));
      m.worst_cost = read_number(j.at("worst_cost"));
      m.violation_count = j.at("violation_count").get<std::size_t>();
      m.gamma = read_number(j.at("gamma"));
      return m;
    }

    json report_json(const RunReport &r)
    {
      json log = json::array();
      for (const auto &e : r.log)
      {
        log.push_back(json{{"k", e.k},
                           {"gamma", number(e.gamma)},
                           {"sigma", number(e.sigma)},
                           {"wall_time", e.wall_time},
                           {"scenarios", e.scenarios}});
      }
      json j{
          {"schema_version", kSchemaVersion},
          {"config", config_json(r.config)},
          {"command", r.command},
          {"status", r.status},
          {"message", r.message},
          {"u", numbers(r.u)},
          {"gamma", number(r.gamma)},
          {"iterations", r.iterations},
          {"scenario_count", r.scenario_count},
          {"sigma_history", numbers(r.sigma_history)},
          {"gamma_history", numbers(r.gamma_history)},
          {"log", log},
          {"wall_time", r.wall_time},
      };
      j["mc"] = r.mc ? mc_json(*r.mc) : json(nullptr);
      return j;
    }

    void write_file(const std::filesystem::path &path, const std::string &text)
    {
      std::ofstream out(path, std::ios::binary);
      if (!out)
      {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
      }
      out << text;
      if (!out)
      {
        throw std::runtime_error("write failed for " + path.string());
      }
    }

    std::string read_file(const std::filesystem::path &path)
    {
      std::ifstream in(path, std::ios::binary);
      if (!in)
      {
        throw ConfigError("cannot read " + path.string());
      }
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }

    json parse_json(std::string_view text, const char *what)
    {
      try
      {
        return json::parse(text);
      }
      catch (const json::parse_error &e)
      {
        throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
      }
    }

    void fill_from_solve(RunReport &rep, const SolveReport &s)
    {
      rep.status = std::string(to_string(s.status));
      rep.message = s.message;
      rep.u = to_std(s.decision.u);
      rep.gamma = s.decision.gamma;
      rep.iterations = s.iterations;
      rep.scenario_count = s.scenarios.size();
      rep.sigma_history = s.sigma_history;
      rep.gamma_history = s.gamma_history;
      rep.log = s.log;
      rep.wall_time = s.wall_time;
    }

    json scenarios_json(const SolveReport &s)
    {
      json a = json::array();
      for (std::size_t i = 0; i < s.scenarios.size(); ++i)
      {
        const Scenario &sc = s.scenarios[i];
        json e{{"w", numbers(to_std(sc.w))},
               {"found_at_iteration", sc.found_at_iteration},
               {"violation_at_discovery", number(sc.violation_at_discovery)}};
        e["disjunct"] = i < s.assignment.size() ? to_string(s.assignment[i]) : "satisfy";
        a.push_back(e);
      }
      return json{{"schema_version", kSchemaVersion}, {"scenarios", a}};
    }

    template <class Fn>
    CommandResult guarded(RunReport rep, Fn &&fn)
    {
      CommandResult res;
      try
      {
        return fn(rep);
      }
      catch (const ConfigError &e)
      {
        res.exit_code = kExitConfigError;
        rep.status = "ConfigError";
        rep.message = e.what();
      }
      catch (const ContractViolation &e)
      {
        res.exit_code = kExitConfigError;
        rep.status = "ConfigError";
        rep.message = e.what();
      }
      catch (const std::exception &e)
      {
        res.exit_code = kExitFailure;
        rep.status = "Failure";
        rep.message = e.what();
      }
      res.report = std::move(rep);
      return res;
    }

    void prepare_out_dir(const RunConfig &cfg)
    {
      std::error_code ec;
      std::filesystem::create_directories(cfg.out_dir, ec);
      if (ec)
      {
        throw ConfigError("cannot create out_dir " + cfg.out_dir + ": " + ec.message());
      }
    }
  } // namespace

  void RunConfig::validate() const
  {
    try
    {
      (void)quad::variant_from_string(variant);
    }
    catch (const ContractViolation &)
    {
      throw ConfigError("variant must be one of esip|sip1|sip2|rsip, got '" + variant + "'");
    }
    try
    {
      (void)negation_mode_from_string(negation_mode);
    }
    catch (const ContractViolation &)
    {
      throw ConfigError("negation_mode must be paper_max or logical_min, got '" + negation_mode + "'");
    }
    if (mc_samples < 1)
    {
      throw ConfigError("mc_samples must be at least 1");
    }
    if (out_dir.empty())
    {
      throw ConfigError("out_dir must not be empty");
    }
    try
    {
      reduction_options().validate();
      quad_params().validate();
    }
    catch (const ContractViolation &e)
    {
      throw ConfigError(std::string("invalid option: ") + e.what());
    }
  }

  ReductionOptions RunConfig::reduction_options() const
  {
    ReductionOptions o;
    o.viol_tol = viol_tol;
    o.max_outer_iters = max_outer_iters;
    o.epsilon = epsilon;
    o.separation_starts = separation_starts;
    o.master_restarts = master_restarts;
    o.master_node_limit = master_node_limit;
    o.nlp.feas_tol = nlp_feas_tol;
    o.nlp.opt_tol = nlp_opt_tol;
    o.nlp.max_outer = nlp_max_outer;
    o.nlp.max_inner = nlp_max_inner;
    o.nlp.penalty_init = nlp_penalty_init;
    o.nlp.penalty_growth = nlp_penalty_growth;
    o.nlp.multistart_count = nlp_multistart_count;
    o.nlp.seed = seed;
    try
    {
      o.mode = negation_mode_from_string(negation_mode);
    }
    catch (const ContractViolation &)
    {
      throw ConfigError("negation_mode must be paper_max or logical_min, got '" + negation_mode + "'");
    }
    return o;
  }

  quad::QuadParams RunConfig::quad_params() const
  {
    quad::QuadParams p;
    p.magnitude_bands = magnitude_bands;
    return p;
  }

  std::string serialize_config(const RunConfig &cfg) { return config_json(cfg).dump(2) + "\n"; }

  RunConfig parse_config(std::string_view text) { return config_from(parse_json(text, "config")); }

  RunConfig load_config(const std::filesystem::path &path) { return parse_config(read_file(path)); }

  bool operator==(const RunReport &a, const RunReport &b)
  {
    // NaN-free reports compare field by field; the serialized form is canonical.
    return report_json(a) == report_json(b);
  }

  std::string serialize_report(const RunReport &report) { return report_json(report).dump(2) + "\n"; }

  RunReport parse_report(std::string_view text)
  {
    const json j = parse_json(text, "report");
    try
    {
      if (j.at("schema_version").get<int>() != kSchemaVersion)
      {
        throw ConfigError("unsupported report schema_version");
      }
      RunReport r;
      r.config = config_from(j.at("config"));
      r.command = j.at("command").get<std::string>();
      r.status = j.at("status").get<std::string>();
      r.message = j.at("message").get<std::string>();
      r.u = read_numbers(j.at("u"));
      r.gamma = read_number(j.at("gamma"));
      r.iterations = j.at("iterations").get<std::uint64_t>();
      r.scenario_count = j.at("scenario_count").get<std::uint64_t>();
      r.sigma_history = read_numbers(j.at("sigma_history"));
      r.gamma_history = read_numbers(j.at("gamma_history"));
      for (const auto &e : j.at("log"))
      {
        r.log.push_back({e.at("k").get<std::size_t>(), read_number(e.at("gamma")), read_number(e.at("sigma")),
                         e.at("wall_time").get<double>(), e.at("scenarios").get<std::size_t>()});
      }
      r.wall_time = j.at("wall_time").get<double>();
      if (!j.at("mc").is_null())
      {
        r.mc = mc_from(j.at("mc"));
      }
      return r;
    }
    catch (const json::exception &e)
    {
      throw ConfigError(std::string("malformed report: ") + e.what());
    }
  }

  std::string serialize_policy(const Policy &policy)
  {
    const json j{{"schema_version", kSchemaVersion},
                 {"variant", policy.variant},
                 {"v", numbers(policy.v)},
                 {"gamma", number(policy.gamma)}};
    return j.dump(2) + "\n";
  }

  Policy parse_policy(std::string_view text)
  {
    const json j = parse_json(text, "policy");
    try
    {
      Policy p;
      p.variant = j.at("variant").get<std::string>();
      p.v = read_numbers(j.at("v"));
      p.gamma = read_number(j.at("gamma"));
      return p;
    }
    catch (const json::exception &e)
    {
      throw ConfigError(std::string("malformed policy: ") + e.what());
    }
  }

  int exit_code_for(ReductionStatus status)
  {
    switch (status)
    {
    case ReductionStatus::Converged:
      return kExitOk;
    case ReductionStatus::MasterInfeasible:
      return kExitMasterInfeasible;
    case ReductionStatus::IterationLimit:
      return kExitIterationLimit;
    }
    return kExitFailure;
  }

  CommandResult cmd_solve(const RunConfig &cfg)
  {
    RunReport rep;
    rep.config = cfg;
    rep.command = "solve";
    return guarded(rep, [&](RunReport &r) {
      cfg.validate();
      prepare_out_dir(cfg);
      const quad::VariantId id = quad::variant_from_string(cfg.variant);
      const quad::VariantProblem vp = quad::build_variant(id, cfg.quad_params());
      const ReductionOptions opts = cfg.reduction_options();
      SolveReport s;
      if (vp.decision_dependent)
      {
        s = solve_esip(build_esip(vp.problem, cfg.epsilon, opts.mode), opts);
      }
      else
      {
        s = solve_standard_sip(vp.problem, opts);
      }
      fill_from_solve(r, s);
      const std::filesystem::path out(cfg.out_dir);
      write_file(out / "report.json", serialize_report(r));
      write_file(out / "scenarios.json", scenarios_json(s).dump(2) + "\n");
      write_file(out / "policy.json", serialize_policy({cfg.variant, r.u, r.gamma}));
      return CommandResult{exit_code_for(s.status), r};
    });
  }

  CommandResult cmd_evaluate(const std::filesystem::path &policy_file, const RunConfig &cfg)
  {
    RunReport rep;
    rep.config = cfg;
    rep.command = "evaluate";
    return guarded(rep, [&](RunReport &r) {
      cfg.validate();
      const Policy policy = parse_policy(read_file(policy_file));
      const quad::QuadParams qp = cfg.quad_params();
      if (static_cast<int>(policy.v.size()) != 2 * qp.horizon)
      {
        throw ConfigError("policy " + policy_file.string() + " has " + std::to_string(policy.v.size()) +
                          " thrusts, expected " + std::to_string(2 * qp.horizon));
      }
      prepare_out_dir(cfg);
      quad::ThrustPlan plan;
      plan.v = Eigen::Map<const Vector>(policy.v.data(), static_cast<Index>(policy.v.size()));
      const quad::McReport mc = quad::monte_carlo(plan, cfg.mc_samples, cfg.seed, policy.gamma, qp);

      const std::uint64_t n_traj = std::min(cfg.trajectory_samples, cfg.mc_samples);
      std::vector<quad::Trajectory> trajs;
      trajs.reserve(n_traj);
      for (std::uint64_t i = 0; i < n_traj; ++i)
      {
        const quad::Disturbance d = quad::sample_disturbance(plan, cfg.seed, i, qp);
        trajs.push_back(quad::simulate(plan, d, quad::VariantId::Esip, qp));
      }
      const std::filesystem::path out(cfg.out_dir);
      quad::export_trajectories(out / "trajectories.csv", trajs);

      r.status = "Evaluated";
      r.message = "policy " + policy.variant;
      r.u = policy.v;
      r.gamma = policy.gamma;
      r.mc = mc;
      json j = mc_json(mc);
      j["schema_version"] = kSchemaVersion;
      j["policy_variant"] = policy.variant;
      j["seed"] = cfg.seed;
      write_file(out / "mc_report.json", j.dump(2) + "\n");
      return CommandResult{kExitOk, r};
    });
  }

  double toy_tolerance(double epsilon) { return epsilon <= 1e-3 ? 1e-3 : 2.0 * epsilon; }

  CommandResult cmd_toy(const RunConfig &cfg)
  {
    RunReport rep;
    rep.config = cfg;
    rep.command = "toy";
    return guarded(rep, [&](RunReport &r) {
      const ReductionOptions opts = cfg.reduction_options();
      opts.validate();
      const EsipProblem esip = build_esip(toy::t1(), cfg.epsilon, opts.mode);
      const SolveReport s = solve_esip(esip, opts);
      fill_from_solve(r, s);
      CommandResult res{kExitOk, r};
      const double tol = toy_tolerance(cfg.epsilon);
      if (s.status != ReductionStatus::Converged)
      {
        res.exit_code = kExitFailure;
        res.report.message = "divergence: " + std::string(to_string(s.status)) + " (" + s.message +
                             "), expected u = 0.5 in mode " + cfg.negation_mode;
      }
      else if (std::abs(s.decision.u(0) - 0.5) > tol)
      {
        res.exit_code = kExitFailure;
        std::ostringstream os;
        os << "divergence: u = " << s.decision.u(0) << " differs from 0.5 by more than " << tol;
        res.report.message = os.str();
      }
      return res;
    });
  }

} // namespace gsip::run
