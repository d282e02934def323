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

// gsip solve|evaluate|toy [flags]

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gsip/run.hpp"

namespace
{
  struct Flags
  {
    std::optional<std::string> config;
    std::optional<std::string> variant;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<double> epsilon;
    std::optional<std::string> mode;
    std::string policy;
  };

  void add_common(CLI::App *cmd, Flags &f)
  {
    cmd->add_option("--config", f.config, "flat JSON config file");
    cmd->add_option("--variant", f.variant, "esip|sip1|sip2|rsip");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--samples", f.samples, "Monte Carlo sample count");
    cmd->add_option("--epsilon", f.epsilon, "admissibility margin");
    cmd->add_option("--mode", f.mode, "paper_max|logical_min");
  }

  gsip::run::RunConfig resolve(const Flags &f)
  {
    gsip::run::RunConfig cfg = f.config ? gsip::run::load_config(*f.config) : gsip::run::RunConfig{};
    if (f.variant)
      cfg.variant = *f.variant;
    if (f.out)
      cfg.out_dir = *f.out;
    if (f.seed)
      cfg.seed = *f.seed;
    if (f.samples)
      cfg.mc_samples = *f.samples;
    if (f.epsilon)
      cfg.epsilon = *f.epsilon;
    if (f.mode)
      cfg.negation_mode = *f.mode;
    return cfg;
  }

  int finish(const gsip::run::CommandResult &res)
  {
    const auto &r = res.report;
    std::cout << r.command << ": " << r.status;
    if (!r.u.empty() && r.command != "evaluate")
    {
      std::cout << " gamma=" << r.gamma << " iterations=" << r.iterations << " scenarios=" << r.scenario_count;
    }
    if (r.mc)
    {
      std::cout << " samples=" << r.mc->samples << " avg_cost=" << r.mc->avg_cost
                << " worst_cost=" << r.mc->worst_cost << " violations=" << r.mc->violation_count;
    }
    std::cout << "\n";
    if (!r.message.empty())
    {
      (res.exit_code == 0 ? std::cout : std::cerr) << r.message << "\n";
    }
    return res.exit_code;
  }
} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Generalized semi-infinite program solver"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App *solve = app.add_subcommand("solve", "solve a quadrotor variant");
  CLI::App *evaluate = app.add_subcommand("evaluate", "Monte Carlo evaluation of a saved policy");
  CLI::App *toy = app.add_subcommand("toy", "solve the one-dimensional fixture");
  add_common(solve, flags);
  add_common(evaluate, flags);
  add_common(toy, flags);
  evaluate->add_option("--policy", flags.policy, "policy.json written by solve")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return gsip::run::kExitConfigError;
  }

  gsip::run::RunConfig cfg;
  try
  {
    cfg = resolve(flags);
  }
  catch (const std::exception &e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return gsip::run::kExitConfigError;
  }

  if (solve->parsed())
    return finish(gsip::run::cmd_solve(cfg));
  if (evaluate->parsed())
    return finish(gsip::run::cmd_evaluate(flags.policy, cfg));
  return finish(gsip::run::cmd_toy(cfg));
}
