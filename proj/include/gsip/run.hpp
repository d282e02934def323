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

#ifndef GSIP_RUN_HPP
#define GSIP_RUN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsip/local_reduction.hpp"
#include "gsip/quadrotor.hpp"

namespace gsip::run
{
  inline constexpr int kSchemaVersion = 1;

  /// Exit codes of the command layer. No other values are returned.
  enum ExitCode : int
  {
    kExitOk = 0,
    kExitFailure = 1, ///< toy mismatch or an unexpected runtime error
    kExitMasterInfeasible = 2,
    kExitIterationLimit = 3,
    kExitConfigError = 4,
  };

  /// Raised for malformed or out-of-range configuration and policy files.
  class ConfigError : public std::runtime_error
  {
  public:
    using std::runtime_error::runtime_error;
  };

  /// Flat experiment record. Keys in the JSON form match the member names.
  struct RunConfig
  {
    std::string variant = "esip";
    double epsilon = 1e-3;
    std::string negation_mode = "logical_min";
    double viol_tol = 1e-6;
    int max_outer_iters = 40;

    double nlp_feas_tol = 1e-6;
    double nlp_opt_tol = 1e-6;
    int nlp_max_outer = 50;
    int nlp_max_inner = 500;
    double nlp_penalty_init = 10.0;
    double nlp_penalty_growth = 10.0;
    int nlp_multistart_count = 8;

    int separation_starts = 8;
    int master_restarts = 4;
    int master_node_limit = 200;
    bool magnitude_bands = false;

    std::uint64_t mc_samples = 10000;
    std::uint64_t trajectory_samples = 200;
    std::uint64_t seed = 0;
    std::string out_dir = "out";

    /// Throws ConfigError with the offending key.
    void validate() const;
    ReductionOptions reduction_options() const;
    quad::QuadParams quad_params() const;

    friend bool operator==(const RunConfig &, const RunConfig &) = default;
  };

  std::string serialize_config(const RunConfig &cfg);
  /// Keys absent from `json` keep their defaults; unknown keys are rejected.
  RunConfig parse_config(std::string_view json);
  RunConfig load_config(const std::filesystem::path &path);

  struct RunReport
  {
    RunConfig config;
    std::string command;
    std::string status;
    std::string message;
    std::vector<double> u;
    double gamma = 0.0;
    std::uint64_t iterations = 0;
    std::uint64_t scenario_count = 0;
    std::vector<double> sigma_history;
    std::vector<double> gamma_history;
    std::vector<IterationLog> log;
    double wall_time = 0.0;
    std::optional<quad::McReport> mc;

    friend bool operator==(const RunReport &, const RunReport &);
  };

  std::string serialize_report(const RunReport &report);
  RunReport parse_report(std::string_view json);

  /// Decision written by `solve` and consumed by `evaluate`.
  struct Policy
  {
    std::string variant;
    std::vector<double> v;
    double gamma = 0.0;
  };

  std::string serialize_policy(const Policy &policy);
  Policy parse_policy(std::string_view json);

  struct CommandResult
  {
    int exit_code = kExitOk;
    RunReport report;
  };

  int exit_code_for(ReductionStatus status);

  /// Solves the configured variant and writes report.json, scenarios.json and
  /// policy.json to out_dir.
  CommandResult cmd_solve(const RunConfig &cfg);

  /// Monte Carlo of a saved policy; writes mc_report.json and trajectories.csv.
  CommandResult cmd_evaluate(const std::filesystem::path &policy_file, const RunConfig &cfg);

  /// Solves the one-dimensional fixture and checks u against 0.5.
  CommandResult cmd_toy(const RunConfig &cfg);

  /// Accepted distance between the fixture solution and 0.5 for a given epsilon.
  double toy_tolerance(double epsilon);

} // namespace gsip::run

#endif // GSIP_RUN_HPP
