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

#ifndef GSIP_LOCAL_REDUCTION_HPP
#define GSIP_LOCAL_REDUCTION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsip/core.hpp"
#include "gsip/nlp.hpp"

namespace gsip
{
  /// Per-scenario branch of the existence constraint. With the simplex weight
  /// restricted to its vertices, each scenario either satisfies every
  /// combined row or is refuted as inadmissible.
  struct DisjunctChoice
  {
    enum class Kind
    {
      SatisfyG,
      RefuteAdmissibility,
    };

    Kind kind = Kind::SatisfyG;
    /// Admissibility row driven to <= -epsilon (LogicalMin). -1 means every
    /// row (PaperMax) or not applicable (SatisfyG).
    Index row = -1;

    static DisjunctChoice satisfy() { return {}; }
    static DisjunctChoice refute(Index row) { return {Kind::RefuteAdmissibility, row}; }

    friend bool operator==(const DisjunctChoice &, const DisjunctChoice &) = default;
  };

  std::string to_string(const DisjunctChoice &c);

  using DisjunctAssignment = std::vector<DisjunctChoice>;

  struct SeparationResult
  {
    Scenario scenario;
    double sigma_star = 0.0;
    Index active_g_row = 0;
    /// Set when no admissible uncertainty exists for the decision; sigma_star
    /// is then -infinity and `scenario` is meaningless.
    bool admissible_set_empty = false;
  };

  enum class ReductionStatus
  {
    Converged,
    IterationLimit,
    MasterInfeasible,
  };

  std::string_view to_string(ReductionStatus s);

  struct ReductionOptions
  {
    double viol_tol = 1e-6;
    int max_outer_iters = 40;
    double dup_tol = 1e-8;
    SolverOptions nlp;
    NegationMode mode = NegationMode::LogicalMin;
    double epsilon = 1e-3;
    /// Starts per separation subproblem (uses sample_admissible when the
    /// problem provides it).
    int separation_starts = 8;
    /// Extra random restarts for a master NLP whose warm-started solve fails.
    int master_restarts = 4;
    /// Budget of NLP solves for the disjunct search in one master step.
    int master_node_limit = 200;

    void validate() const;
  };

  struct IterationLog
  {
    std::size_t k = 0;
    double gamma = 0.0;
    double sigma = 0.0;
    double wall_time = 0.0;
    std::size_t scenarios = 0;
  };

  struct SolveReport
  {
    DecisionPoint decision;
    ScenarioSet scenarios;
    DisjunctAssignment assignment;
    std::size_t iterations = 0;
    std::vector<double> sigma_history;
    std::vector<double> gamma_history;
    std::vector<IterationLog> log;
    ReductionStatus status = ReductionStatus::IterationLimit;
    double wall_time = 0.0;
    std::string message;
  };

  struct MasterResult
  {
    bool feasible = false;
    DecisionPoint decision;
    DisjunctAssignment assignment;
    int nlp_solves = 0;
  };

  /// Standalone feasibility of single (scenario, disjunct) pairs over the
  /// decision box. A pair infeasible on its own prunes every assignment that
  /// uses it; the answers do not change between master steps.
  class DisjunctCache
  {
  public:
    std::optional<bool> find(const Vector &w, const DisjunctChoice &c) const;
    void store(const Vector &w, const DisjunctChoice &c, bool feasible);
    std::size_t size() const { return entries_.size(); }

  private:
    struct Entry
    {
      Vector w;
      DisjunctChoice choice;
      bool feasible;
    };
    std::vector<Entry> entries_;
  };

  /// Minimizes gamma subject to every scenario under its disjunct. The
  /// disjunct search is a depth-first branch and prune with the warm
  /// assignment tried first; `start` seeds every NLP and its gamma is a lower
  /// bound on the returned gamma (the previous master optimum).
  MasterResult master_step(const EsipProblem &esip, const ScenarioSet &scen,
                           const ReductionOptions &opts, const DisjunctAssignment *warm,
                           const std::optional<DecisionPoint> &start = std::nullopt,
                           DisjunctCache *cache = nullptr);

  /// Master of the classical exchange method: every scenario satisfies every
  /// combined row. `start` is used as in master_step.
  MasterResult standard_master_step(const GsipProblem &prob, const ScenarioSet &scen,
                                    const ReductionOptions &opts,
                                    const std::optional<DecisionPoint> &start = std::nullopt);

  /// Maximizes the existence-constraint violation over the admissible set of
  /// `d`, by exact enumeration over the combined-constraint rows.
  SeparationResult separation_step(const EsipProblem &esip, const DecisionPoint &d,
                                   const ReductionOptions &opts);

  /// Maximizes each combined row over the (decision-independent) admissible
  /// set and returns the largest.
  SeparationResult standard_separation_step(const GsipProblem &prob, const DecisionPoint &d,
                                            const ReductionOptions &opts);

  SolveReport solve_esip(const EsipProblem &esip, const ReductionOptions &opts);

  /// Exchange method for problems whose admissibility does not depend on u.
  SolveReport solve_standard_sip(const GsipProblem &prob, const ReductionOptions &opts);

} // namespace gsip

#endif // GSIP_LOCAL_REDUCTION_HPP
