#pragma once

// Paired-mode experiment runner: every scenario is planned twice, once with
// its specs as written ("cat") and once with all collaboration clauses
// stripped ("no-cat"), on identical environments and seeds.  Sweeps repeat
// that over a grid-size x trial matrix with derived per-trial seeds.
//
// Report rows carry no wall-clock fields, so a sweep with a fixed seed emits
// byte-identical CSV on every run; timings live on TrialOutcome only.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "catmip/encoder.hpp"
#include "catmip/scenario.hpp"
#include "catmip/solver.hpp"
#include "catmip/world.hpp"

namespace catmip {

struct AgentRow {
  int size = 0;  // grid rows (sweeps use square grids)
  std::uint64_t seed = 0;
  std::string mode;  // "cat" | "no-cat"
  int agent = 0;
  bool satisfied = false;
  int motion = 0;
  double performance = 0.0;
  std::string status;  // "ok" | "budget" | "infeasible"
};

struct TrialOutcome {
  int size = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::string status;
  double objective = 0.0;  // sum of agent performances; 0 when no plan
  double wall_ms = 0.0;
};

struct ModeAggregate {
  int agent_rows = 0;  // rows from trials that solved to optimality
  double mean_performance = 0.0;
  double satisfaction_rate = 0.0;
  double mean_motion = 0.0;
};

struct ExperimentReport {
  std::vector<AgentRow> rows;        // sorted (size, seed, mode, agent)
  std::vector<TrialOutcome> trials;  // sorted (size, seed, mode)
  std::map<std::string, ModeAggregate> aggregates;  // "ok" trials only
  int trials_total = 0;
  int trials_budget_exceeded = 0;
};

// Both modes of one scenario.  size is taken from the grid, the seed from
// the scenario (0 when absent).
ExperimentReport run_paired(const Scenario& s, const EncodeOptions& eopts,
                            const SolveOptions& sopts);

struct SweepConfig {
  std::vector<int> sizes;
  int trials = 20;
  std::uint64_t seed = 0;
  GeneratorConfig base;  // rows, cols, seed are overwritten per trial
  EncodeOptions encode;
  SolveOptions solve;
};

// Scenario seed for (size, trial) = first draw of
// SplitMix64(cfg.seed).split(size * 1000003 + trial).
ExperimentReport run_sweep(const SweepConfig& cfg);

// Header `size,seed,mode,agent,satisfied,motion,performance,status`, LF
// line endings, one row per AgentRow.
std::string report_to_csv(const ExperimentReport& r);

// Plot data: header `agent,k,row,col,node,labels`, one row per (agent, step),
// labels ';'-joined in sorted order.  The JSON mirror carries the same fields
// and parses back via trace_from_json.
std::string trace_to_csv(const Environment& env, const GroupTrajectory& traj);
std::string trace_to_json(const Environment& env, const GroupTrajectory& traj);
GroupTrajectory trace_from_json(const std::string& text);

}  // namespace catmip
