#include "catmip/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "catmip/errors.hpp"
#include "catmip/formula.hpp"
#include "catmip/rng.hpp"
#include "json.hpp"

namespace catmip {

namespace {

std::string fmt_num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void run_mode(ExperimentReport& rep, const Scenario& s, int size,
              std::uint64_t seed, const std::string& mode,
              const EncodeOptions& eopts_in, const SolveOptions& sopts) {
  std::vector<FormulaPtr> specs = s.specs;
  if (mode == "no-cat") {
    for (auto& f : specs) f = strip_augmentation(f);
  }
  EncodeOptions eopts = eopts_in;
  eopts.big_m = s.big_m;

  auto enc = encode(s.env, s.team, specs, eopts);
  auto sol = solve(enc.model, sopts);

  rep.trials_total += 1;
  std::string status;
  switch (sol.status) {
    case SolveStatus::Optimal:
      status = "ok";
      break;
    case SolveStatus::BudgetExceeded:
      status = "budget";
      rep.trials_budget_exceeded += 1;
      break;
    case SolveStatus::Infeasible:
      status = "infeasible";
      break;
  }

  TrialOutcome trial;
  trial.size = size;
  trial.seed = seed;
  trial.mode = mode;
  trial.status = status;
  trial.wall_ms = sol.stats.wall_ms;

  if (sol.has_assignment()) {
    auto report = decode(sol, enc.map, s.env, s.team, specs, s.big_m);
    trial.objective = report.total_performance;
    for (const auto& ar : report.agents) {
      rep.rows.push_back({size, seed, mode, ar.agent_id, ar.satisfied,
                          ar.motion_cost, ar.performance, status});
    }
  } else {
    for (int j = 1; j <= s.team.size(); ++j) {
      rep.rows.push_back({size, seed, mode, j, false, 0, 0.0, status});
    }
  }
  rep.trials.push_back(std::move(trial));
}

void finalize(ExperimentReport& rep) {
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const AgentRow& a, const AgentRow& b) {
              return std::tie(a.size, a.seed, a.mode, a.agent) <
                     std::tie(b.size, b.seed, b.mode, b.agent);
            });
  std::sort(rep.trials.begin(), rep.trials.end(),
            [](const TrialOutcome& a, const TrialOutcome& b) {
              return std::tie(a.size, a.seed, a.mode) <
                     std::tie(b.size, b.seed, b.mode);
            });
  rep.aggregates.clear();
  for (const auto& row : rep.rows) {
    if (row.status != "ok") continue;
    ModeAggregate& agg = rep.aggregates[row.mode];
    agg.agent_rows += 1;
    agg.mean_performance += row.performance;
    agg.satisfaction_rate += row.satisfied ? 1.0 : 0.0;
    agg.mean_motion += row.motion;
  }
  for (auto& [mode, agg] : rep.aggregates) {
    if (agg.agent_rows == 0) continue;
    agg.mean_performance /= agg.agent_rows;
    agg.satisfaction_rate /= agg.agent_rows;
    agg.mean_motion /= agg.agent_rows;
  }
}

}  // namespace

ExperimentReport run_paired(const Scenario& s, const EncodeOptions& eopts,
                            const SolveOptions& sopts) {
  int size = s.env.node_count();
  if (s.env.has_geometry()) size = s.env.pos(s.env.node_count()).row;
  const std::uint64_t seed = s.seed.value_or(0);

  ExperimentReport rep;
  run_mode(rep, s, size, seed, "cat", eopts, sopts);
  run_mode(rep, s, size, seed, "no-cat", eopts, sopts);
  finalize(rep);
  return rep;
}

ExperimentReport run_sweep(const SweepConfig& cfg) {
  if (cfg.sizes.empty()) throw Error("sweep needs at least one grid size");
  if (cfg.trials < 1) throw Error("sweep needs at least one trial per size");

  ExperimentReport rep;
  for (int size : cfg.sizes) {
    if (size < 1) throw Error("sweep sizes must be positive");
    for (int t = 0; t < cfg.trials; ++t) {
      const std::uint64_t tag =
          static_cast<std::uint64_t>(size) * 1000003ull +
          static_cast<std::uint64_t>(t);
      SplitMix64 child = SplitMix64(cfg.seed).split(tag);
      GeneratorConfig gen = cfg.base;
      gen.rows = size;
      gen.cols = size;
      gen.seed = child.next();
      Scenario s = random_scenario(gen);
      run_mode(rep, s, size, *s.seed, "cat", cfg.encode, cfg.solve);
      run_mode(rep, s, size, *s.seed, "no-cat", cfg.encode, cfg.solve);
    }
  }
  finalize(rep);
  return rep;
}

std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "size,seed,mode,agent,satisfied,motion,performance,status\n";
  for (const auto& row : r.rows) {
    os << row.size << ',' << row.seed << ',' << row.mode << ',' << row.agent
       << ',' << (row.satisfied ? 1 : 0) << ',' << row.motion << ','
       << fmt_num(row.performance) << ',' << row.status << '\n';
  }
  return os.str();
}

std::string trace_to_csv(const Environment& env, const GroupTrajectory& traj) {
  std::ostringstream os;
  os << "agent,k,row,col,node,labels\n";
  const int agents = traj.at.empty() ? 0 : static_cast<int>(traj.at[0].size());
  for (int j = 1; j <= agents; ++j) {
    for (int k = 0; k <= traj.horizon(); ++k) {
      const int q = traj.position(j, k);
      GridPos p{0, 0};
      if (env.has_geometry()) p = env.pos(q);
      os << j << ',' << k << ',' << p.row << ',' << p.col << ',' << q << ',';
      bool first = true;
      for (const auto& label : env.labels_of(q)) {
        if (!first) os << ';';
        os << label;
        first = false;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string trace_to_json(const Environment& env, const GroupTrajectory& traj) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const int agents = traj.at.empty() ? 0 : static_cast<int>(traj.at[0].size());
  for (int j = 1; j <= agents; ++j) {
    for (int k = 0; k <= traj.horizon(); ++k) {
      const int q = traj.position(j, k);
      GridPos p{0, 0};
      if (env.has_geometry()) p = env.pos(q);
      nlohmann::ordered_json row;
      row["agent"] = j;
      row["k"] = k;
      row["row"] = p.row;
      row["col"] = p.col;
      row["node"] = q;
      row["labels"] = env.labels_of(q);
      rows.push_back(std::move(row));
    }
  }
  nlohmann::ordered_json root;
  root["trace"] = std::move(rows);
  return root.dump(2) + "\n";
}

GroupTrajectory trace_from_json(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("invalid trace JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("trace") ||
      !root.at("trace").is_array()) {
    throw Error("trace JSON must be an object with a \"trace\" array");
  }
  std::map<std::pair<int, int>, int> at;  // (k, agent) -> node
  int max_agent = 0;
  int max_k = 0;
  for (const auto& row : root.at("trace")) {
    if (!row.is_object() || !row.contains("agent") || !row.contains("k") ||
        !row.contains("node")) {
      throw Error("trace rows need agent, k, and node fields");
    }
    const int j = row.at("agent").get<int>();
    const int k = row.at("k").get<int>();
    const int q = row.at("node").get<int>();
    if (j < 1 || k < 0 || q < 1) throw Error("trace row out of range");
    if (!at.emplace(std::make_pair(k, j), q).second) {
      throw Error("duplicate trace row for agent " + std::to_string(j) +
                  " at step " + std::to_string(k));
    }
    max_agent = std::max(max_agent, j);
    max_k = std::max(max_k, k);
  }
  GroupTrajectory traj;
  for (int k = 0; k <= max_k; ++k) {
    std::vector<int> stepped;
    for (int j = 1; j <= max_agent; ++j) {
      auto it = at.find({k, j});
      if (it == at.end()) {
        throw Error("trace is missing agent " + std::to_string(j) +
                    " at step " + std::to_string(k));
      }
      stepped.push_back(it->second);
    }
    traj.at.push_back(std::move(stepped));
  }
  return traj;
}

}  // namespace catmip
