// catmip: plan scenarios, generate random ones, and sweep grid sizes.
//
// Exit codes: 0 success, 1 no optimal plan (infeasible or budget ran out),
// 2 bad input.  CATMIP_TIME_BUDGET_S overrides the per-solve time budget
// (seconds, default 60).

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "catmip/encoder.hpp"
#include "catmip/errors.hpp"
#include "catmip/experiment.hpp"
#include "catmip/formula.hpp"
#include "catmip/lp_format.hpp"
#include "catmip/scenario.hpp"
#include "catmip/solver.hpp"

namespace {

using namespace catmip;

std::string fmt_num(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double budget_from_env(double fallback) {
  const char* raw = std::getenv("CATMIP_TIME_BUDGET_S");
  if (!raw || !*raw) return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) {
    throw Error("CATMIP_TIME_BUDGET_S must be a positive number");
  }
  return v;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw Error(path + ": write failed");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void print_warnings(const std::vector<std::string>& ws) {
  for (const auto& w : ws) std::cout << "  warning: " << w << "\n";
}

int cmd_plan(const std::string& path, bool no_cat, const std::string& mode,
             const std::string& lp_path, const std::string& trace_path) {
  Scenario s = load_scenario(path);
  std::vector<FormulaPtr> specs = s.specs;
  if (no_cat) {
    for (auto& f : specs) f = strip_augmentation(f);
  }

  EncodeOptions eopts;
  eopts.big_m = s.big_m;
  eopts.colocation =
      mode == "paper" ? ColocationMode::Paper : ColocationMode::Compact;
  auto enc = encode(s.env, s.team, specs, eopts);

  std::cout << "scenario " << path << ": " << s.env.node_count() << " nodes, "
            << s.team.size() << " agents, T_p " << enc.map.horizon
            << ", colocation " << mode << ", "
            << (no_cat ? "collaboration stripped" : "specs as written")
            << "\n";
  std::cout << "model: " << enc.model.var_count() << " variables, "
            << enc.model.constraints().size() << " constraints\n";
  print_warnings(s.warnings);
  print_warnings(enc.warnings);

  if (!lp_path.empty()) {
    write_file(lp_path, to_lp_format(enc.model).text);
    std::cout << "wrote " << lp_path << "\n";
  }

  SolveOptions sopts;
  sopts.time_budget_s = budget_from_env(60.0);
  auto sol = solve(enc.model, sopts);
  const char* status = sol.status == SolveStatus::Optimal ? "optimal"
                       : sol.status == SolveStatus::BudgetExceeded
                           ? "budget exhausted"
                           : "infeasible";
  std::cout << "solver: " << status << ", nodes " << sol.stats.nodes
            << ", LP iterations " << sol.stats.lp_iterations << ", wall "
            << fmt_num(sol.stats.wall_ms) << " ms\n";

  if (sol.status == SolveStatus::Infeasible) {
    std::cout << "no feasible plan\n";
    return 1;
  }
  if (!sol.has_assignment()) {
    std::cout << "budget ran out before any plan was found\n";
    return 1;
  }

  auto rep = decode(sol, enc.map, s.env, s.team, specs, s.big_m);
  for (const auto& a : rep.agents) {
    std::cout << "agent " << a.agent_id << ": "
              << (a.satisfied ? "satisfied" : "unsatisfied") << ", motion "
              << a.motion_cost << ", performance " << fmt_num(a.performance)
              << "\n";
  }
  std::cout << "totals: satisfied " << rep.satisfied_count << "/"
            << s.team.size() << ", motion " << rep.total_motion
            << ", objective " << fmt_num(rep.objective) << "\n";
  print_warnings(rep.warnings);
  for (const auto& m : rep.mismatches) {
    std::cout << "  MISMATCH: " << m << "\n";
  }

  if (!trace_path.empty()) {
    const std::string text = ends_with(trace_path, ".json")
                                 ? trace_to_json(s.env, rep.trajectory)
                                 : trace_to_csv(s.env, rep.trajectory);
    write_file(trace_path, text);
    std::cout << "wrote " << trace_path << "\n";
  }

  if (sol.status == SolveStatus::BudgetExceeded) {
    std::cout << "best plan within budget shown; optimality not proven\n";
    return 1;
  }
  return rep.mismatches.empty() ? 0 : 1;
}

int cmd_random(int rows, int cols, std::uint64_t seed,
               const std::string& out) {
  GeneratorConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.seed = seed;
  Scenario s = random_scenario(cfg);
  const std::string text = scenario_to_json(s);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_sweep(const std::vector<int>& sizes, int trials, std::uint64_t seed,
              const std::string& out) {
  SweepConfig cfg;
  cfg.sizes = sizes;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.solve.time_budget_s = budget_from_env(60.0);
  auto rep = run_sweep(cfg);
  const std::string csv = report_to_csv(rep);
  if (out.empty()) {
    std::cout << csv;
    return 0;
  }
  write_file(out, csv);
  std::cout << "wrote " << out << " (" << rep.rows.size() << " rows)\n";
  for (const auto& [mode, agg] : rep.aggregates) {
    std::cout << "mode " << mode << ": mean performance "
              << fmt_num(agg.mean_performance) << ", satisfaction rate "
              << fmt_num(agg.satisfaction_rate) << ", mean motion "
              << fmt_num(agg.mean_motion) << " (" << agg.agent_rows
              << " agent rows)\n";
  }
  if (rep.trials_budget_exceeded > 0) {
    std::cout << "budget exceeded on " << rep.trials_budget_exceeded << " of "
              << rep.trials_total
              << " solves; those rows are excluded from the aggregates\n";
  }
  return 0;
}

int cmd_check(const std::string& path) {
  Scenario s = load_scenario(path);
  std::cout << path << ": OK\n";
  if (s.env.has_geometry()) {
    GridPos extent = s.env.pos(s.env.node_count());
    std::cout << "grid " << extent.row << "x" << extent.col << ", ";
  }
  std::cout << s.env.node_count() << " nodes\n";
  std::cout << "labels:";
  for (const auto& name : s.declared_labels) {
    std::cout << " " << name << "(" << s.env.nodes_with(name).size() << ")";
  }
  std::cout << "\nagents: " << s.team.size() << "; capabilities:";
  for (const auto& c : s.team.capability_universe()) std::cout << " " << c;
  std::cout << "\n";
  int t_p = 0;
  for (int j = 1; j <= s.team.size(); ++j) {
    const int h = horizon(s.specs[static_cast<std::size_t>(j - 1)]);
    t_p = std::max(t_p, h);
    std::cout << "agent " << j << " horizon " << h << "\n";
  }
  std::cout << "T_p = " << t_p << ", M = " << fmt_num(s.big_m) << "\n";
  print_warnings(s.warnings);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planner for capability-augmented temporal tasks on grids"};
  app.require_subcommand(1);

  auto* plan = app.add_subcommand("plan", "solve a scenario and print the plan");
  std::string plan_path;
  bool no_cat = false;
  std::string mode = "compact";
  std::string lp_path;
  std::string trace_path;
  plan->add_option("scenario", plan_path, "scenario JSON file")->required();
  plan->add_flag("--no-cat", no_cat, "strip collaboration clauses first");
  plan->add_option("--mode", mode, "colocation encoding (compact|paper)")
      ->check(CLI::IsMember({"compact", "paper"}));
  plan->add_option("--export-lp", lp_path, "write the model in LP format");
  plan->add_option("--trace", trace_path,
                   "write the plan trace (.json for JSON, CSV otherwise)");

  auto* random = app.add_subcommand("random", "generate a random scenario");
  int rows = 10;
  int cols = 10;
  std::uint64_t rand_seed = 0;
  std::string rand_out;
  random->add_option("--rows", rows, "grid rows")->check(CLI::PositiveNumber);
  random->add_option("--cols", cols, "grid columns")
      ->check(CLI::PositiveNumber);
  random->add_option("--seed", rand_seed, "generator seed");
  random->add_option("-o,--out", rand_out, "output file (default stdout)");

  auto* sweep = app.add_subcommand(
      "sweep", "paired cat / no-cat experiment over grid sizes");
  std::vector<int> sizes;
  int trials = 20;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  sweep->add_option("--sizes", sizes, "grid sizes, comma separated")
      ->required()
      ->delimiter(',');
  sweep->add_option("--trials", trials, "scenarios per size")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "sweep seed");
  sweep->add_option("-o,--out", sweep_out, "report CSV (default stdout)");

  auto* check = app.add_subcommand("check", "validate a scenario file");
  std::string check_path;
  check->add_option("scenario", check_path, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) {
      return cmd_plan(plan_path, no_cat, mode, lp_path, trace_path);
    }
    if (random->parsed()) {
      return cmd_random(rows, cols, rand_seed, rand_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sizes, trials, sweep_seed, sweep_out);
    }
    if (check->parsed()) {
      return cmd_check(check_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
