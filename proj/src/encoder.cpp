#include "catmip/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "catmip/errors.hpp"
#include "catmip/semantics.hpp"

namespace catmip {

namespace {

std::string ts(int v) { return std::to_string(v); }

void add_scaled(LinExpr& dst, const LinExpr& src, double s) {
  for (const auto& [v, a] : src.terms()) dst.add(v, a * s);
  dst.add_constant(src.constant() * s);
}

// holders of `cap` other than `agent_id`
int other_holders(const Team& team, int agent_id, const std::string& cap) {
  const std::vector<int>& h = team.holders(cap);
  int n = static_cast<int>(h.size());
  if (std::binary_search(h.begin(), h.end(), agent_id)) --n;
  return n;
}

// simplify_cat works on whole-team holder counts; the encoding divides by
// the pool that excludes the agent itself, so clauses that survive the
// team-level pass can still be vacuous here and must be dropped the same way
CatAtom refine_for_agent(const CatAtom& atom, const Team& team, int agent_id,
                         std::vector<std::string>* warnings) {
  CatAtom out = atom;
  if (out.aug &&
      out.aug->threshold > other_holders(team, agent_id, out.aug->capability)) {
    if (warnings) {
      warnings->push_back(
          "agent " + ts(agent_id) + ": collaboration via \"" +
          out.aug->capability +
          "\" has too few other holders to reach its threshold; the atom "
          "falls back to its label");
    }
    out.aug.reset();
    out.limit.reset();
  }
  if (out.limit && out.limit->threshold >
                       other_holders(team, agent_id, out.limit->capability)) {
    if (warnings) {
      warnings->push_back("agent " + ts(agent_id) + ": limit via \"" +
                          out.limit->capability +
                          "\" can never reach its threshold; dropped");
    }
    out.limit.reset();
  }
  return out;
}

FormulaPtr refine_formula(const FormulaPtr& f, const Team& team, int agent_id,
                          std::vector<std::string>* warnings) {
  switch (f->kind()) {
    case FormulaKind::True:
      return f;
    case FormulaKind::Cat: {
      CatAtom a = refine_for_agent(f->atom(), team, agent_id, warnings);
      return a == f->atom() ? f : Formula::cat(std::move(a));
    }
    case FormulaKind::Not:
      return Formula::negation(
          refine_formula(f->child(), team, agent_id, warnings));
    case FormulaKind::And:
      return Formula::conj(refine_formula(f->lhs(), team, agent_id, warnings),
                           refine_formula(f->rhs(), team, agent_id, warnings));
    case FormulaKind::Or:
      return Formula::disj(refine_formula(f->lhs(), team, agent_id, warnings),
                           refine_formula(f->rhs(), team, agent_id, warnings));
    case FormulaKind::Eventually:
      return Formula::eventually(
          f->window(), refine_formula(f->child(), team, agent_id, warnings));
    case FormulaKind::Always:
      return Formula::always(
          f->window(), refine_formula(f->child(), team, agent_id, warnings));
    case FormulaKind::Until:
      return Formula::until(refine_formula(f->lhs(), team, agent_id, warnings),
                            f->window(),
                            refine_formula(f->rhs(), team, agent_id, warnings));
  }
  throw Error("unreachable formula kind");
}

struct Builder {
  const Environment& env;
  const Team& team;
  const EncodeOptions& opts;
  int t_p;

  MipModel model;
  VarMap vm;
  std::vector<std::string> warnings;

  std::map<std::tuple<int, bool, std::string, int>, VarId> label_memo;
  std::map<std::pair<int, std::string>, int> atom_index;
  std::vector<int> bit_counter;  // per agent, names formula variables
  std::set<std::string> warned_labels;

  Builder(const Environment& e, const Team& t, const EncodeOptions& o, int tp)
      : env(e), team(t), opts(o), t_p(tp) {
    vm.horizon = tp;
    bit_counter.assign(static_cast<std::size_t>(t.size()), 0);
  }

  void build_motion() {
    for (int j = 1; j <= team.size(); ++j) {
      int start = team.agent(j).start;
      // reach[k] = nodes the agent can occupy after k steps; arrivals from
      // outside the reachable set are pinned to zero so the relaxation never
      // routes through them
      std::vector<std::vector<char>> reach(
          static_cast<std::size_t>(t_p) + 1,
          std::vector<char>(static_cast<std::size_t>(env.node_count()) + 1,
                            0));
      reach[0][static_cast<std::size_t>(start)] = 1;
      for (int k = 1; k <= t_p; ++k) {
        for (int q = 1; q <= env.node_count(); ++q) {
          if (!reach[static_cast<std::size_t>(k - 1)]
                    [static_cast<std::size_t>(q)]) {
            continue;
          }
          for (int qp : env.successors(q)) {
            reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(qp)] =
                1;
          }
        }
      }
      for (int k = 0; k <= t_p; ++k) {
        LinExpr one;
        for (const auto& [q, qp] : env.edges()) {
          VarId z = model.add_binary("z_j" + ts(j) + "_e" + ts(q) + "_" +
                                     ts(qp) + "_k" + ts(k));
          vm.motion[{j, q, qp, k}] = z;
          vm.occupancy[{j, qp, k}].add(z, 1.0);
          one.add(z, 1.0);
          if (k == 0) {
            // step 0 is the start: the start self-loop fires, nothing else
            model.fix_var(z, (q == qp && qp == start) ? 1.0 : 0.0);
          } else if (!reach[static_cast<std::size_t>(k - 1)]
                           [static_cast<std::size_t>(q)]) {
            model.fix_var(z, 0.0);
          }
        }
        model.add_constraint("one_j" + ts(j) + "_k" + ts(k), std::move(one),
                             Sense::Eq, 1.0);
      }
      for (int k = 0; k < t_p; ++k) {
        for (int q = 1; q <= env.node_count(); ++q) {
          LinExpr flow = vm.occupancy.at({j, q, k});
          for (int qp : env.successors(q)) {
            flow.add(vm.motion.at({j, q, qp, k + 1}), -1.0);
          }
          model.add_constraint("flow_j" + ts(j) + "_q" + ts(q) + "_k" + ts(k),
                               std::move(flow), Sense::Eq, 0.0);
        }
      }
    }
  }

  VarId coloc_var(int a, int b, int k) {
    auto key = std::make_tuple(a, b, k);
    if (auto it = vm.coloc.find(key); it != vm.coloc.end()) return it->second;
    std::string tag = "_j" + ts(a) + "_j" + ts(b) + "_k" + ts(k);
    VarId alpha = model.add_binary("a" + tag);
    if (opts.colocation == ColocationMode::Compact) {
      LinExpr def;
      def.add(alpha, 1.0);
      for (int q = 1; q <= env.node_count(); ++q) {
        std::string yn = "y_j" + ts(a) + "_j" + ts(b) + "_q" + ts(q) + "_k" + ts(k);
        VarId y = model.add_binary(yn);
        const LinExpr& wa = vm.occupancy.at({a, q, k});
        const LinExpr& wb = vm.occupancy.at({b, q, k});
        LinExpr u1;
        u1.add(y, 1.0);
        add_scaled(u1, wa, -1.0);
        model.add_constraint(yn + "_u1", std::move(u1), Sense::Le, 0.0);
        LinExpr u2;
        u2.add(y, 1.0);
        add_scaled(u2, wb, -1.0);
        model.add_constraint(yn + "_u2", std::move(u2), Sense::Le, 0.0);
        LinExpr l;
        l.add(y, 1.0);
        add_scaled(l, wa, -1.0);
        add_scaled(l, wb, -1.0);
        model.add_constraint(yn + "_l", std::move(l), Sense::Ge, -1.0);
        def.add(y, -1.0);
      }
      model.add_constraint("def_a" + tag, std::move(def), Sense::Eq, 0.0);
    } else {
      // node-index difference; d is pinned to |ind_a - ind_b| exactly, via a
      // side binary, so alpha is forced in both directions
      LinExpr diff;  // ind(q_a(k)) - ind(q_b(k))
      for (int q = 1; q <= env.node_count(); ++q) {
        add_scaled(diff, vm.occupancy.at({a, q, k}), static_cast<double>(q));
        add_scaled(diff, vm.occupancy.at({b, q, k}), -static_cast<double>(q));
      }
      double nq = static_cast<double>(env.node_count());
      VarId d = model.add_var("d" + tag, VarKind::Continuous, 0.0, nq);
      VarId s = model.add_binary("s" + tag);
      LinExpr r1;
      r1.add(d, 1.0);
      add_scaled(r1, diff, -1.0);
      model.add_constraint("d" + tag + "_ge1", std::move(r1), Sense::Ge, 0.0);
      LinExpr r2;
      r2.add(d, 1.0);
      add_scaled(r2, diff, 1.0);
      model.add_constraint("d" + tag + "_ge2", std::move(r2), Sense::Ge, 0.0);
      LinExpr r3;
      r3.add(d, 1.0);
      add_scaled(r3, diff, -1.0);
      r3.add(s, -2.0 * nq);
      model.add_constraint("d" + tag + "_le1", std::move(r3), Sense::Le, 0.0);
      LinExpr r4;
      r4.add(d, 1.0);
      add_scaled(r4, diff, 1.0);
      r4.add(s, 2.0 * nq);
      model.add_constraint("d" + tag + "_le2", std::move(r4), Sense::Le,
                           2.0 * nq);
      LinExpr r5;  // not co-located forces distance >= 1
      r5.add(d, 1.0);
      r5.add(alpha, 1.0);
      model.add_constraint("a" + tag + "_lo", std::move(r5), Sense::Ge, 1.0);
      LinExpr r6;  // co-located forces distance 0
      r6.add(d, 1.0);
      r6.add(alpha, nq);
      model.add_constraint("a" + tag + "_hi", std::move(r6), Sense::Le, nq);
    }
    vm.coloc.emplace(key, alpha);
    return alpha;
  }

  const LinExpr& count_expr(int j, const std::string& cap, int k) {
    auto key = std::make_tuple(j, cap, k);
    if (auto it = vm.counts.find(key); it != vm.counts.end()) {
      return it->second;
    }
    LinExpr n;
    for (int h : team.holders(cap)) {
      if (h == j) continue;
      n.add(coloc_var(std::min(j, h), std::max(j, h), k), 1.0);
    }
    return vm.counts.emplace(key, std::move(n)).first->second;
  }

  VarId label_var(int j, const LabelRef& ref, int k) {
    auto key = std::make_tuple(j, ref.negated, ref.label, k);
    if (auto it = label_memo.find(key); it != label_memo.end()) {
      return it->second;
    }
    std::vector<int> marked = env.nodes_with(ref.label);
    if (marked.empty() && warned_labels.insert(ref.label).second) {
      warnings.push_back("label \"" + ref.label +
                         "\" marks no node; atoms on it are constant");
    }
    std::vector<int> nodes;
    if (ref.negated) {
      auto hit = marked.begin();
      for (int q = 1; q <= env.node_count(); ++q) {
        while (hit != marked.end() && *hit < q) ++hit;
        if (hit == marked.end() || *hit != q) nodes.push_back(q);
      }
    } else {
      nodes = std::move(marked);
    }
    VarId z = model.add_binary("zl_j" + ts(j) + "_" + (ref.negated ? "n" : "p") +
                               ref.label + "_k" + ts(k));
    if (nodes.empty()) {
      model.fix_var(z, 0.0);
    } else if (static_cast<int>(nodes.size()) == env.node_count()) {
      model.fix_var(z, 1.0);  // the one-transition row makes the sum 1
    } else {
      LinExpr def;
      def.add(z, 1.0);
      for (int q : nodes) add_scaled(def, vm.occupancy.at({j, q, k}), -1.0);
      model.add_constraint("def_" + model.var(z).name, std::move(def),
                           Sense::Eq, 0.0);
    }
    label_memo.emplace(key, z);
    return z;
  }

  VarId encode_atom(int j, const CatAtom& atom, const std::string& key, int k) {
    int& idx_slot = atom_index[{j, key}];
    if (idx_slot == 0) idx_slot = static_cast<int>(atom_index.size());
    std::string tag = "_j" + ts(j) + "_a" + ts(idx_slot) + "_k" + ts(k);

    VarMap::CatParts parts{};
    parts.label = label_var(j, atom.target, k);
    if (!atom.aug) {
      parts.sat = parts.label;
      vm.cat_parts.emplace(std::make_tuple(j, key, k), parts);
      return parts.sat;
    }

    int pool = other_holders(team, j, atom.aug->capability);
    if (pool <= 0) {
      throw Error("internal: collaboration clause for agent " + ts(j) +
                  " survived refinement with no helpers");
    }
    const LinExpr& n_aug = count_expr(j, atom.aug->capability, k);
    double m_aug = static_cast<double>(atom.aug->threshold);
    VarId zaug = model.add_binary("zaug" + tag);
    LinExpr lo;  // pool*z - n >= 1 - m: meeting the threshold forces z up
    lo.add(zaug, static_cast<double>(pool));
    add_scaled(lo, n_aug, -1.0);
    model.add_constraint("cataug_lo" + tag, std::move(lo), Sense::Ge,
                         1.0 - m_aug);
    LinExpr hi;  // m*z - n <= 0: missing the threshold forces z down
    hi.add(zaug, m_aug);
    add_scaled(hi, n_aug, -1.0);
    model.add_constraint("cataug_hi" + tag, std::move(hi), Sense::Le, 0.0);
    parts.aug = zaug;

    VarId avail = zaug;
    if (atom.limit) {
      int al_pool = other_holders(team, j, atom.limit->capability);
      if (al_pool <= 0) {
        throw Error("internal: limit clause for agent " + ts(j) +
                    " survived refinement with no holders");
      }
      const LinExpr& n_al = count_expr(j, atom.limit->capability, k);
      double m_al = static_cast<double>(atom.limit->threshold);
      VarId zal = model.add_binary("zal" + tag);
      LinExpr top;  // pool*z + n <= pool + m - 1: z up forces n < m
      top.add(zal, static_cast<double>(al_pool));
      add_scaled(top, n_al, 1.0);
      model.add_constraint("catal_hi" + tag, std::move(top), Sense::Le,
                           static_cast<double>(al_pool) + m_al - 1.0);
      LinExpr bot;  // m*z + n >= m: n < m forces z up
      bot.add(zal, m_al);
      add_scaled(bot, n_al, 1.0);
      model.add_constraint("catal_lo" + tag, std::move(bot), Sense::Ge, m_al);
      parts.al = zal;

      VarId both = model.add_binary("bm" + tag);
      encode_bool_and(model, both, {zaug, zal});
      avail = both;
    }

    VarId sat = model.add_binary("b" + tag);
    encode_bool_or(model, sat, {parts.label, avail});
    parts.sat = sat;
    vm.cat_parts.emplace(std::make_tuple(j, key, k), parts);
    return sat;
  }

  VarId fresh_bit(int j, int k) {
    int idx = bit_counter[static_cast<std::size_t>(j - 1)]++;
    return model.add_binary("b_j" + ts(j) + "_n" + ts(idx) + "_k" + ts(k));
  }

  VarId enc(int j, const FormulaPtr& f, int k) {
    std::string key = print(f);
    auto mk = std::make_tuple(j, key, k);
    if (auto it = vm.sat.find(mk); it != vm.sat.end()) return it->second;
    VarId out;
    switch (f->kind()) {
      case FormulaKind::True:
        out = fresh_bit(j, k);
        model.fix_var(out, 1.0);
        break;
      case FormulaKind::Cat:
        out = encode_atom(j, f->atom(), key, k);
        break;
      case FormulaKind::Not: {
        VarId c = enc(j, f->child(), k);
        out = fresh_bit(j, k);
        LinExpr e;
        e.add(out, 1.0).add(c, 1.0);
        model.add_constraint(model.var(out).name + "_neg", std::move(e),
                             Sense::Eq, 1.0);
        break;
      }
      case FormulaKind::And: {
        VarId l = enc(j, f->lhs(), k);
        VarId r = enc(j, f->rhs(), k);
        out = fresh_bit(j, k);
        encode_bool_and(model, out, {l, r});
        break;
      }
      case FormulaKind::Or: {
        VarId l = enc(j, f->lhs(), k);
        VarId r = enc(j, f->rhs(), k);
        out = fresh_bit(j, k);
        encode_bool_or(model, out, {l, r});
        break;
      }
      case FormulaKind::Eventually:
      case FormulaKind::Always: {
        Interval w = f->window();
        if (k + w.hi > t_p) {
          throw Error("unrolled window passes the planning horizon");
        }
        std::vector<VarId> ins;
        for (int t = k + w.lo; t <= k + w.hi; ++t) {
          ins.push_back(enc(j, f->child(), t));
        }
        out = fresh_bit(j, k);
        if (f->kind() == FormulaKind::Eventually) {
          encode_bool_or(model, out, ins);
        } else {
          encode_bool_and(model, out, ins);
        }
        break;
      }
      case FormulaKind::Until: {
        Interval w = f->window();
        if (k + w.hi > t_p) {
          throw Error("unrolled window passes the planning horizon");
        }
        // one stage per candidate instant k': rhs there, lhs throughout
        std::vector<VarId> stages;
        for (int kp = k + w.lo; kp <= k + w.hi; ++kp) {
          std::vector<VarId> parts{enc(j, f->rhs(), kp)};
          for (int kk = k; kk <= kp; ++kk) {
            parts.push_back(enc(j, f->lhs(), kk));
          }
          VarId stage = fresh_bit(j, k);
          encode_bool_and(model, stage, parts);
          stages.push_back(stage);
        }
        out = fresh_bit(j, k);
        encode_bool_or(model, out, stages);
        break;
      }
      default:
        throw Error("unreachable formula kind");
    }
    vm.sat.emplace(std::move(mk), out);
    return out;
  }
};

}  // namespace

EncodeResult encode(const Environment& env, const Team& team,
                    const std::vector<FormulaPtr>& specs,
                    const EncodeOptions& opts) {
  if (team.size() < 1) throw Error("team must contain at least one agent");
  if (static_cast<int>(specs.size()) != team.size()) {
    throw Error("need exactly one formula per agent: got " +
                ts(static_cast<int>(specs.size())) + " for " + ts(team.size()) +
                " agents");
  }
  if (!(opts.big_m > 0.0)) throw Error("M must be positive");

  std::vector<std::string> warnings;
  std::vector<FormulaPtr> refined;
  refined.reserve(specs.size());
  int t_p = 0;
  for (int j = 1; j <= team.size(); ++j) {
    FormulaPtr f = refine_formula(
        normalize(specs[static_cast<std::size_t>(j - 1)]), team, j, &warnings);
    t_p = std::max(t_p, horizon(f));
    refined.push_back(std::move(f));
  }
  if (opts.horizon_override) {
    if (*opts.horizon_override < t_p) {
      throw Error("horizon override " + ts(*opts.horizon_override) +
                  " is below the specs' horizon " + ts(t_p));
    }
    t_p = *opts.horizon_override;
  }
  if (opts.big_m < static_cast<double>(t_p)) {
    warnings.push_back(
        "big M " + std::to_string(opts.big_m) + " is below the horizon " +
        ts(t_p) + ": motion cost can outweigh task satisfaction");
  }

  Builder b(env, team, opts, t_p);
  b.warnings = std::move(warnings);
  b.build_motion();
  for (int j = 1; j <= team.size(); ++j) {
    b.vm.roots.push_back(b.enc(j, refined[static_cast<std::size_t>(j - 1)], 0));
  }

  LinExpr obj;
  for (VarId root : b.vm.roots) {
    obj.add(root, 2.0 * opts.big_m);
    obj.add_constant(-opts.big_m);
  }
  for (const auto& [key, z] : b.vm.motion) {
    const auto& [j, q, qp, k] = key;
    if (q != qp && k >= 1) obj.add(z, -1.0);
  }
  b.model.set_objective(std::move(obj));
  b.model.freeze();

  return {std::move(b.model), std::move(b.vm), std::move(b.warnings)};
}

PlanReport decode(const Solution& solution, const VarMap& map,
                  const Environment& env, const Team& team,
                  const std::vector<FormulaPtr>& specs, double big_m) {
  if (!solution.has_assignment()) {
    throw Error("solution carries no assignment to decode");
  }
  if (static_cast<int>(specs.size()) != team.size()) {
    throw Error("need exactly one formula per agent: got " +
                ts(static_cast<int>(specs.size())) + " for " + ts(team.size()) +
                " agents");
  }

  PlanReport rep;
  rep.status = solution.status;
  rep.stats = solution.stats;
  rep.objective = solution.objective;

  int t_p = map.horizon;
  rep.trajectory.at.assign(static_cast<std::size_t>(t_p) + 1,
                           std::vector<int>(static_cast<std::size_t>(team.size()), 0));
  for (int j = 1; j <= team.size(); ++j) {
    for (int k = 0; k <= t_p; ++k) {
      int where = 0;
      for (int q = 1; q <= env.node_count(); ++q) {
        double v = map.occupancy.at({j, q, k}).evaluate(solution.assignment);
        if (std::abs(v - std::round(v)) > 1e-6) {
          throw Error("fractional occupancy for agent " + ts(j) + " at step " +
                      ts(k) + "; cannot decode");
        }
        if (std::round(v) == 1.0) {
          if (where != 0) {
            throw Error("agent " + ts(j) + " occupies two nodes at step " +
                        ts(k) + "; cannot decode");
          }
          where = q;
        }
      }
      if (where == 0) {
        throw Error("agent " + ts(j) + " occupies no node at step " + ts(k) +
                    "; cannot decode");
      }
      rep.trajectory.at[static_cast<std::size_t>(k)]
                      [static_cast<std::size_t>(j - 1)] = where;
    }
  }
  if (auto defect = validate_trajectory(env, team, rep.trajectory)) {
    throw Error("decoded trajectory is invalid: " + *defect);
  }

  double mip_perf_total = 0.0;
  for (int j = 1; j <= team.size(); ++j) {
    PerformanceBreakdown oracle =
        performance(env, team, rep.trajectory,
                    specs[static_cast<std::size_t>(j - 1)], j, big_m,
                    &rep.warnings);
    AgentReport ar;
    ar.agent_id = j;
    ar.satisfied = oracle.satisfied;
    ar.motion_cost = oracle.motion_cost;
    ar.performance = oracle.performance;
    rep.agents.push_back(ar);
    rep.satisfied_count += oracle.satisfied ? 1 : 0;
    rep.total_motion += oracle.motion_cost;
    rep.total_performance += oracle.performance;

    bool mip_sat =
        solution.value(map.roots[static_cast<std::size_t>(j - 1)]) > 0.5;
    int mip_motion = 0;
    for (const auto& [key, z] : map.motion) {
      const auto& [mj, q, qp, k] = key;
      if (mj != j || q == qp || k < 1) continue;
      mip_motion +=
          static_cast<int>(std::round(solution.value(z)));
    }
    mip_perf_total += big_m * (mip_sat ? 1.0 : -1.0) - mip_motion;
    if (mip_sat != oracle.satisfied) {
      rep.mismatches.push_back(
          "agent " + ts(j) + ": the model's satisfaction bit says " +
          (mip_sat ? "true" : "false") + " but the trace semantics say " +
          (oracle.satisfied ? "true" : "false"));
    }
    if (mip_motion != oracle.motion_cost) {
      rep.mismatches.push_back("agent " + ts(j) + ": the model charges " +
                               ts(mip_motion) + " moves but the trace has " +
                               ts(oracle.motion_cost));
    }
  }
  if (std::abs(mip_perf_total - solution.objective) > 1e-6) {
    rep.mismatches.push_back(
        "solver objective " + std::to_string(solution.objective) +
        " differs from the model-side performance sum " +
        std::to_string(mip_perf_total));
  }

  std::sort(rep.warnings.begin(), rep.warnings.end());
  rep.warnings.erase(std::unique(rep.warnings.begin(), rep.warnings.end()),
                     rep.warnings.end());
  return rep;
}

}  // namespace catmip
