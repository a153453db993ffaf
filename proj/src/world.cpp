#include "catmip/world.hpp"

#include <algorithm>
#include <sstream>

#include "catmip/errors.hpp"

namespace catmip {

namespace {

bool valid_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return false;
  }
  return true;
}

}  // namespace

Environment::Environment(int node_count, std::vector<std::pair<int, int>> edges,
                         std::map<int, std::set<std::string>> labels,
                         std::vector<GridPos> geometry)
    : node_count_(node_count),
      edges_(std::move(edges)),
      labels_(std::move(labels)),
      geometry_(std::move(geometry)) {
  if (node_count_ < 1) throw Error("environment needs at least one node");
  if (!geometry_.empty() &&
      static_cast<int>(geometry_.size()) != node_count_) {
    throw Error("geometry size does not match node count");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  succ_.assign(node_count_ + 1, {});
  pred_.assign(node_count_ + 1, {});
  for (const auto& [q, qp] : edges_) {
    if (q >= 1 && q <= node_count_ && qp >= 1 && qp <= node_count_) {
      succ_[q].push_back(qp);
      pred_[qp].push_back(q);
    }
  }
  // succ lists come out sorted because edges_ is sorted by (tail, head).
  for (auto& p : pred_) std::sort(p.begin(), p.end());
}

const std::vector<int>& Environment::successors(int q) const {
  if (q < 1 || q > node_count_) return empty_adj_;
  return succ_[q];
}

const std::vector<int>& Environment::predecessors(int q) const {
  if (q < 1 || q > node_count_) return empty_adj_;
  return pred_[q];
}

bool Environment::has_edge(int q, int qp) const {
  return std::binary_search(edges_.begin(), edges_.end(),
                            std::make_pair(q, qp));
}

const std::set<std::string>& Environment::labels_of(int q) const {
  auto it = labels_.find(q);
  return it == labels_.end() ? empty_labels_ : it->second;
}

std::vector<int> Environment::nodes_with(const std::string& label) const {
  std::vector<int> out;
  for (const auto& [q, ls] : labels_) {
    if (q >= 1 && q <= node_count_ && ls.count(label)) out.push_back(q);
  }
  return out;
}

std::vector<std::string> Environment::label_universe() const {
  std::set<std::string> seen;
  for (const auto& [q, ls] : labels_) seen.insert(ls.begin(), ls.end());
  return {seen.begin(), seen.end()};
}

Environment build_grid(int rows, int cols,
                       const std::map<std::string, std::vector<GridPos>>& labels) {
  if (rows < 1 || cols < 1) throw Error("grid needs positive dimensions");
  auto index = [cols](int r, int c) { return (r - 1) * cols + c; };
  std::vector<std::pair<int, int>> edges;
  std::vector<GridPos> geometry;
  for (int r = 1; r <= rows; ++r) {
    for (int c = 1; c <= cols; ++c) {
      int q = index(r, c);
      geometry.push_back({r, c});
      edges.emplace_back(q, q);
      if (r > 1) edges.emplace_back(q, index(r - 1, c));
      if (r < rows) edges.emplace_back(q, index(r + 1, c));
      if (c > 1) edges.emplace_back(q, index(r, c - 1));
      if (c < cols) edges.emplace_back(q, index(r, c + 1));
    }
  }
  std::map<int, std::set<std::string>> labeling;
  for (const auto& [name, cells] : labels) {
    if (!valid_token(name)) {
      throw Error("label token '" + name + "' is empty or has whitespace");
    }
    for (const GridPos& p : cells) {
      if (p.row < 1 || p.row > rows || p.col < 1 || p.col > cols) {
        std::ostringstream os;
        os << "label '" << name << "' cell (" << p.row << "," << p.col
           << ") outside " << rows << "x" << cols << " grid";
        throw Error(os.str());
      }
      labeling[index(p.row, p.col)].insert(name);
    }
  }
  return Environment(rows * cols, std::move(edges), std::move(labeling),
                     std::move(geometry));
}

std::vector<std::string> validate_environment(const Environment& env) {
  std::vector<std::string> out;
  int n = env.node_count();
  for (const auto& [q, qp] : env.edges()) {
    if (q < 1 || q > n || qp < 1 || qp > n) {
      std::ostringstream os;
      os << "edge (" << q << "," << qp << "): endpoint outside 1.." << n;
      out.push_back(os.str());
    }
  }
  for (int q = 1; q <= n; ++q) {
    if (!env.has_edge(q, q)) {
      out.push_back("node " + std::to_string(q) + ": no self-loop");
    }
  }
  for (const std::string& label : env.label_universe()) {
    if (!valid_token(label)) {
      out.push_back("label '" + label + "': empty or has whitespace");
    }
  }
  for (const auto& [q, ls] : env.label_map()) {
    if (q < 1 || q > n) {
      out.push_back("labels on node " + std::to_string(q) +
                    ": node outside 1.." + std::to_string(n));
    } else if (ls.empty()) {
      out.push_back("node " + std::to_string(q) + ": empty label set entry");
    }
  }
  return out;
}

Team::Team(std::vector<Agent> agents) : agents_(std::move(agents)) {
  std::sort(agents_.begin(), agents_.end(),
            [](const Agent& a, const Agent& b) { return a.id < b.id; });
  for (int i = 0; i < static_cast<int>(agents_.size()); ++i) {
    if (agents_[i].id != i + 1) {
      throw Error("agent ids must be exactly 1..N; got id " +
                  std::to_string(agents_[i].id) + " at rank " +
                  std::to_string(i + 1));
    }
    for (const std::string& c : agents_[i].capabilities) {
      if (!valid_token(c)) {
        throw Error("capability token '" + c + "' is empty or has whitespace");
      }
      holders_[c].push_back(agents_[i].id);
    }
  }
  if (agents_.empty()) throw Error("team needs at least one agent");
  for (const auto& [c, ids] : holders_) capability_universe_.push_back(c);
}

const std::vector<int>& Team::holders(const std::string& capability) const {
  auto it = holders_.find(capability);
  return it == holders_.end() ? no_holders_ : it->second;
}

std::optional<std::string> validate_trajectory(const Environment& env,
                                               const Team& team,
                                               const GroupTrajectory& traj) {
  if (traj.at.empty()) return "trajectory has no time steps";
  int n_agents = team.size();
  for (int k = 0; k < static_cast<int>(traj.at.size()); ++k) {
    if (static_cast<int>(traj.at[k].size()) != n_agents) {
      return "time " + std::to_string(k) + ": row has " +
             std::to_string(traj.at[k].size()) + " entries, team has " +
             std::to_string(n_agents);
    }
    for (int j = 1; j <= n_agents; ++j) {
      int q = traj.at[k][j - 1];
      if (q < 1 || q > env.node_count()) {
        return "agent " + std::to_string(j) + " time " + std::to_string(k) +
               ": node " + std::to_string(q) + " outside environment";
      }
    }
  }
  for (int j = 1; j <= n_agents; ++j) {
    if (traj.at[0][j - 1] != team.agent(j).start) {
      return "agent " + std::to_string(j) + ": trajectory starts at node " +
             std::to_string(traj.at[0][j - 1]) + ", agent starts at node " +
             std::to_string(team.agent(j).start);
    }
  }
  for (int k = 0; k + 1 < static_cast<int>(traj.at.size()); ++k) {
    for (int j = 1; j <= n_agents; ++j) {
      int q = traj.at[k][j - 1];
      int qp = traj.at[k + 1][j - 1];
      if (!env.has_edge(q, qp)) {
        return "agent " + std::to_string(j) + ": move " + std::to_string(q) +
               "->" + std::to_string(qp) + " at time " + std::to_string(k + 1) +
               " is not an edge";
      }
    }
  }
  return std::nullopt;
}

int count_colocated(const GroupTrajectory& traj, const Team& team,
                    int agent_id, const std::string& capability, int k) {
  int here = traj.position(agent_id, k);
  int n = 0;
  for (int other : team.holders(capability)) {
    if (other != agent_id && traj.position(other, k) == here) ++n;
  }
  return n;
}

Trace trace_of(const Environment& env, const Team& team,
               const GroupTrajectory& traj, int agent_id) {
  if (auto bad = validate_trajectory(env, team, traj)) {
    throw Error("invalid trajectory: " + *bad);
  }
  if (agent_id < 1 || agent_id > team.size()) {
    throw Error("no agent " + std::to_string(agent_id));
  }
  Trace t;
  t.agent_id = agent_id;
  for (int k = 0; k <= traj.horizon(); ++k) {
    Observation o;
    o.labels = env.labels_of(traj.position(agent_id, k));
    for (const std::string& c : team.capability_universe()) {
      o.counts[c] = count_colocated(traj, team, agent_id, c, k);
    }
    t.obs.push_back(std::move(o));
  }
  return t;
}

}  // namespace catmip
