#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace catmip {

/* Discrete world shared by the planner and the reference semantics.
 *
 * Nodes are 1-based integers.  Edges are directed; a node's self-loop means
 * "stay put".  Grid environments are row-major: node (r, c) of an R x C grid
 * has index (r-1)*C + c, rows and columns both starting at 1.  A group
 * trajectory stores one node per (time step, agent) with time running from 0
 * to the horizon inclusive.
 *
 * Construction is permissive: an Environment may hold dangling edges or
 * labels on absent nodes so that validate_environment can report them.
 */

struct GridPos {
  int row = 0;
  int col = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

class Environment {
 public:
  Environment(int node_count, std::vector<std::pair<int, int>> edges,
              std::map<int, std::set<std::string>> labels,
              std::vector<GridPos> geometry = {});

  int node_count() const { return node_count_; }
  // Sorted, duplicates removed.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& successors(int q) const;
  const std::vector<int>& predecessors(int q) const;
  bool has_edge(int q, int qp) const;

  const std::set<std::string>& labels_of(int q) const;
  // All nodes carrying `label`, sorted; empty when the label marks nothing.
  std::vector<int> nodes_with(const std::string& label) const;
  // Raw node -> labels map as constructed (may reference absent nodes;
  // validate_environment reports those).
  const std::map<int, std::set<std::string>>& label_map() const {
    return labels_;
  }
  // Distinct labels in use, sorted.
  std::vector<std::string> label_universe() const;

  bool has_geometry() const { return !geometry_.empty(); }
  // Valid only when has_geometry(); grid builders always attach geometry.
  GridPos pos(int q) const { return geometry_.at(q - 1); }

 private:
  int node_count_;
  std::vector<std::pair<int, int>> edges_;
  std::map<int, std::set<std::string>> labels_;
  std::vector<GridPos> geometry_;
  std::vector<std::vector<int>> succ_;  // index 0 unused
  std::vector<std::vector<int>> pred_;
  std::set<std::string> empty_labels_;
  std::vector<int> empty_adj_;
};

// 4-connected grid with self-loops on every cell.  `labels` maps a label
// token to the cells carrying it.  Throws Error on malformed tokens or cells
// outside the grid.
Environment build_grid(int rows, int cols,
                       const std::map<std::string, std::vector<GridPos>>& labels);

// Structural checks: self-loop on every node, edge endpoints in range,
// labeled nodes in range, label tokens non-empty and whitespace-free.
// Returns one human-readable violation per defect; empty means sound.
std::vector<std::string> validate_environment(const Environment& env);

struct Agent {
  int id = 0;  // 1-based, unique
  std::set<std::string> capabilities;
  int start = 0;  // node id
};

class Team {
 public:
  // Agents must have ids exactly 1..N (any order given); throws Error
  // otherwise or on malformed capability tokens.
  explicit Team(std::vector<Agent> agents);

  int size() const { return static_cast<int>(agents_.size()); }
  const Agent& agent(int id) const { return agents_.at(id - 1); }
  const std::vector<Agent>& agents() const { return agents_; }

  // Ids of agents holding `capability`, sorted ascending.
  const std::vector<int>& holders(const std::string& capability) const;
  // Distinct capabilities across the team, sorted.
  const std::vector<std::string>& capability_universe() const {
    return capability_universe_;
  }

 private:
  std::vector<Agent> agents_;
  std::map<std::string, std::vector<int>> holders_;
  std::vector<std::string> capability_universe_;
  std::vector<int> no_holders_;
};

struct GroupTrajectory {
  // at[k][j-1] = node of agent j at time k; k runs 0..horizon.
  std::vector<std::vector<int>> at;

  int horizon() const { return static_cast<int>(at.size()) - 1; }
  int position(int agent_id, int k) const { return at.at(k).at(agent_id - 1); }
};

// First structural defect of the trajectory against env/team, or nullopt:
// row width, node range, start nodes, and edge-respecting moves.
std::optional<std::string> validate_trajectory(const Environment& env,
                                               const Team& team,
                                               const GroupTrajectory& traj);

// Number of agents other than `agent_id` that hold `capability` and stand on
// the same node as `agent_id` at time k.
int count_colocated(const GroupTrajectory& traj, const Team& team,
                    int agent_id, const std::string& capability, int k);

struct Observation {
  std::set<std::string> labels;
  std::map<std::string, int> counts;  // capability -> co-located holders

  int count(const std::string& capability) const {
    auto it = counts.find(capability);
    return it == counts.end() ? 0 : it->second;
  }
};

struct Trace {
  int agent_id = 0;
  std::vector<Observation> obs;  // index = time step

  int horizon() const { return static_cast<int>(obs.size()) - 1; }
};

// Observation sequence of one agent along a validated trajectory.  Counts
// cover every capability present in the team.  Throws Error when the
// trajectory fails validate_trajectory.
Trace trace_of(const Environment& env, const Team& team,
               const GroupTrajectory& traj, int agent_id);

}  // namespace catmip
