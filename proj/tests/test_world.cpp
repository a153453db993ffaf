#include "catmip/world.hpp"

#include <algorithm>

#include "catmip/errors.hpp"
#include "doctest.h"

using namespace catmip;

TEST_CASE("grid construction: counts and adjacency") {
  // R x C 4-grid: R*C self-loops plus 2*(2*R*C - R - C) directed neighbor
  // edges.  2x2: 4 + 8 = 12.  3x3: 9 + 24 = 33.  1x1: 1 + 0 = 1.
  auto g22 = build_grid(2, 2, {});
  CHECK(g22.node_count() == 4);
  CHECK(g22.edges().size() == 12);

  auto g33 = build_grid(3, 3, {});
  CHECK(g33.node_count() == 9);
  CHECK(g33.edges().size() == 33);

  auto g11 = build_grid(1, 1, {});
  CHECK(g11.node_count() == 1);
  CHECK(g11.edges().size() == 1);
  CHECK(g11.has_edge(1, 1));

  auto g55 = build_grid(5, 5, {});
  CHECK(g55.edges().size() == 105);

  // Row-major 1-based indexing: 2x2 node 1 = (1,1) neighbors right=2, down=3.
  CHECK(g22.successors(1) == std::vector<int>{1, 2, 3});
  CHECK(g22.successors(4) == std::vector<int>{2, 3, 4});
  CHECK(g22.predecessors(2) == std::vector<int>{1, 2, 4});
  CHECK(g22.pos(3) == GridPos{2, 1});
  CHECK(g33.pos(5) == GridPos{2, 2});
  CHECK(g33.successors(5) == std::vector<int>{2, 4, 5, 6, 8});
  CHECK_FALSE(g33.has_edge(1, 5));  // no diagonal moves
  CHECK_FALSE(g33.has_edge(1, 3));  // no skips
}

TEST_CASE("grid labeling") {
  auto env = build_grid(2, 3, {{"Water", {{1, 2}, {2, 2}}}, {"Goal", {{2, 3}}}});
  CHECK(env.labels_of(2) == std::set<std::string>{"Water"});
  CHECK(env.labels_of(5) == std::set<std::string>{"Water"});
  CHECK(env.labels_of(6) == std::set<std::string>{"Goal"});
  CHECK(env.labels_of(1).empty());
  CHECK(env.nodes_with("Water") == std::vector<int>{2, 5});
  CHECK(env.nodes_with("Goal") == std::vector<int>{6});
  CHECK(env.nodes_with("Absent").empty());
  CHECK(env.label_universe() == std::vector<std::string>{"Goal", "Water"});

  CHECK_THROWS_AS(build_grid(2, 2, {{"X", {{3, 1}}}}), Error);
  CHECK_THROWS_AS(build_grid(2, 2, {{"bad token", {{1, 1}}}}), Error);
  CHECK_THROWS_AS(build_grid(2, 2, {{"", {{1, 1}}}}), Error);
  CHECK_THROWS_AS(build_grid(0, 2, {}), Error);
}

TEST_CASE("validate_environment reports structural defects") {
  CHECK(validate_environment(build_grid(3, 4, {})).empty());

  // Node 2 lacks a self-loop.
  Environment missing(2, {{1, 1}, {1, 2}, {2, 1}}, {});
  auto v1 = validate_environment(missing);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == "node 2: no self-loop");

  // Dangling edge endpoint.
  Environment dangling(2, {{1, 1}, {2, 2}, {1, 99}}, {});
  auto v2 = validate_environment(dangling);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0].find("edge (1,99)") != std::string::npos);

  // Label attached to an absent node.
  Environment ghost(1, {{1, 1}}, {{5, {"Goal"}}});
  auto v3 = validate_environment(ghost);
  REQUIRE(v3.size() == 1);
  CHECK(v3[0].find("node 5") != std::string::npos);
}

TEST_CASE("team invariants") {
  Team team({{2, {"wheels", "WiFi"}, 1}, {1, {"carry"}, 1}});
  CHECK(team.size() == 2);
  CHECK(team.agent(1).capabilities == std::set<std::string>{"carry"});
  CHECK(team.holders("wheels") == std::vector<int>{2});
  CHECK(team.holders("carry") == std::vector<int>{1});
  CHECK(team.holders("none").empty());
  CHECK(team.capability_universe() ==
        std::vector<std::string>{"WiFi", "carry", "wheels"});

  CHECK_THROWS_AS(Team({{1, {}, 1}, {3, {}, 1}}), Error);  // gap in ids
  CHECK_THROWS_AS(Team({{1, {}, 1}, {1, {}, 1}}), Error);  // duplicate id
  CHECK_THROWS_AS(Team({{1, {"has space"}, 1}}), Error);
  CHECK_THROWS_AS(Team(std::vector<Agent>{}), Error);
}

TEST_CASE("trajectory validation") {
  auto env = build_grid(2, 2, {});
  Team team({{1, {"carry"}, 1}, {2, {"wheels"}, 4}});

  GroupTrajectory ok{{{1, 4}, {2, 4}, {4, 3}}};
  CHECK(!validate_trajectory(env, team, ok));
  CHECK(ok.horizon() == 2);
  CHECK(ok.position(1, 2) == 4);

  GroupTrajectory bad_start{{{2, 4}, {2, 4}}};
  auto e1 = validate_trajectory(env, team, bad_start);
  REQUIRE(e1.has_value());
  CHECK(e1->find("agent 1") != std::string::npos);
  CHECK(e1->find("starts at node 2") != std::string::npos);

  // 1 -> 4 is diagonal, not an edge; violation names agent and time.
  GroupTrajectory bad_move{{{1, 4}, {4, 4}}};
  auto e2 = validate_trajectory(env, team, bad_move);
  REQUIRE(e2.has_value());
  CHECK(e2->find("agent 1") != std::string::npos);
  CHECK(e2->find("1->4") != std::string::npos);
  CHECK(e2->find("time 1") != std::string::npos);

  GroupTrajectory bad_node{{{1, 4}, {1, 9}}};
  CHECK(validate_trajectory(env, team, bad_node).has_value());

  GroupTrajectory ragged{{{1, 4}, {1}}};
  CHECK(validate_trajectory(env, team, ragged).has_value());
}

TEST_CASE("co-location counts exclude the observing agent") {
  auto env = build_grid(1, 3, {});
  // Agents 1 and 2 hold "c"; agent 3 does not.
  Team team({{1, {"c"}, 1}, {2, {"c"}, 1}, {3, {"d"}, 1}});
  GroupTrajectory traj{{{1, 1, 1}, {2, 2, 1}}};
  REQUIRE(!validate_trajectory(env, team, traj));

  // k=0: everyone on node 1.  Agent 3 sees both holders of "c"; agent 1 sees
  // only agent 2 (self excluded).
  CHECK(count_colocated(traj, team, 3, "c", 0) == 2);
  CHECK(count_colocated(traj, team, 1, "c", 0) == 1);
  CHECK(count_colocated(traj, team, 1, "d", 0) == 1);
  CHECK(count_colocated(traj, team, 3, "d", 0) == 0);

  // k=1: agents 1,2 moved to node 2, agent 3 stayed.
  CHECK(count_colocated(traj, team, 3, "c", 1) == 0);
  CHECK(count_colocated(traj, team, 1, "c", 1) == 1);
  CHECK(count_colocated(traj, team, 2, "c", 1) == 1);
}

TEST_CASE("trace_of collects labels and counts per step") {
  auto env = build_grid(1, 3, {{"Goal", {{1, 3}}}, {"Water", {{1, 2}}}});
  Team team({{1, {"carry"}, 1}, {2, {"wheels", "WiFi"}, 1}});
  GroupTrajectory traj{{{1, 1}, {2, 2}, {3, 2}}};

  Trace t1 = trace_of(env, team, traj, 1);
  CHECK(t1.agent_id == 1);
  CHECK(t1.horizon() == 2);
  CHECK(t1.obs[0].labels.empty());
  CHECK(t1.obs[0].count("wheels") == 1);
  CHECK(t1.obs[0].count("WiFi") == 1);
  CHECK(t1.obs[0].count("carry") == 0);
  CHECK(t1.obs[1].labels == std::set<std::string>{"Water"});
  CHECK(t1.obs[1].count("wheels") == 1);
  CHECK(t1.obs[2].labels == std::set<std::string>{"Goal"});
  CHECK(t1.obs[2].count("wheels") == 0);

  Trace t2 = trace_of(env, team, traj, 2);
  CHECK(t2.obs[0].count("carry") == 1);
  CHECK(t2.obs[2].count("carry") == 0);
  CHECK(t2.obs[2].labels == std::set<std::string>{"Water"});

  GroupTrajectory bad{{{1, 1}, {3, 1}}};
  CHECK_THROWS_AS(trace_of(env, team, bad, 1), Error);
  CHECK_THROWS_AS(trace_of(env, team, traj, 9), Error);
}
