#pragma once

// Scenario files and the seeded random environment generator.
//
// A scenario is a JSON document:
//
//   {
//     "grid":   {"rows": 5, "cols": 5},
//     "labels": {"Water": [[1,4], [2,4]], ...},
//     "agents": [{"id": 1, "capabilities": ["carry"], "start": [3,3]}, ...],
//     "specs":  {"1": "F[0,6] CAT(\"Scenic\")", ...},
//     "M":      50,
//     "seed":   7            // optional, recorded for provenance
//   }
//
// Cells are 1-based [row, col].  Every agent must have a spec; every label
// and capability a spec mentions must be declared by the labels map or held
// by some agent.  Validation errors carry a JSON-pointer-style path to the
// offending element.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "catmip/formula.hpp"
#include "catmip/world.hpp"

namespace catmip {

struct Scenario {
  Environment env;
  Team team;
  std::vector<FormulaPtr> specs;        // specs[j-1] belongs to agent j
  std::vector<std::string> spec_texts;  // original text, same order
  double big_m = 50.0;
  std::optional<std::uint64_t> seed;    // generator seed, if generated
  // Label names the file declares, placed or not.  Parsing validates spec
  // labels against this set, so a label may legally mark zero nodes.
  std::set<std::string> declared_labels;
  std::vector<std::string> warnings;    // surfaced during load
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

// Canonical emission: labels sorted by name, cells row-major, agents by id,
// specs by id, two-space indent, trailing newline.  Equal scenarios produce
// equal bytes.
std::string scenario_to_json(const Scenario& s);

struct AgentTemplate {
  std::set<std::string> capabilities;
  int count = 1;
  std::string spec_text;
};

struct GeneratorConfig {
  int rows = 10;
  int cols = 10;
  // Rolled in order with one uniform draw per node; at most one label per
  // node, leftover probability mass means unlabeled.
  std::vector<std::pair<std::string, double>> densities = {
      {"Water", 0.60}, {"Upload", 0.01}, {"Scenic", 0.01}, {"Goal", 0.01}};
  // Each must end up on >= 1 node; shortfalls are patched by re-rolling
  // unlabeled nodes.
  std::vector<std::string> required = {"Upload", "Scenic", "Goal"};
  std::vector<AgentTemplate> agents;  // empty -> default_agent_templates()
  std::uint64_t seed = 0;
  double big_m = 50.0;
};

// One carrier plus two wheeled ground agents, with the shipped mission pair:
// the carrier tours a Scenic node and then uploads (in person or next to a
// WiFi holder); the ground agents head for a Goal while staying off Water
// unless a carrier is present and no other wheeled agent crowds the cell.
std::vector<AgentTemplate> default_agent_templates();

// Deterministic under cfg.seed; see the implementation notes in the docs.
// Agents start on uniformly drawn non-Water nodes.  Throws when the grid
// cannot host the required labels or the team.
Scenario random_scenario(const GeneratorConfig& cfg);

}  // namespace catmip
