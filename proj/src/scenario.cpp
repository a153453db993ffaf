#include "catmip/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "catmip/errors.hpp"
#include "catmip/parser.hpp"
#include "catmip/rng.hpp"
#include "json.hpp"

namespace catmip {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(where + ": " + what);
}

long long require_int(const njson& obj, const char* key,
                      const std::string& where, long long lo, long long hi) {
  if (!obj.contains(key)) fail(where, "missing");
  const njson& v = obj.at(key);
  if (!v.is_number_integer()) fail(where, "expected an integer");
  long long n = v.get<long long>();
  if (n < lo || n > hi) {
    fail(where, "must lie in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  return n;
}

GridPos read_cell(const njson& v, const std::string& where, int rows,
                  int cols) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
      !v[1].is_number_integer()) {
    fail(where, "expected a [row, col] pair");
  }
  int r = v[0].get<int>();
  int c = v[1].get<int>();
  if (r < 1 || r > rows || c < 1 || c > cols) {
    fail(where, "cell (" + std::to_string(r) + "," + std::to_string(c) +
                    ") lies outside the " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " grid");
  }
  return {r, c};
}

bool integral(double v) {
  return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  njson root;
  try {
    root = njson::parse(json_text);
  } catch (const njson::parse_error& e) {
    throw Error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("/", "expected an object");
  for (const auto& item : root.items()) {
    const std::string& key = item.key();
    if (key != "grid" && key != "labels" && key != "agents" &&
        key != "specs" && key != "M" && key != "seed") {
      fail("/" + key, "unknown key");
    }
  }

  if (!root.contains("grid")) fail("/grid", "missing");
  if (!root.at("grid").is_object()) fail("/grid", "expected an object");
  const int rows =
      static_cast<int>(require_int(root.at("grid"), "rows", "/grid/rows", 1,
                                   10000));
  const int cols =
      static_cast<int>(require_int(root.at("grid"), "cols", "/grid/cols", 1,
                                   10000));
  auto cell_to_node = [cols](GridPos p) { return (p.row - 1) * cols + p.col; };

  std::map<std::string, std::vector<GridPos>> placement;
  std::set<std::string> declared;
  if (root.contains("labels")) {
    const njson& labels = root.at("labels");
    if (!labels.is_object()) fail("/labels", "expected an object");
    for (const auto& item : labels.items()) {
      const std::string& name = item.key();
      declared.insert(name);
      const njson& arr = item.value();
      const std::string base = "/labels/" + name;
      if (!arr.is_array()) fail(base, "expected an array of [row, col] cells");
      placement[name];  // a label may declare zero cells
      for (std::size_t i = 0; i < arr.size(); ++i) {
        placement[name].push_back(
            read_cell(arr[i], base + "/" + std::to_string(i), rows, cols));
      }
    }
  }

  if (!root.contains("agents")) fail("/agents", "missing");
  const njson& jagents = root.at("agents");
  if (!jagents.is_array() || jagents.empty()) {
    fail("/agents", "expected a non-empty array");
  }
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < jagents.size(); ++i) {
    const std::string base = "/agents/" + std::to_string(i);
    const njson& ja = jagents[i];
    if (!ja.is_object()) fail(base, "expected an object");
    Agent a;
    a.id = static_cast<int>(require_int(ja, "id", base + "/id", 1, 1000000));
    if (ja.contains("capabilities")) {
      const njson& caps = ja.at("capabilities");
      if (!caps.is_array()) fail(base + "/capabilities", "expected an array");
      for (std::size_t c = 0; c < caps.size(); ++c) {
        if (!caps[c].is_string()) {
          fail(base + "/capabilities/" + std::to_string(c),
               "expected a string");
        }
        a.capabilities.insert(caps[c].get<std::string>());
      }
    }
    if (!ja.contains("start")) fail(base + "/start", "missing");
    a.start = cell_to_node(read_cell(ja.at("start"), base + "/start", rows,
                                     cols));
    for (const auto& item : ja.items()) {
      const std::string& key = item.key();
      if (key != "id" && key != "capabilities" && key != "start") {
        fail(base + "/" + key, "unknown key");
      }
    }
    agents.push_back(std::move(a));
  }

  Environment env = [&] {
    try {
      return build_grid(rows, cols, placement);
    } catch (const Error& e) {
      fail("/labels", e.what());
    }
  }();
  Team team = [&] {
    try {
      return Team(std::move(agents));
    } catch (const Error& e) {
      fail("/agents", e.what());
    }
  }();

  std::set<std::string> cap_universe(team.capability_universe().begin(),
                                     team.capability_universe().end());
  if (!root.contains("specs")) fail("/specs", "missing");
  const njson& jspecs = root.at("specs");
  if (!jspecs.is_object()) fail("/specs", "expected an object keyed by agent id");
  for (const auto& item : jspecs.items()) {
    const std::string& key = item.key();
    char* end = nullptr;
    long id = std::strtol(key.c_str(), &end, 10);
    if (*key.c_str() == '\0' || *end != '\0' || id < 1 || id > team.size()) {
      fail("/specs/" + key, "no agent with this id");
    }
  }
  std::vector<FormulaPtr> specs;
  std::vector<std::string> texts;
  for (int j = 1; j <= team.size(); ++j) {
    const std::string key = std::to_string(j);
    if (!jspecs.contains(key)) {
      fail("/specs", "missing spec for agent " + key);
    }
    if (!jspecs.at(key).is_string()) fail("/specs/" + key, "expected a string");
    const std::string text = jspecs.at(key).get<std::string>();
    try {
      specs.push_back(parse_formula(text, declared, cap_universe));
    } catch (const ParseError& e) {
      fail("/specs/" + key, e.what());
    }
    texts.push_back(text);
  }

  if (!root.contains("M")) fail("/M", "missing");
  if (!root.at("M").is_number()) fail("/M", "expected a number");
  const double big_m = root.at("M").get<double>();
  if (!(big_m > 0.0)) fail("/M", "must be positive");

  std::optional<std::uint64_t> seed;
  if (root.contains("seed")) {
    const njson& js = root.at("seed");
    if (!js.is_number_unsigned() && !(js.is_number_integer() &&
                                      js.get<long long>() >= 0)) {
      fail("/seed", "expected a non-negative integer");
    }
    seed = js.get<std::uint64_t>();
  }

  std::vector<std::string> warnings;
  for (int j = 1; j <= team.size(); ++j) {
    const FormulaPtr& f = specs[static_cast<std::size_t>(j - 1)];
    if (!equal(simplify_cats(f, team), f)) {
      warnings.push_back("agent " + std::to_string(j) +
                         ": some collaboration clauses are vacuous for this "
                         "team and will fall back to their labels");
    }
  }

  return Scenario{std::move(env),  std::move(team),    std::move(specs),
                  std::move(texts), big_m,             seed,
                  std::move(declared), std::move(warnings)};
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  if (!s.env.has_geometry()) {
    throw Error("scenario emission needs grid geometry");
  }
  const GridPos extent = s.env.pos(s.env.node_count());

  ojson root;
  root["grid"] = ojson{{"rows", extent.row}, {"cols", extent.col}};

  std::set<std::string> names = s.declared_labels;
  for (const auto& name : s.env.label_universe()) names.insert(name);
  ojson labels = ojson::object();
  for (const auto& name : names) {
    ojson arr = ojson::array();
    for (int q : s.env.nodes_with(name)) {
      GridPos p = s.env.pos(q);
      arr.push_back(ojson::array({p.row, p.col}));
    }
    labels[name] = std::move(arr);
  }
  root["labels"] = std::move(labels);

  ojson agents = ojson::array();
  for (const auto& a : s.team.agents()) {
    ojson ja;
    ja["id"] = a.id;
    ja["capabilities"] = std::vector<std::string>(a.capabilities.begin(),
                                                  a.capabilities.end());
    GridPos p = s.env.pos(a.start);
    ja["start"] = ojson::array({p.row, p.col});
    agents.push_back(std::move(ja));
  }
  root["agents"] = std::move(agents);

  ojson specs = ojson::object();
  for (std::size_t j = 0; j < s.spec_texts.size(); ++j) {
    specs[std::to_string(j + 1)] = s.spec_texts[j];
  }
  root["specs"] = std::move(specs);

  if (integral(s.big_m)) {
    root["M"] = static_cast<long long>(std::llround(s.big_m));
  } else {
    root["M"] = s.big_m;
  }
  if (s.seed) root["seed"] = *s.seed;
  return root.dump(2) + "\n";
}

std::vector<AgentTemplate> default_agent_templates() {
  AgentTemplate carrier;
  carrier.capabilities = {"carry"};
  carrier.count = 1;
  carrier.spec_text =
      R"(F[0,6] (CAT("Scenic") & F[0,4] CAT("Upload", aug("WiFi", 1))))";
  AgentTemplate ground;
  ground.capabilities = {"WiFi", "wheels"};
  ground.count = 2;
  ground.spec_text =
      R"(F[0,10] CAT("Goal") & G[0,10] CAT(!"Water", aug("carry", 1), limit("wheels", 1)))";
  return {carrier, ground};
}

Scenario random_scenario(const GeneratorConfig& cfg) {
  if (cfg.rows < 1 || cfg.cols < 1) {
    throw Error("generator grid needs positive dimensions");
  }
  double total = 0.0;
  std::set<std::string> density_keys;
  for (const auto& [name, d] : cfg.densities) {
    if (name.empty()) throw Error("generator density label must be non-empty");
    if (!(d >= 0.0 && d <= 1.0)) {
      throw Error("generator density for \"" + name + "\" must lie in [0, 1]");
    }
    if (!density_keys.insert(name).second) {
      throw Error("duplicate density label \"" + name + "\"");
    }
    total += d;
  }
  if (total > 1.0 + 1e-12) throw Error("generator densities sum past 1");
  for (const auto& name : cfg.required) {
    if (!density_keys.count(name)) {
      throw Error("required label \"" + name + "\" has no density entry");
    }
  }
  const auto templates =
      cfg.agents.empty() ? default_agent_templates() : cfg.agents;
  int n_agents = 0;
  for (const auto& t : templates) {
    if (t.count < 0) throw Error("agent template count must be non-negative");
    n_agents += t.count;
  }
  if (n_agents < 1) throw Error("generator needs at least one agent");
  if (!(cfg.big_m > 0.0)) throw Error("M must be positive");

  const int n = cfg.rows * cfg.cols;
  if (static_cast<int>(cfg.required.size()) > n) {
    throw Error("grid too small to host the required labels");
  }

  SplitMix64 rng(cfg.seed);

  // One uniform draw per node, tested against the cumulative densities in
  // their configured order; leftover mass means unlabeled.
  std::map<std::string, std::vector<int>> cells;
  for (const auto& [name, d] : cfg.densities) cells[name];
  std::vector<int> unlabeled;
  for (int q = 1; q <= n; ++q) {
    const double u = rng.next_unit();
    double cum = 0.0;
    bool hit = false;
    for (const auto& [name, d] : cfg.densities) {
      cum += d;
      if (u < cum) {
        cells[name].push_back(q);
        hit = true;
        break;
      }
    }
    if (!hit) unlabeled.push_back(q);
  }

  // Shortfalls in required labels are patched by drawing uniformly among the
  // still-unlabeled nodes, in the configured order.
  for (const auto& name : cfg.required) {
    if (!cells[name].empty()) continue;
    if (unlabeled.empty()) {
      throw Error("grid too small to host required label \"" + name + "\"");
    }
    const std::size_t pick =
        static_cast<std::size_t>(rng.next_below(unlabeled.size()));
    cells[name].push_back(unlabeled[pick]);
    unlabeled.erase(unlabeled.begin() +
                    static_cast<std::ptrdiff_t>(pick));
  }

  std::set<int> water;
  if (auto it = cells.find("Water"); it != cells.end()) {
    water.insert(it->second.begin(), it->second.end());
  }
  std::vector<int> pool;
  for (int q = 1; q <= n; ++q) {
    if (!water.count(q)) pool.push_back(q);
  }
  if (pool.empty()) throw Error("every node is Water; nowhere to place agents");

  std::vector<Agent> agents;
  int id = 1;
  for (const auto& t : templates) {
    for (int i = 0; i < t.count; ++i) {
      Agent a;
      a.id = id++;
      a.capabilities = t.capabilities;
      a.start =
          pool[static_cast<std::size_t>(rng.next_below(pool.size()))];
      agents.push_back(std::move(a));
    }
  }
  Team team(std::move(agents));

  auto to_pos = [&](int q) {
    return GridPos{(q - 1) / cfg.cols + 1, (q - 1) % cfg.cols + 1};
  };
  std::map<std::string, std::vector<GridPos>> placement;
  for (const auto& [name, qs] : cells) {
    placement[name];
    for (int q : qs) placement[name].push_back(to_pos(q));
  }
  Environment env = build_grid(cfg.rows, cfg.cols, placement);

  std::set<std::string> cap_universe(team.capability_universe().begin(),
                                     team.capability_universe().end());
  std::vector<FormulaPtr> specs;
  std::vector<std::string> texts;
  for (const auto& t : templates) {
    for (int i = 0; i < t.count; ++i) {
      try {
        specs.push_back(parse_formula(t.spec_text, density_keys, cap_universe));
      } catch (const ParseError& e) {
        throw Error("agent template spec \"" + t.spec_text +
                    "\": " + e.what());
      }
      texts.push_back(t.spec_text);
    }
  }

  return Scenario{std::move(env),   std::move(team),
                  std::move(specs), std::move(texts),
                  cfg.big_m,        cfg.seed,
                  std::move(density_keys), {}};
}

}  // namespace catmip
