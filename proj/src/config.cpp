// Copyright 2026 The sortline Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sortline/config.hpp"

#include <fstream>
#include <sstream>

namespace sortline {

using nlohmann::json;

namespace {

constexpr std::string_view kDefaultConfig = R"json({
  "version": 1,
  "plant": {
    "step_period_ms": {"S1": 50, "S2": 100, "S3": 200},
    "cp_pos": 5,
    "ls2_pos": 25,
    "ejector_pos": [30, 35, 40],
    "nominal_cp_ms": 150,
    "nominal_bs_ms": 150,
    "initial_speed": "S1"
  },
  "latency_fns": {
    "f_CP": {"S1": 200, "S2": 400, "S3": 800},
    "f_BS": {"S1": 200, "S2": 400, "S3": 800},
    "f_LM": {"S1": 600, "S2": 1800, "S3": 3600}
  },
  "contracts": [
    {
      "name": "C_CP",
      "inputs": ["LS1"],
      "outputs": ["SC_CP", "CV_CP"],
      "params": ["M_S"],
      "assumptions": "M_S == S1 || M_S == S2 || M_S == S3",
      "guarantee": [
        {"trigger": "rising(LS1)", "obligation": "SC_CP != 0 && CV_CP != null", "within": "f_CP"}
      ]
    },
    {
      "name": "C_BS",
      "inputs": ["SC_CP", "CV_CP"],
      "outputs": ["SC_BS", "E_BS"],
      "params": ["M_S"],
      "assumptions": "M_S == S1 || M_S == S2 || M_S == S3",
      "guarantee": [
        {
          "trigger": "CV_CP != null && SC_CP != 0",
          "obligation": "SC_BS != 0 && E_BS != null",
          "within": "f_BS"
        }
      ]
    },
    {
      "name": "C_LM",
      "inputs": ["LS1"],
      "outputs": ["SC_BS", "E_BS"],
      "params": ["M_S"],
      "assumptions": "M_S == S1 || M_S == S2 || M_S == S3",
      "guarantee": [
        {"trigger": "rising(LS1)", "obligation": "SC_BS != 0 && E_BS != null", "within": "f_LM"}
      ]
    },
    {
      "name": "C_EC",
      "inputs": ["SC", "SC_CP", "LS2"],
      "outputs": [],
      "params": [],
      "assumptions": "true",
      "guarantee": [
        {"trigger": "rising(LS2)", "obligation": "SC == SC_CP + Offset", "mode": "biconditional"}
      ]
    },
    {
      "name": "C_MC",
      "inputs": ["SC", "SC_CP", "LS1", "LS2"],
      "outputs": ["SC_BS", "E_BS"],
      "params": ["M_S"],
      "assumptions": "M_S == S1 || M_S == S2 || M_S == S3",
      "guarantee": [
        {"trigger": "rising(LS1)", "obligation": "SC_BS != 0 && E_BS != null", "within": "f_LM"},
        {"trigger": "rising(LS2)", "obligation": "SC == SC_CP + Offset", "mode": "biconditional"}
      ]
    }
  ],
  "hierarchy": {
    "contract": "C_MC",
    "children": [
      {"contract": "C_LM", "children": [{"contract": "C_CP"}, {"contract": "C_BS"}]},
      {"contract": "C_EC"}
    ]
  },
  "rm": {
    "latency_leaves": [
      {"id": "CP", "contract": "C_CP", "host": "rpi-cp"},
      {"id": "BS", "contract": "C_BS", "host": "rpi-bs"}
    ],
    "jitter_leaf": {"id": "EC", "contract": "C_EC", "host": "rpi-ec"},
    "l1": {"id": "LM", "contract": "C_LM", "host": "rpi-bs"},
    "root": {"id": "MC", "contract": "C_MC", "host": "rpi-mc"}
  },
  "costs": {"message_ms": 1.0, "decision_ms": 0.5},
  "decentralized_decision_model": "mirror-hierarchical"
})json";

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing key '") + key + "'");
  return j.at(key);
}

SpeedLevel parse_speed(const json& j, const char* what) {
  auto s = speed_from_name(j.get<std::string>());
  if (!s) throw ConfigError(std::string("config: bad speed level for ") + what);
  return *s;
}

std::array<DurationMs, 3> parse_speed_table(const json& j, const std::string& what) {
  std::array<DurationMs, 3> out{};
  for (SpeedLevel s : kAllSpeeds) {
    const std::string key(speed_name(s));
    if (!j.contains(key)) throw ConfigError("config: " + what + " is missing " + key);
    out[speed_index(s)] = j.at(key).get<DurationMs>();
  }
  return out;
}

std::set<Signal> parse_signal_set(const json& j, const std::string& contract) {
  std::set<Signal> out;
  for (const auto& name : j) {
    auto sig = signal_from_wire(name.get<std::string>());
    if (!sig) {
      throw ConfigError("config: contract " + contract + " references unknown signal " +
                        name.get<std::string>());
    }
    out.insert(*sig);
  }
  return out;
}

}  // namespace

std::string fnv1a_digest(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::string default_config_json() { return std::string(kDefaultConfig); }

SystemConfig default_config() { return load_config(json::parse(kDefaultConfig)); }

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return load_config(doc);
}

SystemConfig load_config(const json& doc) {
  if (!doc.contains("version") || doc.at("version").get<int>() != 1) {
    throw ConfigError("config: unsupported or missing version (expected 1)");
  }

  SystemConfig cfg;

  const json& plant = require(doc, "plant");
  cfg.plant.step_period_ms = parse_speed_table(require(plant, "step_period_ms"), "step_period_ms");
  cfg.plant.cp_pos = require(plant, "cp_pos").get<std::int64_t>();
  cfg.plant.ls2_pos = require(plant, "ls2_pos").get<std::int64_t>();
  const json& ej = require(plant, "ejector_pos");
  if (!ej.is_array() || ej.size() != 3) {
    throw ConfigError("config: ejector_pos must list exactly three positions");
  }
  for (std::size_t i = 0; i < 3; ++i) cfg.plant.ejector_pos[i] = ej[i].get<std::int64_t>();
  cfg.plant.nominal_cp_ms = require(plant, "nominal_cp_ms").get<DurationMs>();
  cfg.plant.nominal_bs_ms = require(plant, "nominal_bs_ms").get<DurationMs>();
  cfg.plant.initial_speed = parse_speed(require(plant, "initial_speed"), "initial_speed");

  for (const auto& [name, table] : require(doc, "latency_fns").items()) {
    cfg.latency_fns.emplace(name, LatencyBound(name, parse_speed_table(table, name)));
  }

  const std::map<std::string, std::int64_t> constants = {{"Offset", cfg.plant.offset()}};
  for (const json& c : require(doc, "contracts")) {
    const std::string name = require(c, "name").get<std::string>();
    std::vector<GuaranteeClause> clauses;
    for (const json& g : require(c, "guarantee")) {
      GuaranteeClause clause;
      clause.trigger = parse_predicate(require(g, "trigger").get<std::string>(), constants);
      clause.obligation = parse_predicate(require(g, "obligation").get<std::string>(), constants);
      const std::string mode =
          g.contains("mode") ? g.at("mode").get<std::string>() : "bounded-response";
      if (mode == "biconditional") {
        clause.mode = ClauseMode::Biconditional;
      } else if (mode == "bounded-response") {
        clause.mode = ClauseMode::BoundedResponse;
      } else {
        throw ConfigError("config: contract " + name + " has unknown clause mode " + mode);
      }
      if (g.contains("within")) {
        const std::string fn = g.at("within").get<std::string>();
        auto it = cfg.latency_fns.find(fn);
        if (it == cfg.latency_fns.end()) {
          throw ConfigError("config: contract " + name + " references unknown latency fn " + fn);
        }
        clause.deadline = it->second;
      }
      clauses.push_back(std::move(clause));
    }
    std::set<std::string> params;
    for (const auto& p : require(c, "params")) params.insert(p.get<std::string>());
    cfg.registry.add(Contract(name, parse_signal_set(require(c, "inputs"), name),
                              parse_signal_set(require(c, "outputs"), name), std::move(params),
                              parse_predicate(require(c, "assumptions").get<std::string>(),
                                              constants),
                              std::move(clauses)));
  }

  // Hierarchy tree.
  struct Rec {
    static HierarchyNode parse(const json& j) {
      HierarchyNode node;
      node.contract = require(j, "contract").get<std::string>();
      if (j.contains("children")) {
        for (const json& c : j.at("children")) node.children.push_back(parse(c));
      }
      return node;
    }
  };
  cfg.hierarchy.root = Rec::parse(require(doc, "hierarchy"));

  const json& rm = require(doc, "rm");
  cfg.rm.latency_leaves.clear();
  for (const json& leaf : require(rm, "latency_leaves")) {
    cfg.rm.latency_leaves.push_back({require(leaf, "id").get<std::string>(),
                                     require(leaf, "contract").get<std::string>(),
                                     leaf.value("host", std::string{})});
  }
  const json& jl = require(rm, "jitter_leaf");
  cfg.rm.jitter_leaf = {require(jl, "id").get<std::string>(),
                        require(jl, "contract").get<std::string>(),
                        jl.value("host", std::string{})};
  const json& l1 = require(rm, "l1");
  cfg.rm.l1_id = require(l1, "id").get<std::string>();
  cfg.rm.l1_contract = require(l1, "contract").get<std::string>();
  cfg.rm.l1_host = l1.value("host", std::string{});
  const json& root = require(rm, "root");
  cfg.rm.root_id = require(root, "id").get<std::string>();
  cfg.rm.root_contract = require(root, "contract").get<std::string>();
  cfg.rm.root_host = root.value("host", std::string{});

  if (doc.contains("costs")) {
    cfg.costs.message_ms = doc.at("costs").value("message_ms", 1.0);
    cfg.costs.decision_ms = doc.at("costs").value("decision_ms", 0.5);
  }
  if (doc.contains("decentralized_decision_model")) {
    auto m = decision_model_from_name(doc.at("decentralized_decision_model").get<std::string>());
    if (!m) throw ConfigError("config: unknown decentralized_decision_model");
    cfg.decentralized_model = *m;
  }

  cfg.digest = fnv1a_digest(doc.dump());
  return cfg;
}

StructuralTiming SystemConfig::structural_timing() const {
  StructuralTiming t;
  t.offset_steps = plant.offset();
  t.step_period_ms = plant.step_period_ms;
  return t;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string ConfigValidation::to_string() const {
  std::ostringstream os;
  for (const std::string& e : plant_errors) os << "FAIL  plant: " << e << "\n";
  if (plant_errors.empty()) os << "pass  plant config\n";
  os << hierarchy.to_string();
  os << (ok ? "validation OK" : "validation FAILED") << "\n";
  return os.str();
}

ConfigValidation validate_config(const SystemConfig& config) {
  ConfigValidation v;
  try {
    config.plant.validate();
  } catch (const ConfigError& e) {
    v.plant_errors.push_back(e.what());
  }
  v.hierarchy = validate_hierarchy(config.hierarchy, config.registry,
                                   config.structural_timing());
  v.ok = v.plant_errors.empty() && v.hierarchy.all_passed;
  return v;
}

}  // namespace sortline
