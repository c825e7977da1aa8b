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

#include <doctest.h>

#include <map>

#include "sortline/harness.hpp"

using namespace sortline;

namespace {

ScenarioEntry raw_entry(std::vector<Injection> injections) {
  ScenarioEntry entry;
  entry.type = 0;
  entry.raw = std::move(injections);
  return entry;
}

Injection bs_latency(DurationMs ms) {
  Injection inj;
  inj.kind = LatencyInflation{CyberComponent::BS, ms, 0};
  return inj;
}

}  // namespace

TEST_CASE("canonical script shape and expansions") {
  const ScenarioScript script = canonical_script();
  REQUIRE(script.entries.size() == 9);
  std::vector<int> types;
  for (const ScenarioEntry& e : script.entries) {
    types.push_back(e.type);
    CHECK(e.colour == Colour::White);
  }
  CHECK(types == std::vector<int>{1, 2, 3, 1, 2, 3, 4, 5, 6});

  auto injections = expand_entry(script.entries[0], 9);
  REQUIRE(injections.size() == 1);
  const auto& cp = std::get<LatencyInflation>(injections[0].kind);
  CHECK(cp.component == CyberComponent::CP);
  CHECK(cp.absolute == 250);
  CHECK(injections[0].token == 9);

  auto six = expand_entry(script.entries[8], 3);
  REQUIRE(six.size() == 2);
  CHECK(std::get<LatencyInflation>(six[0].kind).absolute == 1550);
  CHECK(std::get<SlipInjection>(six[1].kind).steps == 3);
}

TEST_CASE("scenario scripts round-trip through JSON") {
  ScenarioScript script;
  script.entries.push_back(canonical_script().entries[0]);
  script.entries.push_back(raw_entry({bs_latency(6500)}));
  const ScenarioScript back = ScenarioScript::from_json(script.to_json());
  CHECK(back.entries.size() == 2);
  CHECK(back.digest() == script.digest());
  CHECK(back.entries[1].raw.size() == 1);
}

TEST_CASE("recovery time is the pinned cost-model arithmetic") {
  CHECK(recovery_time(21, 13) == doctest::Approx(27.5));
  CHECK(recovery_time(108, 13) == doctest::Approx(114.5));
  CHECK(recovery_time(48, 12) == doctest::Approx(54.0));
  CHECK(recovery_time(0, 0) == doctest::Approx(0.0));
  CHECK(recovery_time(10, 10, CostModel{2.0, 1.0}) == doctest::Approx(30.0));
}

TEST_CASE("canonical hierarchical run reproduces the headline metrics") {
  const SystemConfig cfg = default_config();
  const RunReport r = run_experiment(cfg, canonical_script(), Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  CHECK(r.faults == 12);
  CHECK(r.messages == 21);
  CHECK(r.decisions == 13);
  CHECK(r.recovery_time_ms == doctest::Approx(27.5));
  CHECK(r.recovery_time_ms == doctest::Approx(recovery_time(r.messages, r.decisions, r.costs)));

  // Per-scenario decision decomposition: one per absorbed fault, two for the
  // escalated types, one for the jitter-only type.
  std::vector<std::uint64_t> decisions;
  for (const ScenarioMetrics& s : r.scenarios) decisions.push_back(s.decisions);
  CHECK(decisions == std::vector<std::uint64_t>{1, 1, 2, 1, 1, 2, 2, 1, 2});

  // Bin outcomes: absorbed types sort correctly, the escalated type runs off,
  // the jitter types are recovered into the second bin.
  CHECK(r.scenarios[6].outcome == "ranoff");
  CHECK(r.scenarios[7].outcome == "bin2");
  CHECK(r.scenarios[8].outcome == "bin2");
  for (int i : {0, 1, 2, 3, 4, 5}) CHECK(r.scenarios[i].outcome == "bin1");

  CHECK(r.scenarios[6].action == "set-speed:S2");
  CHECK(r.scenarios[7].action == "set-speed:S3");
  CHECK(r.scenarios[8].action == "set-speed:S3");
  CHECK(r.scenarios[7].speed_after == SpeedLevel::S3);

  CHECK(r.bins == std::array<std::uint32_t, 3>{6, 2, 0});
  CHECK(r.ran_off == 1);
  CHECK(r.handover == 0);
}

TEST_CASE("physical accounting adds the folded leaf hops and flags the delta") {
  const SystemConfig cfg = default_config();
  const RunReport r = run_experiment(cfg, canonical_script(), Architecture::Hierarchical,
                                     AccountingMode::Physical);
  CHECK(r.messages == 23);
  CHECK(r.decisions == 13);
  CHECK(r.recovery_time_ms == doctest::Approx(29.5));
  REQUIRE(r.messages_scenario_origin.has_value());
  CHECK(*r.messages_scenario_origin == 21);
  CHECK(*r.accounting_delta == 2);
  const std::string text = r.to_structured();
  CHECK(text.find("messages_scenario_origin 21") != std::string::npos);
  CHECK(text.find("accounting_delta 2") != std::string::npos);
}

TEST_CASE("baseline architectures consume the same fault list") {
  const SystemConfig cfg = default_config();
  const ScenarioScript script = canonical_script();

  const RunReport c = run_experiment(cfg, script, Architecture::Centralized,
                                     AccountingMode::ScenarioOrigin);
  CHECK(c.faults == 12);
  CHECK(c.messages == 48);
  CHECK(c.decisions == 12);
  CHECK(c.recovery_time_ms == doctest::Approx(54.0));

  const RunReport d = run_experiment(cfg, script, Architecture::Decentralized,
                                     AccountingMode::ScenarioOrigin);
  CHECK(d.faults == 12);
  CHECK(d.messages == 108);
  CHECK(d.decisions == 13);
  CHECK(d.recovery_time_ms == doctest::Approx(114.5));
  CHECK(d.decision_model == DecentralizedDecisionModel::MirrorHierarchical);
  // The flat two-decisions-per-fault alternative is reported alongside.
  REQUIRE(d.alt_decisions.has_value());
  CHECK(*d.alt_decisions == 24);
  CHECK(*d.alt_recovery_time_ms == doctest::Approx(120.0));
}

TEST_CASE("comparison yields the expected integer-percent savings") {
  const SystemConfig cfg = default_config();
  const ScenarioScript script = canonical_script();
  const RunReport h = run_experiment(cfg, script, Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  const RunReport c = run_experiment(cfg, script, Architecture::Centralized,
                                     AccountingMode::ScenarioOrigin);
  const RunReport d = run_experiment(cfg, script, Architecture::Decentralized,
                                     AccountingMode::ScenarioOrigin);

  const ComparisonReport cmp = compare({h, c, d});
  REQUIRE(cmp.versus.size() == 2);
  std::map<Architecture, int> savings;
  for (const ComparisonEntry& e : cmp.versus) savings[e.arch] = e.message_saving_pct;
  CHECK(savings[Architecture::Centralized] == 56);
  CHECK(savings[Architecture::Decentralized] == 81);

  // Identical reports compare at zero saving.
  RunReport h2 = h;
  h2.arch = Architecture::Centralized;
  const ComparisonReport self = compare({h, h2});
  CHECK(self.versus.front().message_saving_pct == 0);
}

TEST_CASE("comparison rejects mismatched inputs") {
  const SystemConfig cfg = default_config();
  const ScenarioScript script = canonical_script();
  const RunReport h = run_experiment(cfg, script, Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  RunReport other = run_experiment(cfg, script, Architecture::Centralized,
                                   AccountingMode::ScenarioOrigin);
  other.config_digest = "0000000000000000";
  CHECK_THROWS_AS(compare({h, other}), ComparisonError);
  CHECK_THROWS_AS(compare({other}), ComparisonError);  // no hierarchical reference
}

TEST_CASE("reports serialize deterministically and parse back") {
  const SystemConfig cfg = default_config();
  const ScenarioScript script = canonical_script();
  for (auto arch : {Architecture::Hierarchical, Architecture::Centralized,
                    Architecture::Decentralized}) {
    for (auto mode : {AccountingMode::ScenarioOrigin, AccountingMode::Physical}) {
      const std::string once =
          run_experiment(cfg, script, arch, mode).to_structured();
      const std::string twice =
          run_experiment(cfg, script, arch, mode).to_structured();
      CHECK(once == twice);

      const RunReport parsed = RunReport::parse_structured(once);
      CHECK(parsed.to_structured() == once);
    }
  }
}

TEST_CASE("csv format carries the per-scenario rows and the total") {
  const SystemConfig cfg = default_config();
  const RunReport r = run_experiment(cfg, canonical_script(), Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  const std::string csv = r.to_csv();
  CHECK(csv.find("scope,type,faults,messages,decisions") == 0);
  CHECK(csv.find("total,,12,21,13,27.5") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);  // header + 9 rows + total
}

TEST_CASE("per-scenario metrics are independent of entry order") {
  const SystemConfig cfg = default_config();
  ScenarioScript permuted;
  permuted.name = "permuted";
  for (int type : {6, 5, 4, 3, 2, 1, 3, 2, 1}) {
    ScenarioEntry e;
    e.type = type;
    permuted.entries.push_back(e);
  }
  const RunReport canonical = run_experiment(cfg, canonical_script(),
                                             Architecture::Hierarchical,
                                             AccountingMode::ScenarioOrigin);
  const RunReport shuffled = run_experiment(cfg, permuted, Architecture::Hierarchical,
                                            AccountingMode::ScenarioOrigin);

  auto by_type = [](const RunReport& r) {
    std::map<int, std::vector<std::string>> groups;
    for (const ScenarioMetrics& s : r.scenarios) {
      std::ostringstream os;
      os << s.faults << "/" << s.messages << "/" << s.decisions << "/" << s.action << "/"
         << s.outcome << "/" << speed_name(s.speed_after);
      groups[s.type].push_back(os.str());
    }
    for (auto& [type, rows] : groups) std::sort(rows.begin(), rows.end());
    return groups;
  };
  CHECK(by_type(canonical) == by_type(shuffled));
  CHECK(canonical.messages == shuffled.messages);
  CHECK(canonical.decisions == shuffled.decisions);
}

TEST_CASE("fault-free tokens sort silently into the first bin") {
  const SystemConfig cfg = default_config();
  ScenarioScript script;
  script.name = "fault-free";
  for (int i = 0; i < 5; ++i) script.entries.push_back(raw_entry({}));
  const RunReport r = run_experiment(cfg, script, Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  CHECK(r.faults == 0);
  CHECK(r.messages == 0);
  CHECK(r.decisions == 0);
  CHECK(r.bins == std::array<std::uint32_t, 3>{5, 0, 0});
}

TEST_CASE("an infeasible violation at the slowest speed hands over to system control") {
  nlohmann::json doc = nlohmann::json::parse(default_config_json());
  doc["plant"]["initial_speed"] = "S3";
  const SystemConfig cfg = load_config(doc);
  ScenarioScript script;
  script.name = "handover";
  script.entries.push_back(raw_entry({bs_latency(6500)}));
  const RunReport r = run_experiment(cfg, script, Architecture::Hierarchical,
                                     AccountingMode::ScenarioOrigin);
  CHECK(r.handover == 1);
  REQUIRE(r.scenarios.size() == 1);
  CHECK(r.scenarios[0].action == "hand-over");
  CHECK(r.scenarios[0].outcome == "ranoff");
}

TEST_CASE("experiments refuse to start on an invalid configuration") {
  nlohmann::json doc = nlohmann::json::parse(default_config_json());
  doc["latency_fns"]["f_LM"]["S1"] = 350;  // breaks the refinement chain
  const SystemConfig cfg = load_config(doc);
  CHECK_THROWS_AS(run_experiment(cfg, canonical_script(), Architecture::Hierarchical,
                                 AccountingMode::ScenarioOrigin),
                  ConfigError);

  nlohmann::json bad_plant = nlohmann::json::parse(default_config_json());
  bad_plant["plant"]["cp_pos"] = 30;  // behind the second light sensor
  const SystemConfig cfg2 = load_config(bad_plant);
  CHECK_THROWS_WITH_AS(run_experiment(cfg2, canonical_script(), Architecture::Hierarchical,
                                      AccountingMode::ScenarioOrigin),
                       doctest::Contains("cp_pos"), ConfigError);
}

TEST_CASE("a dumped trace replays through the batch oracle") {
  const SystemConfig cfg = default_config();
  const std::string text = trace_experiment(cfg, canonical_script());
  const TraceData data = parse_trace(text);
  CHECK(data.config_digest == cfg.digest);
  CHECK(data.params.initial == SpeedLevel::S1);

  std::map<std::string, int> violations;
  for (const std::string& name : {std::string("C_CP"), std::string("C_BS"),
                                  std::string("C_EC")}) {
    for (const ObserverOutcome& o :
         offline_check(cfg.registry.get(name), data.inputs, data.params)) {
      if (o.verdict == Verdict::Violated) violations[name]++;
    }
  }
  // The twelve injected faults reappear under replay.
  CHECK(violations["C_CP"] == 4);  // type 1 twice, type 3 twice
  CHECK(violations["C_BS"] == 6);  // types 2/3 twice, types 4/6 once
  CHECK(violations["C_EC"] == 2);  // types 5/6
}

TEST_CASE("messages are fault reports upward and parameter updates downward, never sideways") {
  const SystemConfig cfg = default_config();
  const std::string trace = trace_experiment(cfg, canonical_script());
  const std::map<std::string, std::string> parent = {
      {"CP", "LM"}, {"BS", "LM"}, {"LM", "MC"}, {"EC", "MC"}};

  std::istringstream in(trace);
  std::string line;
  int reports = 0, updates = 0;
  while (std::getline(in, line)) {
    if (line.rfind("msg ", 0) != 0) continue;
    std::istringstream ls(line);
    std::string tag, from, to, kind;
    TimeMs t;
    ls >> tag >> t >> from >> to >> kind;
    if (kind == "fault-report") {
      reports++;
      REQUIRE(parent.count(from));
      CHECK(parent.at(from) == to);  // child to parent only
    } else {
      REQUIRE(kind == "param-update");
      updates++;
      CHECK(from == "MC");  // issued by the root
      CHECK((to == "LM" || to == "CP" || to == "BS"));
    }
  }
  CHECK(reports == 14);  // 12 leaf reports + 2 escalations, physical trace
  CHECK(updates == 9);   // three degradations, three managers each
}

TEST_CASE("trace dump is deterministic and carries all three record families") {
  const SystemConfig cfg = default_config();
  const ScenarioScript script = canonical_script();
  const std::string once = trace_experiment(cfg, script);
  CHECK(once == trace_experiment(cfg, script));
  CHECK(once.rfind("sortline-trace 1\n", 0) == 0);
  CHECK(once.find("\nevent ") != std::string::npos);
  CHECK(once.find("\nmsg ") != std::string::npos);
  CHECK(once.find("\ndecision ") != std::string::npos);
  CHECK(once.find("physical-only") != std::string::npos);  // the folded leaf hops
}
