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

#include "sortline/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sortline {

std::string_view architecture_name(Architecture a) {
  switch (a) {
    case Architecture::Hierarchical: return "hierarchical";
    case Architecture::Centralized: return "centralized";
    case Architecture::Decentralized: return "decentralized";
  }
  return "?";
}

std::optional<Architecture> architecture_from_name(std::string_view name) {
  for (Architecture a : {Architecture::Hierarchical, Architecture::Centralized,
                         Architecture::Decentralized}) {
    if (architecture_name(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view accounting_name(AccountingMode m) {
  return m == AccountingMode::ScenarioOrigin ? "scenario-origin" : "physical";
}

std::optional<AccountingMode> accounting_from_name(std::string_view name) {
  if (name == "scenario-origin") return AccountingMode::ScenarioOrigin;
  if (name == "physical") return AccountingMode::Physical;
  return std::nullopt;
}

double recovery_time(std::uint64_t messages, std::uint64_t decisions, const CostModel& costs) {
  return static_cast<double>(messages) * costs.message_ms +
         static_cast<double>(decisions) * costs.decision_ms;
}

// ---------------------------------------------------------------------------
// Core execution
// ---------------------------------------------------------------------------

namespace {

struct EntryResult {
  int index = 0;
  int type = 0;
  TokenId token = 0;
  std::uint64_t faults = 0;
  std::uint64_t messages_origin = 0;
  std::uint64_t messages_physical = 0;
  std::uint64_t decisions = 0;
  std::string action = "none";
  BinOutcome outcome;
  SpeedLevel speed_after = SpeedLevel::S1;
  TimeMs start_t = 0;
  TimeMs end_t = 0;
};

struct CoreResult {
  std::vector<Fault> faults;
  std::vector<MessageRecord> messages;
  std::vector<Decision> decisions;
  std::vector<EntryResult> entries;
  std::vector<PlantRecord> plant_log;
  std::array<std::uint32_t, 3> bins{0, 0, 0};
  std::uint32_t ran_off = 0;
  std::uint32_t handover = 0;
};

// One full pass of the plant under the observer/manager pipeline. The belt
// speed is reset to the configured initial value between entries, outside the
// measured protocol.
CoreResult run_hierarchical_core(const SystemConfig& config, const ScenarioScript& script) {
  CoreResult core;

  Plant plant(config.plant);

  // Leaf observers, keyed by the owning manager id.
  std::map<std::string, Observer> observers;
  std::map<std::string, std::string> leaf_by_contract;
  for (const auto& leaf : config.rm.latency_leaves) {
    observers.emplace(leaf.id, compile_observer(config.registry.get(leaf.contract),
                                                config.plant.initial_speed));
    leaf_by_contract[leaf.contract] = leaf.id;
  }
  observers.emplace(config.rm.jitter_leaf.id,
                    compile_observer(config.registry.get(config.rm.jitter_leaf.contract),
                                     config.plant.initial_speed));
  leaf_by_contract[config.rm.jitter_leaf.contract] = config.rm.jitter_leaf.id;

  RmHooks hooks;
  hooks.set_speed = [&plant](SpeedLevel s, TimeMs) { plant.set_speed(s); };
  hooks.schedule_recovery = [&plant](TokenId token, TimeMs) {
    plant.schedule_recovery_ejection(token);
  };
  hooks.param_delivered = [&observers](const std::string& rm_id, SpeedLevel s, TimeMs) {
    if (auto it = observers.find(rm_id); it != observers.end()) it->second.set_speed(s);
  };

  RmHierarchy hierarchy(config.rm, config.registry, config.plant.initial_speed,
                        std::move(hooks));

  const std::string jitter_contract = config.rm.jitter_leaf.contract;

  auto route_outcomes = [&](const std::vector<ObserverOutcome>& outcomes,
                            std::uint64_t& fault_count) {
    for (const ObserverOutcome& outcome : outcomes) {
      if (outcome.verdict == Verdict::Violated) {
        fault_count++;
        Fault fault;
        fault.t = outcome.t;
        fault.contract = outcome.contract;
        fault.token = outcome.token.value_or(0);
        fault.fault_class =
            outcome.contract == jitter_contract ? FaultClass::Jitter : FaultClass::Latency;
        core.faults.push_back(std::move(fault));
      }
      hierarchy.on_outcome(outcome);
    }
  };

  for (std::size_t i = 0; i < script.entries.size(); ++i) {
    const ScenarioEntry& entry = script.entries[i];
    EntryResult result;
    result.index = static_cast<int>(i) + 1;
    result.type = entry.type;

    const TokenId token = plant.next_token_id();
    result.token = token;
    for (const Injection& inj : expand_entry(entry, token)) plant.inject(inj);

    // Place at a step boundary so travel times align with the step grid.
    const TimeMs t0 = plant.next_step_time();
    plant.place_token(entry.colour, t0);
    result.start_t = t0;

    const std::size_t msg_mark = hierarchy.message_log().size();
    const std::size_t dec_mark = hierarchy.decision_log().size();

    std::uint64_t guard = 0;
    while (!(plant.bin_outcome(token).kind != BinOutcome::Kind::Pending && plant.quiescent())) {
      if (++guard > 1000000) throw Error("simulation failed to quiesce");
      const std::vector<ObserverInput> inputs = plant.advance(plant.next_activity_time());
      for (const ObserverInput& input : inputs) {
        std::vector<ObserverOutcome> outcomes;
        for (auto& [id, obs] : observers) {
          std::vector<ObserverOutcome> part = obs.observe(input);
          outcomes.insert(outcomes.end(), part.begin(), part.end());
        }
        route_outcomes(outcomes, result.faults);
        if (const auto* departure = std::get_if<TokenDeparture>(&input)) {
          hierarchy.on_token_terminal(departure->token, plant.bin_outcome(departure->token),
                                      plant.correct_bin(departure->token), departure->t);
        }
      }
    }

    result.end_t = plant.clock();
    result.outcome = plant.bin_outcome(token);
    result.speed_after = hierarchy.current_speed();

    for (std::size_t m = msg_mark; m < hierarchy.message_log().size(); ++m) {
      result.messages_physical++;
      if (hierarchy.message_log()[m].counted_scenario_origin) result.messages_origin++;
    }
    std::string root_action, l1_action;
    for (std::size_t d = dec_mark; d < hierarchy.decision_log().size(); ++d) {
      const Decision& decision = hierarchy.decision_log()[d];
      result.decisions++;
      if (decision.action == RmAction::HandOverToSystemControl) core.handover++;
      if (decision.maker == config.rm.root_id) {
        root_action = action_name(decision.action, decision.speed);
      } else {
        l1_action = action_name(decision.action, decision.speed);
      }
    }
    result.action = !root_action.empty() ? root_action
                    : !l1_action.empty() ? l1_action
                                         : "none";

    core.entries.push_back(std::move(result));

    // Reset to the configured speed before the next token; not counted.
    hierarchy.reset_speed(config.plant.initial_speed);
    plant.set_speed(config.plant.initial_speed);
    for (auto& [id, obs] : observers) obs.set_speed(config.plant.initial_speed);
  }

  // Flush any still-armed observer state at the end of the run.
  {
    const TraceEnd end{plant.clock()};
    std::uint64_t trailing_faults = 0;
    std::vector<ObserverOutcome> outcomes;
    for (auto& [id, obs] : observers) {
      std::vector<ObserverOutcome> part = obs.observe(ObserverInput{end});
      outcomes.insert(outcomes.end(), part.begin(), part.end());
    }
    route_outcomes(outcomes, trailing_faults);
    if (trailing_faults > 0 && !core.entries.empty()) {
      core.entries.back().faults += trailing_faults;
    }
  }

  core.messages = hierarchy.message_log();
  core.decisions = hierarchy.decision_log();
  core.plant_log = plant.log();
  core.bins = plant.bin_tally();
  core.ran_off = plant.ran_off_count();
  return core;
}

std::string format_ms(double v) {
  const double tenths = v * 10.0;
  if (std::abs(tenths - std::llround(tenths)) < 1e-9) {
    const long long scaled = std::llround(tenths);
    std::ostringstream os;
    os << scaled / 10 << "." << std::abs(scaled % 10);
    return os.str();
  }
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

RunReport run_experiment(const SystemConfig& config, const ScenarioScript& script,
                         Architecture arch, AccountingMode accounting) {
  const ConfigValidation validation = validate_config(config);
  if (!validation.ok) {
    std::string why = !validation.plant_errors.empty()
                          ? validation.plant_errors.front()
                          : "contract hierarchy validation failed";
    throw ConfigError("experiment startup: " + why);
  }

  const CoreResult core = run_hierarchical_core(config, script);

  RunReport report;
  report.arch = arch;
  report.accounting = accounting;
  report.script_name = script.name;
  report.script_digest = script.digest();
  report.config_digest = config.digest;
  report.costs = config.costs;
  report.faults = core.faults.size();
  report.bins = core.bins;
  report.ran_off = core.ran_off;
  report.handover = core.handover;

  const auto count_messages = [&core](bool physical) {
    std::uint64_t n = 0;
    for (const MessageRecord& m : core.messages) {
      if (physical || m.counted_scenario_origin) n++;
    }
    return n;
  };
  const std::uint64_t origin_messages = count_messages(false);
  const std::uint64_t physical_messages = count_messages(true);
  const std::uint64_t hier_decisions = core.decisions.size();

  const bool physical = accounting == AccountingMode::Physical;

  switch (arch) {
    case Architecture::Hierarchical: {
      report.messages = physical ? physical_messages : origin_messages;
      report.decisions = hier_decisions;
      if (physical) {
        report.messages_scenario_origin = origin_messages;
        report.accounting_delta = physical_messages - origin_messages;
      }
      for (const EntryResult& e : core.entries) {
        ScenarioMetrics s;
        s.index = e.index;
        s.type = e.type;
        s.faults = e.faults;
        s.messages = physical ? e.messages_physical : e.messages_origin;
        s.decisions = e.decisions;
        s.action = e.action;
        s.outcome = e.outcome.to_string();
        s.speed_after = e.speed_after;
        report.scenarios.push_back(std::move(s));
      }
      break;
    }
    case Architecture::Centralized: {
      const BaselineMetrics m = run_centralized(core.faults);
      report.messages = m.messages;
      report.decisions = m.decisions;
      for (const EntryResult& e : core.entries) {
        ScenarioMetrics s;
        s.index = e.index;
        s.type = e.type;
        s.faults = e.faults;
        s.messages = 4 * e.faults;
        s.decisions = e.faults;
        s.action = "-";
        s.outcome = e.outcome.to_string();
        s.speed_after = config.plant.initial_speed;
        report.scenarios.push_back(std::move(s));
      }
      break;
    }
    case Architecture::Decentralized: {
      const DecentralizedDecisionModel model = config.decentralized_model;
      const BaselineMetrics m = run_decentralized(core.faults, model, hier_decisions);
      report.decision_model = model;
      report.messages = m.messages;
      report.decisions = m.decisions;
      const DecentralizedDecisionModel alt =
          model == DecentralizedDecisionModel::MirrorHierarchical
              ? DecentralizedDecisionModel::TwoPerFault
              : DecentralizedDecisionModel::MirrorHierarchical;
      const BaselineMetrics alt_m = run_decentralized(core.faults, alt, hier_decisions);
      report.alt_decisions = alt_m.decisions;
      report.alt_recovery_time_ms =
          recovery_time(alt_m.messages, alt_m.decisions, config.costs);
      for (const EntryResult& e : core.entries) {
        ScenarioMetrics s;
        s.index = e.index;
        s.type = e.type;
        s.faults = e.faults;
        s.messages = 9 * e.faults;
        s.decisions = model == DecentralizedDecisionModel::TwoPerFault ? 2 * e.faults
                                                                       : e.decisions;
        s.action = "-";
        s.outcome = e.outcome.to_string();
        s.speed_after = config.plant.initial_speed;
        report.scenarios.push_back(std::move(s));
      }
      break;
    }
  }

  report.recovery_time_ms = recovery_time(report.messages, report.decisions, config.costs);
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

std::string RunReport::to_structured() const {
  std::ostringstream os;
  os << "sortline-report 1\n";
  os << "arch " << architecture_name(arch) << "\n";
  os << "accounting " << accounting_name(accounting) << "\n";
  os << "decision_model " << (decision_model ? decision_model_name(*decision_model) : "-")
     << "\n";
  os << "script " << script_name << "\n";
  os << "script_digest " << script_digest << "\n";
  os << "config_digest " << config_digest << "\n";
  os << "message_cost_ms " << format_ms(costs.message_ms) << "\n";
  os << "decision_cost_ms " << format_ms(costs.decision_ms) << "\n";
  os << "faults " << faults << "\n";
  os << "messages " << messages << "\n";
  os << "decisions " << decisions << "\n";
  os << "recovery_time_ms " << format_ms(recovery_time_ms) << "\n";
  if (messages_scenario_origin) {
    os << "messages_scenario_origin " << *messages_scenario_origin << "\n";
    os << "accounting_delta " << *accounting_delta << "\n";
  }
  if (alt_decisions) {
    const DecentralizedDecisionModel alt =
        decision_model == DecentralizedDecisionModel::MirrorHierarchical
            ? DecentralizedDecisionModel::TwoPerFault
            : DecentralizedDecisionModel::MirrorHierarchical;
    os << "alt_decision_model " << decision_model_name(alt) << "\n";
    os << "alt_decisions " << *alt_decisions << "\n";
    os << "alt_recovery_time_ms " << format_ms(*alt_recovery_time_ms) << "\n";
  }
  for (const ScenarioMetrics& s : scenarios) {
    os << "scenario " << s.index << " type " << s.type << " faults " << s.faults << " messages "
       << s.messages << " decisions " << s.decisions << " action " << s.action << " outcome "
       << s.outcome << " speed_after " << speed_name(s.speed_after) << "\n";
  }
  os << "bin1 " << bins[0] << "\n";
  os << "bin2 " << bins[1] << "\n";
  os << "bin3 " << bins[2] << "\n";
  os << "ranoff " << ran_off << "\n";
  os << "handover " << handover << "\n";
  os << "end\n";
  return os.str();
}

std::string RunReport::to_csv() const {
  std::ostringstream os;
  os << "scope,type,faults,messages,decisions,recovery_time_ms,action,outcome,speed_after\n";
  for (const ScenarioMetrics& s : scenarios) {
    os << s.index << "," << s.type << "," << s.faults << "," << s.messages << "," << s.decisions
       << "," << format_ms(recovery_time(s.messages, s.decisions, costs)) << "," << s.action
       << "," << s.outcome << "," << speed_name(s.speed_after) << "\n";
  }
  os << "total,," << faults << "," << messages << "," << decisions << ","
     << format_ms(recovery_time_ms) << ",,,\n";
  return os.str();
}

RunReport RunReport::parse_structured(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "sortline-report 1") {
    throw InputError("not a sortline report (bad header)");
  }
  RunReport report;
  while (std::getline(in, line)) {
    if (line == "end") return report;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "arch") {
      std::string v;
      ls >> v;
      auto a = architecture_from_name(v);
      if (!a) throw InputError("report: unknown arch " + v);
      report.arch = *a;
    } else if (key == "accounting") {
      std::string v;
      ls >> v;
      auto m = accounting_from_name(v);
      if (!m) throw InputError("report: unknown accounting " + v);
      report.accounting = *m;
    } else if (key == "decision_model") {
      std::string v;
      ls >> v;
      if (v != "-") {
        auto m = decision_model_from_name(v);
        if (!m) throw InputError("report: unknown decision model " + v);
        report.decision_model = m;
      }
    } else if (key == "script") {
      ls >> report.script_name;
    } else if (key == "script_digest") {
      ls >> report.script_digest;
    } else if (key == "config_digest") {
      ls >> report.config_digest;
    } else if (key == "message_cost_ms") {
      ls >> report.costs.message_ms;
    } else if (key == "decision_cost_ms") {
      ls >> report.costs.decision_ms;
    } else if (key == "faults") {
      ls >> report.faults;
    } else if (key == "messages") {
      ls >> report.messages;
    } else if (key == "decisions") {
      ls >> report.decisions;
    } else if (key == "recovery_time_ms") {
      ls >> report.recovery_time_ms;
    } else if (key == "messages_scenario_origin") {
      std::uint64_t v;
      ls >> v;
      report.messages_scenario_origin = v;
    } else if (key == "accounting_delta") {
      std::uint64_t v;
      ls >> v;
      report.accounting_delta = v;
    } else if (key == "alt_decisions") {
      std::uint64_t v;
      ls >> v;
      report.alt_decisions = v;
    } else if (key == "alt_recovery_time_ms") {
      double v;
      ls >> v;
      report.alt_recovery_time_ms = v;
    } else if (key == "scenario") {
      ScenarioMetrics s;
      std::string tag, action, outcome, speed;
      ls >> s.index >> tag >> s.type >> tag >> s.faults >> tag >> s.messages >> tag >>
          s.decisions >> tag >> action >> tag >> outcome >> tag >> speed;
      s.action = action;
      s.outcome = outcome;
      if (auto sp = speed_from_name(speed)) s.speed_after = *sp;
      report.scenarios.push_back(std::move(s));
    } else if (key == "bin1") {
      ls >> report.bins[0];
    } else if (key == "bin2") {
      ls >> report.bins[1];
    } else if (key == "bin3") {
      ls >> report.bins[2];
    } else if (key == "ranoff") {
      ls >> report.ran_off;
    } else if (key == "handover") {
      ls >> report.handover;
    }
    // Unknown keys (alt_decision_model and future fields) are skipped.
  }
  throw InputError("report: missing end marker");
}

// ---------------------------------------------------------------------------
// Trace dump
// ---------------------------------------------------------------------------

std::string trace_experiment(const SystemConfig& config, const ScenarioScript& script) {
  const ConfigValidation validation = validate_config(config);
  if (!validation.ok) throw ConfigError("trace startup: configuration is invalid");

  const CoreResult core = run_hierarchical_core(config, script);

  struct Line {
    TimeMs t;
    int priority;
    std::size_t index;
    std::string text;
  };
  std::vector<Line> lines;

  std::size_t idx = 0;
  for (const PlantRecord& rec : core.plant_log) {
    std::ostringstream os;
    TimeMs t = 0;
    if (const auto* e = std::get_if<Event>(&rec)) {
      t = e->t;
      os << "event " << e->t << " " << e->seq << " " << wire_name(e->signal) << " "
         << value_to_string(e->value) << " ";
      if (e->token) {
        os << *e->token;
      } else {
        os << "-";
      }
    } else if (const auto* d = std::get_if<DepartureRecord>(&rec)) {
      t = d->t;
      os << "depart " << d->t << " " << d->token << " " << d->outcome.to_string();
    } else {
      const auto& s = std::get<SpeedChange>(rec);
      t = s.t;
      os << "speed " << s.t << " " << speed_name(s.speed);
    }
    lines.push_back({t, 0, idx++, os.str()});
  }
  for (const MessageRecord& m : core.messages) {
    std::ostringstream os;
    os << "msg " << m.t << " " << m.from << " " << m.to << " ";
    if (m.kind == MessageKind::FaultReport) {
      os << "fault-report " << m.report.contract << " " << fault_class_name(m.report.fault_class)
         << " ";
      if (m.report.observed_latency) {
        os << *m.report.observed_latency;
      } else {
        os << "-";
      }
      os << " ";
      if (m.report.violation_amount) {
        os << *m.report.violation_amount;
      } else {
        os << "-";
      }
      os << " " << m.report.token;
    } else {
      os << "param-update M_S " << speed_name(m.update.value) << " - - -";
    }
    os << " " << (m.counted_scenario_origin ? "origin" : "physical-only");
    lines.push_back({m.t, 1, idx++, os.str()});
  }
  for (const Decision& d : core.decisions) {
    std::ostringstream os;
    os << "decision " << d.t << " " << d.maker << " " << action_name(d.action, d.speed) << " "
       << d.token;
    lines.push_back({d.t, 2, idx++, os.str()});
  }

  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.index < b.index;
  });

  std::ostringstream os;
  os << "sortline-trace 1\n";
  os << "config_digest " << config.digest << "\n";
  os << "script_digest " << script.digest() << "\n";
  os << "initial_speed " << speed_name(config.plant.initial_speed) << "\n";
  for (const EntryResult& e : core.entries) {
    os << "entry " << e.index << " type " << e.type << " token " << e.token << " start "
       << e.start_t << " end " << e.end_t << "\n";
  }
  for (const Line& line : lines) os << line.text << "\n";
  os << "end\n";
  return os.str();
}

TraceData parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "sortline-trace 1") {
    throw InputError("not a sortline trace (bad header)");
  }

  TraceData data;
  TimeMs last_t = 0;

  auto parse_value = [](Signal signal, const std::string& raw) -> Value {
    switch (kind_of(signal)) {
      case SignalKind::Edge: return raw == "true";
      case SignalKind::Step: return static_cast<std::int64_t>(std::stoll(raw));
      case SignalKind::ColourValue:
        if (raw == "null") return std::monostate{};
        return raw == "W" ? Colour::White : Colour::NonWhite;
      case SignalKind::EjectorValue:
        if (raw == "null") return std::monostate{};
        return static_cast<Ejector>(raw.at(1) - '1');
    }
    return std::monostate{};
  };

  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "config_digest") {
      ls >> data.config_digest;
    } else if (key == "script_digest") {
      ls >> data.script_digest;
    } else if (key == "initial_speed") {
      std::string name;
      ls >> name;
      auto s = speed_from_name(name);
      if (!s) throw InputError("trace: bad initial speed " + name);
      data.params.initial = *s;
    } else if (key == "event") {
      Event e;
      std::string sig, value, token;
      ls >> e.t >> e.seq >> sig >> value >> token;
      auto signal = signal_from_wire(sig);
      if (!signal) throw InputError("trace: unknown signal " + sig);
      e.signal = *signal;
      e.value = parse_value(*signal, value);
      if (token != "-") e.token = static_cast<TokenId>(std::stoul(token));
      last_t = std::max(last_t, e.t);
      data.inputs.emplace_back(std::move(e));
    } else if (key == "depart") {
      TokenDeparture d;
      ls >> d.t >> d.token;
      last_t = std::max(last_t, d.t);
      data.inputs.emplace_back(d);
    } else if (key == "speed") {
      TimeMs t;
      std::string name;
      ls >> t >> name;
      auto s = speed_from_name(name);
      if (!s) throw InputError("trace: bad speed " + name);
      data.params.changes.emplace_back(t, *s);
      last_t = std::max(last_t, t);
    }
    // Message, decision and entry records are not replay inputs.
  }
  data.inputs.emplace_back(TraceEnd{last_t});
  return data;
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

std::string ComparisonReport::to_string() const {
  std::ostringstream os;
  os << "sortline-compare 1\n";
  os << "config_digest " << config_digest << "\n";
  os << "script_digest " << script_digest << "\n";
  os << "reference hierarchical messages " << reference_messages << " decisions "
     << reference_decisions << " recovery_time_ms " << format_ms(reference_recovery_ms) << "\n";
  for (const ComparisonEntry& e : versus) {
    os << "versus " << architecture_name(e.arch) << " messages " << e.messages
       << " recovery_time_ms " << format_ms(e.recovery_time_ms) << " message_saving_pct "
       << e.message_saving_pct << " time_saving_pct " << e.time_saving_pct << "\n";
  }
  os << "end\n";
  return os.str();
}

ComparisonReport compare(const std::vector<RunReport>& reports) {
  const RunReport* reference = nullptr;
  for (const RunReport& r : reports) {
    if (r.arch == Architecture::Hierarchical) {
      if (reference) throw ComparisonError("multiple hierarchical reports supplied");
      reference = &r;
    }
  }
  if (!reference) throw ComparisonError("no hierarchical report supplied");

  ComparisonReport out;
  out.config_digest = reference->config_digest;
  out.script_digest = reference->script_digest;
  out.reference_messages = reference->messages;
  out.reference_decisions = reference->decisions;
  out.reference_recovery_ms = reference->recovery_time_ms;

  for (const RunReport& r : reports) {
    if (&r == reference) continue;
    if (r.config_digest != reference->config_digest ||
        r.script_digest != reference->script_digest) {
      throw ComparisonError("reports were produced from different configs or scripts");
    }
    ComparisonEntry e;
    e.arch = r.arch;
    e.messages = r.messages;
    e.recovery_time_ms = r.recovery_time_ms;
    if (r.messages > 0) {
      e.message_saving_pct = static_cast<int>(std::lround(
          (1.0 - static_cast<double>(reference->messages) / static_cast<double>(r.messages)) *
          100.0));
    }
    if (r.recovery_time_ms > 0) {
      e.time_saving_pct = static_cast<int>(
          std::lround((1.0 - reference->recovery_time_ms / r.recovery_time_ms) * 100.0));
    }
    out.versus.push_back(e);
  }
  return out;
}

}  // namespace sortline
