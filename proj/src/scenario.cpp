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

#include "sortline/scenario.hpp"

#include <fstream>

#include "sortline/config.hpp"

namespace sortline {

using nlohmann::json;

namespace {

constexpr DurationMs kMildLatencyMs = 250;    // violates the component bound, within slack
constexpr DurationMs kSevereLatencyMs = 1550; // exceeds the budget and misses the ejector
constexpr std::int64_t kCanonicalSlip = 3;

Injection latency(TokenId token, CyberComponent component, DurationMs absolute) {
  Injection inj;
  inj.token = token;
  inj.kind = LatencyInflation{component, absolute, 0};
  return inj;
}

Injection slip(TokenId token, std::int64_t steps) {
  Injection inj;
  inj.token = token;
  inj.kind = SlipInjection{steps};
  return inj;
}

}  // namespace

std::string ScenarioEntry::label() const {
  return type > 0 ? "type " + std::to_string(type) : "raw";
}

std::vector<Injection> expand_entry(const ScenarioEntry& entry, TokenId token) {
  switch (entry.type) {
    case 0: {
      std::vector<Injection> out = entry.raw;
      for (Injection& inj : out) inj.token = token;
      return out;
    }
    case 1: return {latency(token, CyberComponent::CP, kMildLatencyMs)};
    case 2: return {latency(token, CyberComponent::BS, kMildLatencyMs)};
    case 3:
      return {latency(token, CyberComponent::CP, kMildLatencyMs),
              latency(token, CyberComponent::BS, kMildLatencyMs)};
    case 4: return {latency(token, CyberComponent::BS, kSevereLatencyMs)};
    case 5: return {slip(token, kCanonicalSlip)};
    case 6:
      return {latency(token, CyberComponent::BS, kSevereLatencyMs),
              slip(token, kCanonicalSlip)};
    default:
      throw InputError("unknown scenario type " + std::to_string(entry.type));
  }
}

ScenarioScript canonical_script() {
  ScenarioScript script;
  script.name = "canonical";
  for (int type : {1, 2, 3, 1, 2, 3, 4, 5, 6}) {
    ScenarioEntry entry;
    entry.type = type;
    entry.colour = Colour::White;
    script.entries.push_back(std::move(entry));
  }
  return script;
}

json ScenarioScript::to_json() const {
  json doc;
  doc["name"] = name;
  doc["entries"] = json::array();
  for (const ScenarioEntry& entry : entries) {
    json e;
    e["colour"] = std::string(colour_name(entry.colour));
    if (entry.type > 0) {
      e["type"] = entry.type;
    } else {
      json injections = json::array();
      for (const Injection& inj : entry.raw) {
        json record;
        if (const auto* lat = std::get_if<LatencyInflation>(&inj.kind)) {
          record["kind"] = "latency";
          record["component"] = std::string(component_name(lat->component));
          if (lat->absolute) record["absolute_ms"] = *lat->absolute;
          if (lat->extra != 0) record["extra_ms"] = lat->extra;
        } else {
          record["kind"] = "slip";
          record["steps"] = std::get<SlipInjection>(inj.kind).steps;
        }
        injections.push_back(std::move(record));
      }
      e["injections"] = std::move(injections);
    }
    doc["entries"].push_back(std::move(e));
  }
  return doc;
}

std::string ScenarioScript::digest() const { return fnv1a_digest(to_json().dump()); }

ScenarioScript ScenarioScript::from_json(const json& doc) {
  ScenarioScript script;
  script.name = doc.value("name", std::string("custom"));
  if (!doc.contains("entries") || !doc.at("entries").is_array()) {
    throw ConfigError("scenario: missing entries array");
  }
  for (const json& e : doc.at("entries")) {
    ScenarioEntry entry;
    const std::string colour = e.value("colour", std::string("W"));
    if (colour == "W") {
      entry.colour = Colour::White;
    } else if (colour == "N") {
      entry.colour = Colour::NonWhite;
    } else {
      throw ConfigError("scenario: unknown colour " + colour);
    }
    if (e.contains("type")) {
      entry.type = e.at("type").get<int>();
      if (entry.type < 1 || entry.type > 6) {
        throw ConfigError("scenario: type must be 1..6");
      }
    } else if (e.contains("injections")) {
      for (const json& record : e.at("injections")) {
        Injection inj;
        const std::string kind = record.value("kind", std::string{});
        if (kind == "latency") {
          LatencyInflation lat;
          const std::string comp = record.value("component", std::string{});
          if (comp == "CP") {
            lat.component = CyberComponent::CP;
          } else if (comp == "BS") {
            lat.component = CyberComponent::BS;
          } else {
            throw ConfigError("scenario: latency injection needs component CP or BS");
          }
          if (record.contains("absolute_ms")) {
            lat.absolute = record.at("absolute_ms").get<DurationMs>();
          }
          lat.extra = record.value("extra_ms", DurationMs{0});
          inj.kind = lat;
        } else if (kind == "slip") {
          inj.kind = SlipInjection{record.value("steps", std::int64_t{0})};
        } else {
          throw ConfigError("scenario: injection kind must be latency or slip");
        }
        entry.raw.push_back(std::move(inj));
      }
    } else {
      throw ConfigError("scenario: entry needs either a type or an injections list");
    }
    script.entries.push_back(std::move(entry));
  }
  return script;
}

ScenarioScript ScenarioScript::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("scenario file " + path + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

}  // namespace sortline
