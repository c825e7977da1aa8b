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

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sortline/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

sortline::SystemConfig load(const std::string& config_path) {
  if (config_path.empty()) return sortline::default_config();
  return sortline::load_config_file(config_path);
}

sortline::ScenarioScript load_script(const std::string& scenario) {
  if (scenario.empty() || scenario == "canonical") return sortline::canonical_script();
  return sortline::ScenarioScript::load_file(scenario);
}

void write_out(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw sortline::Error("cannot write output file: " + out_path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sortline::Error("cannot read report file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contract-based hierarchical resilience management for a sorting line"};
  app.require_subcommand(1);

  std::string config_path, scenario = "canonical", out_path, format = "structured";
  std::string arch_name = "hierarchical", accounting_name = "scenario-origin";
  std::vector<std::string> report_paths;

  CLI::App* run = app.add_subcommand("run", "Execute a scenario script and emit a run report");
  run->add_option("--config", config_path, "Configuration file (defaults to built-in)");
  run->add_option("--scenario", scenario, "'canonical' or a scenario JSON file");
  run->add_option("--arch", arch_name, "hierarchical|centralized|decentralized")
      ->check(CLI::IsMember({"hierarchical", "centralized", "decentralized"}));
  run->add_option("--accounting", accounting_name, "scenario-origin|physical")
      ->check(CLI::IsMember({"scenario-origin", "physical"}));
  run->add_option("--out", out_path, "Output file (default: stdout)");
  run->add_option("--format", format, "structured|csv")
      ->check(CLI::IsMember({"structured", "csv"}));

  CLI::App* validate =
      app.add_subcommand("validate", "Check the contract hierarchy and plant configuration");
  validate->add_option("--config", config_path, "Configuration file (defaults to built-in)");

  CLI::App* cmp = app.add_subcommand("compare", "Compare run reports against the hierarchical one");
  cmp->add_option("reports", report_paths, "Structured report files")->required();
  cmp->add_option("--out", out_path, "Output file (default: stdout)");

  CLI::App* trace = app.add_subcommand("trace", "Dump the event and message logs of a run");
  trace->add_option("--config", config_path, "Configuration file (defaults to built-in)");
  trace->add_option("--scenario", scenario, "'canonical' or a scenario JSON file");
  trace->add_option("--out", out_path, "Output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto config = load(config_path);
      const auto script = load_script(scenario);
      const auto arch = sortline::architecture_from_name(arch_name);
      const auto accounting = sortline::accounting_from_name(accounting_name);
      const auto report = sortline::run_experiment(config, script, *arch, *accounting);
      write_out(out_path, format == "csv" ? report.to_csv() : report.to_structured());
      return kExitOk;
    }
    if (validate->parsed()) {
      const auto config = load(config_path);
      const auto result = sortline::validate_config(config);
      std::cout << result.to_string();
      return result.ok ? kExitOk : kExitValidation;
    }
    if (cmp->parsed()) {
      std::vector<sortline::RunReport> reports;
      for (const std::string& path : report_paths) {
        reports.push_back(sortline::RunReport::parse_structured(slurp(path)));
      }
      write_out(out_path, sortline::compare(reports).to_string());
      return kExitOk;
    }
    if (trace->parsed()) {
      const auto config = load(config_path);
      const auto script = load_script(scenario);
      write_out(out_path, sortline::trace_experiment(config, script));
      return kExitOk;
    }
  } catch (const sortline::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
