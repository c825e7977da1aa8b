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

#include "sortline/config.hpp"
#include "sortline/observer.hpp"
#include "trace_gen.hpp"

using namespace sortline;

namespace {

Event ev(TimeMs t, std::uint64_t seq, Signal sig, Value v, std::optional<TokenId> token) {
  Event e;
  e.t = t;
  e.seq = seq;
  e.signal = sig;
  e.value = std::move(v);
  e.token = token;
  return e;
}

// The colour-processor trace shape: entry trigger, then step/colour outputs
// after `latency`.
std::vector<ObserverInput> cp_trace(TimeMs latency) {
  return {
      ev(0, 0, Signal::Ls1, true, 1),
      ev(latency, 1, Signal::CpStep, std::int64_t{5}, 1),
      ev(latency, 2, Signal::CpColour, Colour::White, 1),
  };
}

std::vector<ObserverOutcome> feed_all(Observer& obs, const std::vector<ObserverInput>& inputs) {
  std::vector<ObserverOutcome> all;
  for (const ObserverInput& input : inputs) {
    auto part = obs.observe(input);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace

TEST_CASE("colour-processor outputs inside the bound satisfy with the actual latency") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  auto outcomes = feed_all(obs, cp_trace(150));
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].verdict == Verdict::Satisfied);
  CHECK(outcomes[0].observed_latency == 150);
  CHECK(outcomes[0].t == 150);
  CHECK(outcomes[0].token == 1);
}

TEST_CASE("late outputs violate with the true latency and its excess") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  auto outcomes = feed_all(obs, cp_trace(250));
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].verdict == Verdict::Violated);
  CHECK(outcomes[0].violation_kind == ViolationKind::DeadlineExceeded);
  CHECK(outcomes[0].observed_latency == 250);
  CHECK(outcomes[0].excess == 50);
}

TEST_CASE("no trigger means no outcomes") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  auto outcomes = feed_all(obs, {ev(100, 0, Signal::CpStep, std::int64_t{5}, 1),
                                 ev(100, 1, Signal::CpColour, Colour::White, 1)});
  CHECK(outcomes.empty());
}

TEST_CASE("an obligation that never arrives is reported at trace end without a latency") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  // The token departing does not resolve the activation: the component job
  // may still be running and its late output carries the true latency.
  auto outcomes = feed_all(obs, {ev(0, 0, Signal::Ls1, true, 1),
                                 ObserverInput{TokenDeparture{2000, 1}},
                                 ObserverInput{TraceEnd{2500}}});
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].verdict == Verdict::Violated);
  CHECK(outcomes[0].violation_kind == ViolationKind::DeadlineExceeded);
  CHECK_FALSE(outcomes[0].observed_latency.has_value());
  CHECK_FALSE(outcomes[0].excess.has_value());
  CHECK(outcomes[0].t == 2500);
}

TEST_CASE("a late obligation after the token departed still carries the true latency") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  auto outcomes = feed_all(obs, {ev(0, 0, Signal::Ls1, true, 1),
                                 ObserverInput{TokenDeparture{2000, 1}},
                                 ev(2600, 1, Signal::CpStep, std::int64_t{5}, 1),
                                 ev(2600, 2, Signal::CpColour, Colour::White, 1)});
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].verdict == Verdict::Violated);
  CHECK(outcomes[0].observed_latency == 2600);
  CHECK(outcomes[0].excess == 2400);
}

TEST_CASE("a vacuous guarantee never violates") {
  Contract vacuous("vacuous", {Signal::Ls1}, {}, {}, Predicate::truth(), {});
  Observer obs = compile_observer(vacuous, SpeedLevel::S1);
  auto outcomes = feed_all(obs, {ev(0, 0, Signal::Ls1, true, 1),
                                 ObserverInput{TokenDeparture{5000, 1}},
                                 ObserverInput{TraceEnd{6000}}});
  CHECK(outcomes.empty());
}

TEST_CASE("parameter updates apply to later activations, never retroactively") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);

  auto first = feed_all(obs, cp_trace(250));
  REQUIRE(first.size() == 1);
  CHECK(first[0].verdict == Verdict::Violated);

  obs.set_speed(SpeedLevel::S3);  // bound becomes 800 for future activations

  auto second = feed_all(obs, {ev(1000, 3, Signal::Ls1, true, 2),
                               ev(1250, 4, Signal::CpStep, std::int64_t{7}, 2),
                               ev(1250, 5, Signal::CpColour, Colour::White, 2)});
  REQUIRE(second.size() == 1);
  CHECK(second[0].verdict == Verdict::Satisfied);
  CHECK(second[0].observed_latency == 250);
}

namespace {

// A step-indexed trace for the jitter contract: the colour processor reports
// step 5 during step 3 (t=150), the LS2 edge fires at `ls2_step` (0 = never).
std::vector<ObserverInput> ec_trace(std::int64_t ls2_step) {
  std::vector<ObserverInput> inputs;
  std::uint64_t seq = 0;
  inputs.push_back(ev(0, seq++, Signal::Ls1, true, 1));
  for (std::int64_t k = 1; k <= 30; ++k) {
    inputs.push_back(ev(k * 50, seq++, Signal::StepCount, k, std::nullopt));
    if (k == 3) {
      inputs.push_back(ev(k * 50, seq++, Signal::CpStep, std::int64_t{5}, 1));
      inputs.push_back(ev(k * 50, seq++, Signal::CpColour, Colour::White, 1));
    }
    if (k == ls2_step) inputs.push_back(ev(k * 50, seq++, Signal::Ls2, true, 1));
  }
  return inputs;
}

}  // namespace

TEST_CASE("jitter clause satisfied when the trigger lands on the expected step") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_EC"), SpeedLevel::S1);
  auto outcomes = feed_all(obs, ec_trace(25));  // SC_CP + Offset = 5 + 20
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].verdict == Verdict::Satisfied);
  CHECK(outcomes[0].t == 1250);
  CHECK_FALSE(outcomes[0].observed_latency.has_value());
}

TEST_CASE("jitter clause flags an early trigger and a missed window") {
  const SystemConfig cfg = default_config();

  SUBCASE("early trigger") {
    Observer obs = compile_observer(cfg.registry.get("C_EC"), SpeedLevel::S1);
    auto outcomes = feed_all(obs, ec_trace(23));
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].verdict == Verdict::Violated);
    CHECK(outcomes[0].violation_kind == ViolationKind::UnexpectedTrigger);
    CHECK(outcomes[0].t == 23 * 50);
  }

  SUBCASE("window closes without a trigger") {
    Observer obs = compile_observer(cfg.registry.get("C_EC"), SpeedLevel::S1);
    auto outcomes = feed_all(obs, ec_trace(0));
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].verdict == Verdict::Violated);
    CHECK(outcomes[0].violation_kind == ViolationKind::MissingTrigger);
    CHECK(outcomes[0].t == 26 * 50);  // the boundary after the expected step
  }
}

TEST_CASE("out-of-order input raises a trace error") {
  const SystemConfig cfg = default_config();
  Observer obs = compile_observer(cfg.registry.get("C_CP"), SpeedLevel::S1);
  obs.observe(ev(100, 0, Signal::Ls1, true, 1));
  CHECK_THROWS_AS(obs.observe(ev(50, 1, Signal::CpStep, std::int64_t{1}, 1)), TraceError);
}

TEST_CASE("observer compilation rejects unmonitorable clause shapes") {
  GuaranteeClause bad;
  bad.mode = ClauseMode::Biconditional;
  bad.trigger = parse_predicate("SC_CP != 0");
  bad.obligation = parse_predicate("SC_BS != 0");
  Contract c("bad", {Signal::CpStep}, {Signal::BsStep}, {}, Predicate::truth(), {bad});
  CHECK_THROWS_AS(compile_observer(c), ConfigError);
}

TEST_CASE("offline check of an empty trace is empty") {
  const SystemConfig cfg = default_config();
  CHECK(offline_check(cfg.registry.get("C_CP"), {}, {}).empty());
}

TEST_CASE("offline check rejects an unordered trace") {
  const SystemConfig cfg = default_config();
  std::vector<ObserverInput> inputs = {ev(100, 0, Signal::Ls1, true, 1),
                                       ev(50, 1, Signal::Ls1, true, 2)};
  CHECK_THROWS_AS(offline_check(cfg.registry.get("C_CP"), inputs, {}), TraceError);
}

// The incremental observer and the batch oracle must agree on every verdict,
// kind and latency over randomized traces.
TEST_CASE("incremental observation matches the batch oracle on random traces") {
  const SystemConfig cfg = default_config();
  const std::vector<std::string> contracts = {"C_CP", "C_BS", "C_EC", "C_MC"};
  for (std::uint32_t seed = 0; seed < 300; ++seed) {
    const auto trace = testgen::random_trace(seed);
    for (const std::string& name : contracts) {
      const Contract& contract = cfg.registry.get(name);
      auto incremental = testgen::run_incremental(contract, trace);
      auto batch = offline_check(contract, trace.inputs, trace.params);
      sort_outcomes(incremental);
      sort_outcomes(batch);
      CAPTURE(seed); CAPTURE(name);
      REQUIRE(incremental.size() == batch.size());
      for (std::size_t i = 0; i < incremental.size(); ++i) {
        CAPTURE(incremental[i].to_string());
        CAPTURE(batch[i].to_string());
        CHECK(incremental[i] == batch[i]);
      }
    }
  }
}

// Satisfied bounded outcomes book latency against the deadline at their
// trigger time: t - C_L is the trigger, and C_L fits the bound then in force.
TEST_CASE("latency bookkeeping holds on random traces") {
  const SystemConfig cfg = default_config();
  const Contract& contract = cfg.registry.get("C_CP");
  const LatencyBound& bound = *contract.guarantee().front().deadline;
  for (std::uint32_t seed = 1000; seed < 1200; ++seed) {
    const auto trace = testgen::random_trace(seed);
    for (const ObserverOutcome& o : testgen::run_incremental(contract, trace)) {
      if (!o.observed_latency) continue;
      const TimeMs trigger_t = o.t - *o.observed_latency;
      const DurationMs deadline = bound.at(trace.params.at(trigger_t));
      if (o.verdict == Verdict::Satisfied) {
        CHECK(*o.observed_latency <= deadline);
      } else {
        REQUIRE(o.excess.has_value());
        CHECK(*o.excess == *o.observed_latency - deadline);
        CHECK(*o.excess > 0);
      }
    }
  }
}

// One verdict per activation: bounded outcomes never outnumber trigger edges;
// the per-token jitter activation resolves at most once.
TEST_CASE("activation accounting on random traces") {
  const SystemConfig cfg = default_config();
  for (std::uint32_t seed = 2000; seed < 2200; ++seed) {
    const auto trace = testgen::random_trace(seed);

    std::map<TokenId, int> ls1_edges;
    for (const ObserverInput& input : trace.inputs) {
      if (const auto* e = std::get_if<Event>(&input)) {
        if (e->signal == Signal::Ls1 && e->token) ls1_edges[*e->token]++;
      }
    }
    std::map<TokenId, int> cp_outcomes;
    for (const ObserverOutcome& o : testgen::run_incremental(cfg.registry.get("C_CP"), trace)) {
      cp_outcomes[*o.token]++;
    }
    for (const auto& [token, count] : cp_outcomes) {
      CHECK(count <= ls1_edges[token]);
    }

    std::map<TokenId, int> ec_outcomes;
    for (const ObserverOutcome& o : testgen::run_incremental(cfg.registry.get("C_EC"), trace)) {
      ec_outcomes[*o.token]++;
    }
    for (const auto& [token, count] : ec_outcomes) {
      CHECK(count == 1);
    }
  }
}

// Loosening every deadline never turns a satisfied activation into a
// violation.
TEST_CASE("deadline loosening is monotone on random traces") {
  const SystemConfig tight = default_config();
  nlohmann::json doc = nlohmann::json::parse(default_config_json());
  for (const char* fn : {"f_CP", "f_BS", "f_LM"}) {
    for (SpeedLevel s : kAllSpeeds) {
      auto& cell = doc["latency_fns"][fn][std::string(speed_name(s))];
      cell = cell.get<DurationMs>() * 2;
    }
  }
  const SystemConfig loose = load_config(doc);

  for (std::uint32_t seed = 3000; seed < 3150; ++seed) {
    const auto trace = testgen::random_trace(seed);
    for (const std::string& name : {std::string("C_CP"), std::string("C_BS")}) {
      auto tight_out = testgen::run_incremental(tight.registry.get(name), trace);
      auto loose_out = testgen::run_incremental(loose.registry.get(name), trace);
      for (const ObserverOutcome& o : tight_out) {
        if (o.verdict != Verdict::Satisfied) continue;
        const bool still_satisfied =
            std::any_of(loose_out.begin(), loose_out.end(), [&](const ObserverOutcome& l) {
              return l.verdict == Verdict::Satisfied && l.token == o.token &&
                     l.clause_index == o.clause_index && l.t == o.t &&
                     l.observed_latency == o.observed_latency;
            });
        CAPTURE(seed); CAPTURE(name); CAPTURE(o.to_string());
        CHECK(still_satisfied);
      }
    }
  }
}
