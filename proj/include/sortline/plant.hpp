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

#pragma once

#include <array>
#include <map>
#include <vector>

#include "sortline/observer.hpp"
#include "sortline/types.hpp"

namespace sortline {

// Deterministic discrete-event simulation of the sorting line: belt, light
// sensors, pulse counter, colour processor, bin selector, ejector controller,
// motor controller and bins, plus per-token fault injection.
//
// The belt advances one step per step_period(M_S). Positions are measured in
// steps past the entry light sensor. A token's physical position lags the
// pulse count by its accumulated slip. The colour processor starts computing
// when the entry sensor fires and publishes SC_CP/CV_CP after its latency;
// the bin selector consumes them and publishes E_BS/SC_BS after its own
// latency. The ejector fires at step SC_BS if its command arrived before that
// step and the token is physically in front of it; tokens that pass the last
// ejector unejected run off the belt.

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct PlantConfig {
  std::array<DurationMs, 3> step_period_ms{50, 100, 200};  // per speed S1..S3
  std::int64_t cp_pos = 5;                                 // steps after LS1
  std::int64_t ls2_pos = 25;
  std::array<std::int64_t, 3> ejector_pos{30, 35, 40};
  DurationMs nominal_cp_ms = 150;
  DurationMs nominal_bs_ms = 150;
  SpeedLevel initial_speed = SpeedLevel::S1;

  std::int64_t offset() const { return ls2_pos - cp_pos; }
  DurationMs step_period(SpeedLevel s) const { return step_period_ms[speed_index(s)]; }

  // Throws ConfigError naming the violated invariant.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Tokens and injections
// ---------------------------------------------------------------------------

struct BinOutcome {
  enum class Kind : std::uint8_t { Pending, Binned, RanOff };
  Kind kind = Kind::Pending;
  int bin = 0;  // 1-based, meaningful when Binned

  bool operator==(const BinOutcome&) const = default;
  std::string to_string() const;

  static BinOutcome pending() { return {Kind::Pending, 0}; }
  static BinOutcome binned(int bin) { return {Kind::Binned, bin}; }
  static BinOutcome ran_off() { return {Kind::RanOff, 0}; }
};

enum class CyberComponent : std::uint8_t { CP, BS };

std::string_view component_name(CyberComponent c);

struct LatencyInflation {
  CyberComponent component = CyberComponent::CP;
  std::optional<DurationMs> absolute;  // replaces the nominal latency
  DurationMs extra = 0;                // added to the nominal latency
};

// Belt jitter. Positive steps take effect when the token passes the colour
// processor (the token falls behind the pulse count); negative steps take
// effect at the second light sensor and are clamped so the position never
// gets ahead of the pulse count.
struct SlipInjection {
  std::int64_t steps = 0;
};

struct Injection {
  TokenId token = 0;
  std::variant<LatencyInflation, SlipInjection> kind;
};

// ---------------------------------------------------------------------------
// Log records
// ---------------------------------------------------------------------------

struct DepartureRecord {
  TimeMs t = 0;
  TokenId token = 0;
  BinOutcome outcome;
};

struct SpeedChange {
  TimeMs t = 0;
  SpeedLevel speed = SpeedLevel::S1;
};

using PlantRecord = std::variant<Event, DepartureRecord, SpeedChange>;

// Inspectable view of one token. The physical position lags the pulse count
// by the accumulated slip.
struct TokenInfo {
  TokenId id = 0;
  Colour colour = Colour::White;
  std::int64_t slip_steps = 0;
  std::int64_t position = 0;  // steps progressed past the entry sensor
  BinOutcome status;
};

// ---------------------------------------------------------------------------
// Plant
// ---------------------------------------------------------------------------

class Plant {
 public:
  explicit Plant(PlantConfig config);

  // Schedules a token to appear at the entry sensor at time t (>= clock).
  TokenId place_token(Colour colour, TimeMs t);

  // Registers a fault injection for an existing token or for the next token
  // to be placed.
  void inject(const Injection& injection);

  // Switches the belt speed starting from the next step boundary; the last
  // write before a boundary wins.
  void set_speed(SpeedLevel s);

  // Advances simulated time, returning the trace inputs (events and token
  // departures) generated on the way, in order.
  std::vector<ObserverInput> advance(TimeMs until);

  // Earliest pending activity (the belt always has a next step boundary).
  TimeMs next_activity_time() const;

  BinOutcome bin_outcome(TokenId token) const;

  TokenInfo token_info(TokenId token) const;

  // Ejector-controller recovery: route the token into the second bin at the
  // appropriate step, determined once the real LS2 trigger has been seen.
  void schedule_recovery_ejection(TokenId token);

  // The bin a correctly processed token of this colour belongs in.
  int correct_bin(TokenId token) const;

  bool quiescent() const;

  TimeMs clock() const { return clock_; }
  std::int64_t step_count() const { return sc_; }
  SpeedLevel speed() const { return speed_; }
  TimeMs next_step_time() const { return next_step_at_; }
  TokenId next_token_id() const { return next_token_; }
  std::uint32_t placed_count() const { return static_cast<std::uint32_t>(tokens_.size()); }

  const std::array<std::uint32_t, 3>& bin_tally() const { return bins_; }
  std::uint32_t ran_off_count() const { return ran_off_; }

  const PlantConfig& config() const { return config_; }
  const std::vector<PlantRecord>& log() const { return log_; }

 private:
  struct TokenRec {
    TokenId id = 0;
    Colour colour = Colour::White;
    std::int64_t entry_sc = 0;
    std::int64_t slip = 0;
    bool on_belt = false;     // placed and not yet terminal
    bool placed = false;
    bool cp_crossed = false;
    bool ls2_seen = false;
    std::int64_t ls2_step = 0;
    bool recovery_requested = false;
    bool recovery_scheduled = false;
    BinOutcome outcome;
  };

  struct TokenInjections {
    std::optional<DurationMs> cp_absolute;
    DurationMs cp_extra = 0;
    std::optional<DurationMs> bs_absolute;
    DurationMs bs_extra = 0;
    std::int64_t slip_at_cp = 0;
    std::int64_t slip_at_ls2 = 0;
  };

  struct Job {
    TimeMs complete_at = 0;
    std::uint64_t order = 0;
    CyberComponent component = CyberComponent::CP;
    TokenId token = 0;
  };

  struct Placement {
    TimeMs t = 0;
    std::uint64_t order = 0;
    TokenId token = 0;
  };

  struct PendingEjection {
    std::int64_t fire_sc = 0;
    int ejector = 0;  // 0-based
    TokenId token = 0;
  };

  TokenRec& token_rec(TokenId id);
  const TokenRec& token_rec(TokenId id) const;
  std::int64_t position(const TokenRec& tok) const { return sc_ - tok.entry_sc - tok.slip; }

  void emit(std::vector<ObserverInput>& out, Signal signal, Value value,
            std::optional<TokenId> token, TimeMs t);
  void depart(std::vector<ObserverInput>& out, TokenRec& tok, BinOutcome outcome, TimeMs t);

  void process_boundary(TimeMs t, std::vector<ObserverInput>& out);
  void process_placement(const Placement& p, TimeMs t, std::vector<ObserverInput>& out);
  void process_job(const Job& job, TimeMs t, std::vector<ObserverInput>& out);

  PlantConfig config_;
  TimeMs clock_ = 0;
  std::int64_t sc_ = 0;
  SpeedLevel speed_;
  std::optional<SpeedLevel> pending_speed_;
  TimeMs next_step_at_;

  std::vector<TokenRec> tokens_;
  std::map<TokenId, TokenInjections> injections_;
  std::vector<Job> jobs_;
  std::vector<Placement> placements_;
  std::vector<PendingEjection> ejections_;

  std::array<std::uint32_t, 3> bins_{0, 0, 0};
  std::uint32_t ran_off_ = 0;

  TokenId next_token_ = 1;
  std::uint64_t seq_ = 0;
  std::uint64_t order_ = 0;
  std::vector<PlantRecord> log_;
};

}  // namespace sortline
