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

#include "sortline/plant.hpp"

#include <algorithm>

namespace sortline {

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void PlantConfig::validate() const {
  if (cp_pos <= 0) throw ConfigError("plant config: cp_pos must be positive");
  if (!(cp_pos < ls2_pos)) throw ConfigError("plant config: cp_pos must lie before ls2_pos");
  if (!(ls2_pos < ejector_pos[0] && ejector_pos[0] < ejector_pos[1] &&
        ejector_pos[1] < ejector_pos[2])) {
    throw ConfigError("plant config: ejector positions must be ordered after ls2_pos");
  }
  if (!(step_period_ms[0] > 0 && step_period_ms[0] < step_period_ms[1] &&
        step_period_ms[1] < step_period_ms[2])) {
    throw ConfigError("plant config: step periods must be positive and strictly increasing "
                      "from S1 to S3");
  }
  if (nominal_cp_ms < 0 || nominal_bs_ms < 0) {
    throw ConfigError("plant config: nominal latencies must be non-negative");
  }
}

std::string BinOutcome::to_string() const {
  switch (kind) {
    case Kind::Pending: return "pending";
    case Kind::Binned: return "bin" + std::to_string(bin);
    case Kind::RanOff: return "ranoff";
  }
  return "?";
}

std::string_view component_name(CyberComponent c) {
  return c == CyberComponent::CP ? "CP" : "BS";
}

// ---------------------------------------------------------------------------
// Plant
// ---------------------------------------------------------------------------

Plant::Plant(PlantConfig config) : config_(config), speed_(config.initial_speed) {
  config_.validate();
  next_step_at_ = config_.step_period(speed_);
}

Plant::TokenRec& Plant::token_rec(TokenId id) {
  if (id == 0 || id > tokens_.size()) throw InputError("unknown token " + std::to_string(id));
  return tokens_[id - 1];
}

const Plant::TokenRec& Plant::token_rec(TokenId id) const {
  if (id == 0 || id > tokens_.size()) throw InputError("unknown token " + std::to_string(id));
  return tokens_[id - 1];
}

TokenId Plant::place_token(Colour colour, TimeMs t) {
  if (t < clock_) {
    throw InputError("cannot place a token in the past (t=" + std::to_string(t) +
                     ", clock=" + std::to_string(clock_) + ")");
  }
  TokenRec tok;
  tok.id = next_token_++;
  tok.colour = colour;
  tokens_.push_back(tok);
  placements_.push_back({t, order_++, tok.id});
  return tok.id;
}

void Plant::inject(const Injection& injection) {
  if (injection.token == 0 ||
      (injection.token > tokens_.size() && injection.token != next_token_)) {
    throw InputError("injection targets unknown token " + std::to_string(injection.token));
  }
  TokenInjections& inj = injections_[injection.token];
  if (const auto* lat = std::get_if<LatencyInflation>(&injection.kind)) {
    if (lat->component == CyberComponent::CP) {
      if (lat->absolute) inj.cp_absolute = lat->absolute;
      inj.cp_extra += lat->extra;
    } else {
      if (lat->absolute) inj.bs_absolute = lat->absolute;
      inj.bs_extra += lat->extra;
    }
  } else {
    const auto& slip = std::get<SlipInjection>(injection.kind);
    if (slip.steps >= 0) {
      inj.slip_at_cp += slip.steps;
    } else {
      inj.slip_at_ls2 += slip.steps;
    }
  }
}

void Plant::set_speed(SpeedLevel s) { pending_speed_ = s; }

TimeMs Plant::next_activity_time() const {
  TimeMs t = next_step_at_;
  for (const Job& j : jobs_) t = std::min(t, j.complete_at);
  for (const Placement& p : placements_) t = std::min(t, p.t);
  return t;
}

bool Plant::quiescent() const {
  if (!jobs_.empty() || !placements_.empty() || !ejections_.empty()) return false;
  return std::none_of(tokens_.begin(), tokens_.end(),
                      [](const TokenRec& t) { return t.on_belt || !t.placed; });
}

BinOutcome Plant::bin_outcome(TokenId token) const { return token_rec(token).outcome; }

TokenInfo Plant::token_info(TokenId token) const {
  const TokenRec& tok = token_rec(token);
  TokenInfo info;
  info.id = tok.id;
  info.colour = tok.colour;
  info.slip_steps = tok.slip;
  info.position = tok.placed ? position(tok) : 0;
  info.status = tok.outcome;
  return info;
}

int Plant::correct_bin(TokenId token) const {
  return token_rec(token).colour == Colour::White ? 1 : 2;
}

void Plant::schedule_recovery_ejection(TokenId token) {
  TokenRec& tok = token_rec(token);
  if (!tok.on_belt || tok.recovery_scheduled) return;
  if (tok.ls2_seen) {
    ejections_.push_back({tok.ls2_step + (config_.ejector_pos[1] - config_.ls2_pos), 1, token});
    tok.recovery_scheduled = true;
  } else {
    tok.recovery_requested = true;
  }
}

void Plant::emit(std::vector<ObserverInput>& out, Signal signal, Value value,
                 std::optional<TokenId> token, TimeMs t) {
  Event e;
  e.t = t;
  e.seq = seq_++;
  e.signal = signal;
  e.value = std::move(value);
  e.token = token;
  log_.emplace_back(e);
  out.emplace_back(std::move(e));
}

void Plant::depart(std::vector<ObserverInput>& out, TokenRec& tok, BinOutcome outcome, TimeMs t) {
  tok.on_belt = false;
  tok.outcome = outcome;
  if (outcome.kind == BinOutcome::Kind::Binned) {
    bins_[outcome.bin - 1]++;
  } else {
    ran_off_++;
  }
  log_.emplace_back(DepartureRecord{t, tok.id, outcome});
  out.emplace_back(TokenDeparture{t, tok.id});
}

std::vector<ObserverInput> Plant::advance(TimeMs until) {
  if (until < clock_) throw InputError("advance into the past");
  std::vector<ObserverInput> out;

  while (true) {
    TimeMs t = next_activity_time();
    if (t > until) break;

    // Step boundaries first, then placements, then component jobs: an output
    // landing exactly on a boundary has not arrived "before" that step.
    if (next_step_at_ == t) process_boundary(t, out);

    std::vector<Placement> due_placements;
    for (auto it = placements_.begin(); it != placements_.end();) {
      if (it->t == t) {
        due_placements.push_back(*it);
        it = placements_.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(due_placements.begin(), due_placements.end(),
              [](const Placement& a, const Placement& b) { return a.order < b.order; });
    for (const Placement& p : due_placements) process_placement(p, t, out);

    std::vector<Job> due_jobs;
    for (auto it = jobs_.begin(); it != jobs_.end();) {
      if (it->complete_at == t) {
        due_jobs.push_back(*it);
        it = jobs_.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(due_jobs.begin(), due_jobs.end(),
              [](const Job& a, const Job& b) { return a.order < b.order; });
    for (const Job& j : due_jobs) process_job(j, t, out);

    clock_ = t;
  }

  clock_ = std::max(clock_, until);
  return out;
}

void Plant::process_boundary(TimeMs t, std::vector<ObserverInput>& out) {
  if (pending_speed_) {
    speed_ = *pending_speed_;
    pending_speed_.reset();
    log_.emplace_back(SpeedChange{t, speed_});
  }
  sc_ += 1;
  next_step_at_ = t + config_.step_period(speed_);
  emit(out, Signal::StepCount, sc_, std::nullopt, t);

  for (TokenRec& tok : tokens_) {
    if (!tok.on_belt) continue;
    std::int64_t pos = position(tok);

    if (!tok.cp_crossed && pos >= config_.cp_pos) {
      tok.cp_crossed = true;
      // Positive jitter takes effect between CP and LS2.
      if (auto it = injections_.find(tok.id); it != injections_.end()) {
        tok.slip += it->second.slip_at_cp;
        it->second.slip_at_cp = 0;
      }
    }
    if (tok.cp_crossed && !tok.ls2_seen && pos >= config_.ls2_pos) {
      tok.ls2_seen = true;
      tok.ls2_step = sc_;
      emit(out, Signal::Ls2, true, tok.id, t);
      if (tok.recovery_requested && !tok.recovery_scheduled) {
        ejections_.push_back(
            {tok.ls2_step + (config_.ejector_pos[1] - config_.ls2_pos), 1, tok.id});
        tok.recovery_scheduled = true;
        tok.recovery_requested = false;
      }
      // Compensating (negative) jitter applies after LS2, clamped so the
      // position never overtakes the pulse count.
      if (auto it = injections_.find(tok.id); it != injections_.end()) {
        tok.slip = std::max<std::int64_t>(0, tok.slip + it->second.slip_at_ls2);
        it->second.slip_at_ls2 = 0;
      }
    }
  }

  // Ejections scheduled for this step fire if the token is physically there.
  for (auto it = ejections_.begin(); it != ejections_.end();) {
    if (it->fire_sc != sc_) {
      ++it;
      continue;
    }
    TokenRec& tok = token_rec(it->token);
    if (tok.on_belt && position(tok) == config_.ejector_pos[it->ejector]) {
      int bin = it->ejector + 1;
      if (bin <= 2) emit(out, bin == 1 ? Signal::Bin1 : Signal::Bin2, true, tok.id, t);
      depart(out, tok, BinOutcome::binned(bin), t);
    }
    it = ejections_.erase(it);
  }

  for (TokenRec& tok : tokens_) {
    if (tok.on_belt && position(tok) > config_.ejector_pos[2]) {
      depart(out, tok, BinOutcome::ran_off(), t);
    }
  }
}

void Plant::process_placement(const Placement& p, TimeMs t, std::vector<ObserverInput>& out) {
  TokenRec& tok = token_rec(p.token);
  tok.placed = true;
  tok.on_belt = true;
  tok.entry_sc = sc_;
  emit(out, Signal::Ls1, true, tok.id, t);

  DurationMs latency = config_.nominal_cp_ms;
  if (auto it = injections_.find(tok.id); it != injections_.end()) {
    latency = it->second.cp_absolute.value_or(latency + it->second.cp_extra);
  }
  jobs_.push_back({t + latency, order_++, CyberComponent::CP, tok.id});
}

void Plant::process_job(const Job& job, TimeMs t, std::vector<ObserverInput>& out) {
  TokenRec& tok = token_rec(job.token);
  const std::int64_t cp_step = tok.entry_sc + config_.cp_pos;

  if (job.component == CyberComponent::CP) {
    emit(out, Signal::CpStep, cp_step, tok.id, t);
    emit(out, Signal::CpColour, tok.colour, tok.id, t);

    DurationMs latency = config_.nominal_bs_ms;
    if (auto it = injections_.find(tok.id); it != injections_.end()) {
      latency = it->second.bs_absolute.value_or(latency + it->second.bs_extra);
    }
    jobs_.push_back({t + latency, order_++, CyberComponent::BS, tok.id});
  } else {
    const int ejector = tok.colour == Colour::White ? 0 : 1;
    const std::int64_t fire_sc = cp_step + (config_.ejector_pos[ejector] - config_.cp_pos);
    emit(out, Signal::BsStep, fire_sc, tok.id, t);
    emit(out, Signal::BsEjector, static_cast<Ejector>(ejector), tok.id, t);
    if (tok.on_belt && fire_sc > sc_) {
      ejections_.push_back({fire_sc, ejector, tok.id});
    }
  }
}

}  // namespace sortline
