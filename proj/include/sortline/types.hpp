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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace sortline {

using TimeMs = std::int64_t;
using DurationMs = std::int64_t;
using TokenId = std::uint32_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};
struct EvalError : Error {
  using Error::Error;
};
struct CompositionError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};
struct TraceError : Error {
  using Error::Error;
};
struct RoutingError : Error {
  using Error::Error;
};
struct SequencingError : Error {
  using Error::Error;
};
struct ComparisonError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Motor speed levels
// ---------------------------------------------------------------------------

// Three belt speeds. S1 is the fastest, S3 the slowest; degradation only ever
// moves towards S3.
enum class SpeedLevel : std::uint8_t { S1 = 0, S2 = 1, S3 = 2 };

inline constexpr std::array<SpeedLevel, 3> kAllSpeeds = {SpeedLevel::S1, SpeedLevel::S2,
                                                         SpeedLevel::S3};

constexpr std::size_t speed_index(SpeedLevel s) { return static_cast<std::size_t>(s); }

constexpr std::string_view speed_name(SpeedLevel s) {
  switch (s) {
    case SpeedLevel::S1: return "S1";
    case SpeedLevel::S2: return "S2";
    case SpeedLevel::S3: return "S3";
  }
  return "?";
}

std::optional<SpeedLevel> speed_from_name(std::string_view name);

// ---------------------------------------------------------------------------
// Plant signal registry
// ---------------------------------------------------------------------------

// The fixed signal vocabulary of the sorting line. Wire names (used in
// configuration files and trace dumps) follow the plant labelling: LS1, LS2,
// SC, SC_CP, CV_CP, SC_BS, E_BS, B1, B2.
enum class Signal : std::uint8_t {
  Ls1,        // light sensor at belt entry (edge)
  Ls2,        // light sensor before the bins (edge)
  StepCount,  // global belt pulse count SC
  CpStep,     // step count reported by the colour processor (SC_CP)
  CpColour,   // colour value reported by the colour processor (CV_CP)
  BsStep,     // ejection step computed by the bin selector (SC_BS)
  BsEjector,  // ejector chosen by the bin selector (E_BS)
  Bin1,       // bin sensor 1 (edge)
  Bin2,       // bin sensor 2 (edge)
};

inline constexpr std::array<Signal, 9> kAllSignals = {
    Signal::Ls1,    Signal::Ls2,    Signal::StepCount, Signal::CpStep, Signal::CpColour,
    Signal::BsStep, Signal::BsEjector, Signal::Bin1,   Signal::Bin2};

enum class SignalKind : std::uint8_t { Edge, Step, ColourValue, EjectorValue };

constexpr SignalKind kind_of(Signal s) {
  switch (s) {
    case Signal::Ls1:
    case Signal::Ls2:
    case Signal::Bin1:
    case Signal::Bin2: return SignalKind::Edge;
    case Signal::StepCount:
    case Signal::CpStep:
    case Signal::BsStep: return SignalKind::Step;
    case Signal::CpColour: return SignalKind::ColourValue;
    case Signal::BsEjector: return SignalKind::EjectorValue;
  }
  return SignalKind::Edge;
}

constexpr std::string_view wire_name(Signal s) {
  switch (s) {
    case Signal::Ls1: return "LS1";
    case Signal::Ls2: return "LS2";
    case Signal::StepCount: return "SC";
    case Signal::CpStep: return "SC_CP";
    case Signal::CpColour: return "CV_CP";
    case Signal::BsStep: return "SC_BS";
    case Signal::BsEjector: return "E_BS";
    case Signal::Bin1: return "B1";
    case Signal::Bin2: return "B2";
  }
  return "?";
}

std::optional<Signal> signal_from_wire(std::string_view name);

// ---------------------------------------------------------------------------
// Signal value domains
// ---------------------------------------------------------------------------

enum class Colour : std::uint8_t { White, NonWhite };  // wire values "W" / "N"

enum class Ejector : std::uint8_t { E1 = 0, E2 = 1, E3 = 2 };

constexpr std::string_view colour_name(Colour c) {
  return c == Colour::White ? "W" : "N";
}

constexpr std::string_view ejector_name(Ejector e) {
  switch (e) {
    case Ejector::E1: return "E1";
    case Ejector::E2: return "E2";
    case Ejector::E3: return "E3";
  }
  return "?";
}

// A signal value. std::monostate is the uninitialised/"null" value used by the
// enum-valued signals; edge signals carry bool, step counters carry int64.
using Value = std::variant<std::monostate, bool, std::int64_t, Colour, Ejector>;

std::string value_to_string(const Value& v);

// ---------------------------------------------------------------------------
// Per-speed latency bounds
// ---------------------------------------------------------------------------

// Total map from speed level to a latency bound in ms. Bounds must not shrink
// as the belt slows down.
class LatencyBound {
 public:
  LatencyBound() = default;
  LatencyBound(std::string name, std::array<DurationMs, 3> bounds_by_speed);

  DurationMs at(SpeedLevel s) const { return bounds_[speed_index(s)]; }
  const std::string& name() const { return name_; }
  const std::array<DurationMs, 3>& bounds() const { return bounds_; }

  // Pointwise sum, used when cause-effect chains are fused during composition.
  friend LatencyBound operator+(const LatencyBound& a, const LatencyBound& b);

  bool operator==(const LatencyBound& other) const { return bounds_ == other.bounds_; }

 private:
  std::string name_;
  std::array<DurationMs, 3> bounds_{0, 0, 0};
};

// Table lookup of a latency bound at a given speed.
inline DurationMs latency_bound(const LatencyBound& fn, SpeedLevel speed) { return fn.at(speed); }

}  // namespace sortline
