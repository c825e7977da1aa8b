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

#include "sortline/types.hpp"

namespace sortline {

std::optional<SpeedLevel> speed_from_name(std::string_view name) {
  for (SpeedLevel s : kAllSpeeds) {
    if (speed_name(s) == name) return s;
  }
  return std::nullopt;
}

std::optional<Signal> signal_from_wire(std::string_view name) {
  for (Signal s : kAllSignals) {
    if (wire_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string value_to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t n) const { return std::to_string(n); }
    std::string operator()(Colour c) const { return std::string(colour_name(c)); }
    std::string operator()(Ejector e) const { return std::string(ejector_name(e)); }
  };
  return std::visit(Visitor{}, v);
}

LatencyBound::LatencyBound(std::string name, std::array<DurationMs, 3> bounds_by_speed)
    : name_(std::move(name)), bounds_(bounds_by_speed) {
  for (DurationMs b : bounds_) {
    if (b < 0) throw ConfigError("latency bound " + name_ + " has a negative entry");
  }
  if (bounds_[0] > bounds_[1] || bounds_[1] > bounds_[2]) {
    throw ConfigError("latency bound " + name_ + " must be non-decreasing from S1 to S3");
  }
}

LatencyBound operator+(const LatencyBound& a, const LatencyBound& b) {
  return LatencyBound(a.name() + "+" + b.name(),
                      {a.bounds()[0] + b.bounds()[0], a.bounds()[1] + b.bounds()[1],
                       a.bounds()[2] + b.bounds()[2]});
}

}  // namespace sortline
