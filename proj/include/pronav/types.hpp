// Copyright 2026 The pronav Authors.
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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pronav/errors.hpp"

namespace pronav {

inline constexpr std::size_t kNumLegs = 4;
inline constexpr double kPipelineHz = 16.0;

/// Leg index, 1 = front-left, 2 = front-right, 3 = rear-left, 4 = rear-right.
class LegId {
 public:
  constexpr explicit LegId(int index) : index_(index) {
    if (index < 1 || index > 4) throw Error("leg id out of range");
  }
  constexpr int index() const { return index_; }
  constexpr std::size_t slot() const { return static_cast<std::size_t>(index_ - 1); }
  constexpr bool is_left() const { return index_ == 1 || index_ == 3; }
  constexpr bool is_front() const { return index_ <= 2; }
  static constexpr LegId from_slot(std::size_t slot) { return LegId(static_cast<int>(slot) + 1); }
  friend constexpr bool operator==(LegId, LegId) = default;

 private:
  int index_;
};

enum class Gait : std::uint8_t { Trot, Crawl, Amble };

inline constexpr std::array<Gait, 3> kAllGaits = {Gait::Trot, Gait::Crawl, Gait::Amble};

inline std::string_view to_string(Gait g) {
  switch (g) {
    case Gait::Trot: return "trot";
    case Gait::Crawl: return "crawl";
    case Gait::Amble: return "amble";
  }
  return "?";
}

inline std::optional<Gait> gait_from_string(std::string_view s) {
  if (s == "trot") return Gait::Trot;
  if (s == "crawl") return Gait::Crawl;
  if (s == "amble") return Gait::Amble;
  return std::nullopt;
}

/// Rank by nominal current draw: Crawl < Trot < Amble.
constexpr int current_rank(Gait g) {
  switch (g) {
    case Gait::Crawl: return 0;
    case Gait::Trot: return 1;
    case Gait::Amble: return 2;
  }
  return 3;
}

enum class Event : std::uint8_t { Crash, Entrapment };

inline std::string_view to_string(Event e) {
  return e == Event::Crash ? "crash" : "entrapment";
}

inline std::optional<Event> event_from_string(std::string_view s) {
  if (s == "crash") return Event::Crash;
  if (s == "entrapment") return Event::Entrapment;
  return std::nullopt;
}

enum class Mode : std::uint8_t { Normal, Halt, Recovery };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Normal: return "normal";
    case Mode::Halt: return "halt";
    case Mode::Recovery: return "recovery";
  }
  return "?";
}

enum class RecoveryCommand : std::uint8_t { ReverseLeft, ReverseRight };

inline std::string_view to_string(RecoveryCommand r) {
  return r == RecoveryCommand::ReverseLeft ? "reverse_left" : "reverse_right";
}

struct LegSample {
  double hip_px = 0, hip_py = 0, knee_pz = 0;  // m
  double hip_vx = 0, hip_vy = 0, knee_vz = 0;  // m/s
  double hip_fx = 0, hip_fy = 0, knee_fz = 0;  // N

  friend bool operator==(const LegSample&, const LegSample&) = default;
};

struct Imu {
  double ax = 0, ay = 0, az = 0;
  friend bool operator==(const Imu&, const Imu&) = default;
};

struct Odometry {
  double x = 0, y = 0, yaw = 0;
  double vx = 0, vy = 0, wz = 0;
  double speed() const { return std::hypot(vx, vy); }
  friend bool operator==(const Odometry&, const Odometry&) = default;
};

/// One pipeline-rate telemetry sample.
struct ProprioFrame {
  double t = 0;
  std::array<LegSample, kNumLegs> legs{};
  double current = 0;  // A
  Imu imu;
  Odometry odom;
  std::optional<Gait> gait_label;
  std::optional<std::string> terrain_label;
  std::optional<Event> event;

  const LegSample& leg(LegId id) const { return legs[id.slot()]; }
  friend bool operator==(const ProprioFrame&, const ProprioFrame&) = default;
};

}  // namespace pronav
