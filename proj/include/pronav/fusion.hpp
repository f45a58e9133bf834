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

#include <algorithm>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/safety.hpp"
#include "pronav/types.hpp"

namespace pronav {

/// What the robot is told to do this frame.
struct RobotCommand {
  double v = 0;  // m/s
  double w = 0;  // rad/s
  std::optional<Gait> gait = Gait::Trot;
  Mode mode = Mode::Normal;

  friend bool operator==(const RobotCommand&, const RobotCommand&) = default;
};

struct Velocity {
  double v = 0;
  double w = 0;
};

/// External planner output, queried once per frame.
class VelocitySource {
 public:
  virtual ~VelocitySource() = default;
  virtual Velocity at(double t) = 0;
};

class ConstantVelocity : public VelocitySource {
 public:
  ConstantVelocity(double v, double w) : vel_{v, w} {}
  Velocity at(double) override { return vel_; }

 private:
  Velocity vel_;
};

/// Sample-and-hold replay of a JSONL file of {t, v, w} records.
class ReplayVelocity : public VelocitySource {
 public:
  struct Sample {
    double t;
    Velocity vel;
  };

  explicit ReplayVelocity(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw SchemaError("velocity replay is empty");
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i].t > samples_[i - 1].t)) {
        throw SchemaError("velocity replay timestamps must increase");
      }
    }
  }

  static ReplayVelocity from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open velocity file " + path);
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        samples.push_back({j.at("t").get<double>(), {j.at("v").get<double>(), j.at("w").get<double>()}});
      } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return ReplayVelocity(std::move(samples));
  }

  Velocity at(double t) override {
    while (cursor_ + 1 < samples_.size() && samples_[cursor_ + 1].t <= t) ++cursor_;
    while (cursor_ > 0 && samples_[cursor_].t > t) --cursor_;
    return samples_[cursor_].vel;
  }

 private:
  std::vector<Sample> samples_;
  std::size_t cursor_ = 0;
};

struct FusionConfig {
  VMaxTable v_max;
  double v_rec = 0.2;
  double w_rec = 0.3;
};

/// Turn rate while backing out: away from the entrapped side.
inline double recovery_turn(RecoveryCommand cmd, double w_rec) {
  return cmd == RecoveryCommand::ReverseLeft ? -w_rec : w_rec;
}

/// Combines the planner's velocity with the selected gait and safety verdict.
inline RobotCommand fuse(const Velocity& planned, std::optional<Gait> gait,
                         const SafetyVerdict& verdict, const FusionConfig& cfg) {
  RobotCommand cmd;
  if (verdict.halt || !gait) {
    cmd.gait.reset();
    cmd.mode = Mode::Halt;
    return cmd;
  }
  const double limit = cfg.v_max(*gait);
  cmd.gait = gait;
  if (verdict.mode == Mode::Recovery && verdict.recovery_cmd) {
    cmd.mode = Mode::Recovery;
    cmd.v = -std::min(cfg.v_rec, limit);
    cmd.w = recovery_turn(*verdict.recovery_cmd, cfg.w_rec);
    return cmd;
  }
  cmd.v = std::clamp(planned.v, -limit, limit);
  cmd.w = planned.w;
  return cmd;
}

}  // namespace pronav
