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
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/errors.hpp"
#include "pronav/types.hpp"

namespace pronav {

inline constexpr std::size_t kHipJoints = 2 * kNumLegs;

/// Hip joint j: leg j / 2, axis x for even j and y for odd j.
inline double hip_joint(const ProprioFrame& f, std::size_t j) {
  const LegSample& s = f.legs[j / 2];
  return j % 2 == 0 ? s.hip_px : s.hip_py;
}

struct ReferenceEnvelope {
  std::array<double, kHipJoints> min_ref{};
  std::array<double, kHipJoints> max_ref{};

  static ReferenceEnvelope from_log(const std::vector<ProprioFrame>& frames) {
    if (frames.empty()) throw Error("reference envelope needs a non-empty log");
    ReferenceEnvelope env;
    env.min_ref.fill(std::numeric_limits<double>::infinity());
    env.max_ref.fill(-std::numeric_limits<double>::infinity());
    for (const auto& f : frames) {
      for (std::size_t j = 0; j < kHipJoints; ++j) {
        env.min_ref[j] = std::min(env.min_ref[j], hip_joint(f, j));
        env.max_ref[j] = std::max(env.max_ref[j], hip_joint(f, j));
      }
    }
    return env;
  }

  friend bool operator==(const ReferenceEnvelope&, const ReferenceEnvelope&) = default;
};

inline double excursion(double p, double lo, double hi) {
  if (p < lo) return lo - p;
  if (p > hi) return p - hi;
  return 0.0;
}

/// Cumulative hip excursion beyond the envelope over all frames and joints.
inline double vibration_cost(const std::vector<ProprioFrame>& frames,
                             const ReferenceEnvelope& env) {
  double total = 0;
  for (const auto& f : frames) {
    for (std::size_t j = 0; j < kHipJoints; ++j) {
      total += excursion(hip_joint(f, j), env.min_ref[j], env.max_ref[j]);
    }
  }
  return total;
}

struct ImuEnergy {
  double x = 0, y = 0, z = 0;
  double total() const { return x + y + z; }
};

inline ImuEnergy imu_energy(const std::vector<ProprioFrame>& frames) {
  ImuEnergy e;
  for (const auto& f : frames) {
    e.x += f.imu.ax * f.imu.ax;
    e.y += f.imu.ay * f.imu.ay;
    e.z += f.imu.az * f.imu.az;
  }
  return e;
}

/// Relative gain of one success rate over another, in percent.
inline double improvement(double sr_ours, double sr_second) {
  if (sr_second == 0) throw Error("improvement is undefined for a zero baseline success rate");
  return (sr_ours - sr_second) / sr_second * 100.0;
}

struct Goal {
  double x = 0;
  double y = 0;
};

struct TrialReport {
  bool success = false;
  double mean_power = 0;     // W
  double mean_velocity = 0;  // m/s
  std::optional<double> time_to_goal;
  double vibration_cost = 0;
  double imu_energy = 0;
};

inline nlohmann::ordered_json to_json(const TrialReport& r) {
  nlohmann::ordered_json j;
  j["success"] = r.success;
  j["mean_power"] = r.mean_power;
  j["mean_velocity"] = r.mean_velocity;
  j["time_to_goal"] = r.time_to_goal ? nlohmann::ordered_json(*r.time_to_goal) : nlohmann::ordered_json();
  j["vibration_cost"] = r.vibration_cost;
  j["imu_energy"] = r.imu_energy;
  return j;
}

/// Metrics for one trial. Success means reaching within goal_radius of the
/// goal on odometry with no crash event in the log.
inline TrialReport summarize(const std::vector<ProprioFrame>& frames, const Goal& goal,
                             double battery_voltage, const ReferenceEnvelope& env,
                             double goal_radius = 0.5) {
  if (frames.empty()) throw Error("cannot summarize an empty log");
  if (!(battery_voltage > 0)) throw ConfigError("battery_voltage must be configured and positive");
  TrialReport r;
  double current = 0;
  double path = 0;
  bool crashed = false;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    current += f.current;
    if (k > 0) path += std::hypot(f.odom.x - frames[k - 1].odom.x, f.odom.y - frames[k - 1].odom.y);
    crashed = crashed || f.event == Event::Crash;
    if (!r.time_to_goal && std::hypot(f.odom.x - goal.x, f.odom.y - goal.y) <= goal_radius) {
      r.time_to_goal = f.t - frames.front().t;
    }
  }
  r.mean_power = current / static_cast<double>(frames.size()) * battery_voltage;
  const double duration = frames.back().t - frames.front().t;
  r.mean_velocity = duration > 0 ? path / duration : 0.0;
  r.success = r.time_to_goal.has_value() && !crashed;
  if (!r.success) r.time_to_goal.reset();
  r.vibration_cost = vibration_cost(frames, env);
  r.imu_energy = imu_energy(frames).total();
  return r;
}

struct AggregateReport {
  std::size_t trials = 0;
  double success_rate = 0;  // percent
  double mean_power = 0;
  std::optional<double> mean_power_successful;
  double mean_velocity = 0;
  std::optional<double> mean_time_to_goal;
  double vibration_cost = 0;
  double imu_energy = 0;
};

/// Means over all trials; power and time-to-goal also over successful trials.
inline AggregateReport aggregate(const std::vector<TrialReport>& trials) {
  AggregateReport a;
  a.trials = trials.size();
  if (trials.empty()) return a;
  const double n = static_cast<double>(trials.size());
  double ok = 0, power_ok = 0, ttg = 0;
  for (const auto& t : trials) {
    a.mean_power += t.mean_power / n;
    a.mean_velocity += t.mean_velocity / n;
    a.vibration_cost += t.vibration_cost / n;
    a.imu_energy += t.imu_energy / n;
    if (t.success) {
      ok += 1;
      power_ok += t.mean_power;
      ttg += *t.time_to_goal;
    }
  }
  a.success_rate = ok / n * 100.0;
  if (ok > 0) {
    a.mean_power_successful = power_ok / ok;
    a.mean_time_to_goal = ttg / ok;
  }
  return a;
}

/// Rows of metric,method,scenario,value.
inline void write_aggregate_csv(std::ostream& out, const AggregateReport& a,
                                const std::string& method, const std::string& scenario,
                                bool header = true) {
  if (header) out << "metric,method,scenario,value\n";
  auto row = [&](const char* metric, std::optional<double> v) {
    out << metric << ',' << method << ',' << scenario << ',';
    if (v) out << nlohmann::json(*v).dump();
    out << '\n';
  };
  row("success_rate", a.success_rate);
  row("mean_power", a.mean_power);
  row("mean_power_successful", a.mean_power_successful);
  row("mean_velocity", a.mean_velocity);
  row("time_to_goal", a.mean_time_to_goal);
  row("vibration_cost", a.vibration_cost);
  row("imu_energy", a.imu_energy);
}

}  // namespace pronav
