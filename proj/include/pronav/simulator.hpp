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
#include <cstdint>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/fusion.hpp"
#include "pronav/types.hpp"

namespace pronav {

/// mt19937_64 with portable uniform and normal draws, so a seed yields the
/// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2 * std::numbers::pi * u2);
  }

  double normal(double stddev) { return stddev * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0;
};

/// Signal model of one gait on one terrain.
struct GaitSignalParams {
  double force_base = 100;     // knee force, N
  double force_noise = 0.8;    // N
  double spike_rate = 0;       // per leg, events/s
  double spike_magnitude = 18; // N, moved from the other three legs
  double load_shift = 0;       // N added to front legs and removed from rear legs
  double hip_amp_x = 0.02;     // m
  double hip_amp_y = 0.01;     // m
  double hip_drift = 0.0006;   // innovation std of the AR(1) hip drift, m
  double drift_memory = 0.9;   // AR(1) coefficient
  double stride_hz = 2.0;
  double current_mean = 7.0;   // A
  double current_std = 0.12;   // A
  double snag_rate = 0;        // current surges per second
  double snag_current = 0;     // A added during a surge
  double snag_duration = 1.0;  // s
  double hip_fy_std = 3.0;     // N
  double imu_std = 0.3;        // m/s^2
  double slip = 0.9;           // odometry speed / commanded speed

  friend bool operator==(const GaitSignalParams&, const GaitSignalParams&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GaitSignalParams, force_base, force_noise,
                                                spike_rate, spike_magnitude, load_shift,
                                                hip_amp_x, hip_amp_y, hip_drift, drift_memory,
                                                stride_hz, current_mean, current_std, snag_rate,
                                                snag_current, snag_duration, hip_fy_std, imu_std,
                                                slip)

struct TerrainParams {
  std::string terrain;
  std::array<GaitSignalParams, 3> gaits{};  // indexed by Gait

  const GaitSignalParams& operator[](Gait g) const { return gaits[static_cast<std::size_t>(g)]; }
  GaitSignalParams& operator[](Gait g) { return gaits[static_cast<std::size_t>(g)]; }
  friend bool operator==(const TerrainParams&, const TerrainParams&) = default;
};

using ParamTable = std::vector<TerrainParams>;

inline const TerrainParams& find_terrain(const ParamTable& table, const std::string& terrain) {
  for (const auto& t : table) {
    if (t.terrain == terrain) return t;
  }
  throw ConfigError("unknown terrain '" + terrain + "'");
}

/// Default synthetic table. Each terrain has a signature (spike rate, front/rear
/// load shift, hip amplitudes, current) and one well-suited gait. Off-gaits get
/// a variability multiplier that scales force noise, hip drift, current noise
/// and spike size. Magnitudes are synthetic, chosen so the qualitative
/// orderings hold: flat ground under trot is the tightest cluster, crawl
/// steadies granular ground, and crawl snags on high-resistance ground.
inline ParamTable default_param_table() {
  struct Signature {
    const char* terrain;
    double spike_rate, load_shift, amp_x, amp_y, current;
    Gait best;
    double off_gait;
  };
  static constexpr Signature sigs[] = {
      {"solid-flat", 0.05, 0.0, 0.020, 0.010, 7.0, Gait::Trot, 1.6},
      {"granular", 1.12, 0.0, 0.070, 0.020, 11.2, Gait::Crawl, 3.0},
      {"poor-foothold", 2.0, -4.0, 0.040, 0.010, 7.5, Gait::Amble, 3.0},
      {"high-resistance", 0.2, 7.0, 0.020, 0.045, 10.5, Gait::Amble, 3.0},
  };
  auto current_offset = [](Gait g) { return g == Gait::Crawl ? -0.4 : g == Gait::Amble ? 0.4 : 0.0; };
  auto stride = [](Gait g) { return g == Gait::Crawl ? 1.0 : g == Gait::Amble ? 1.5 : 2.0; };

  ParamTable table;
  for (const auto& s : sigs) {
    TerrainParams tp;
    tp.terrain = s.terrain;
    const bool resistive = std::string(s.terrain) == "high-resistance";
    for (Gait g : kAllGaits) {
      const double v = g == s.best ? 1.0 : s.off_gait;
      GaitSignalParams& p = tp[g];
      p.force_noise = 0.8 * v;
      p.spike_rate = s.spike_rate;
      if (std::string(s.terrain) == "granular" && g == Gait::Crawl) p.spike_rate *= 0.4;
      p.spike_magnitude = 14 + 4 * v;
      p.load_shift = s.load_shift;
      p.hip_drift = 0.0006 * v;
      p.hip_amp_x = std::max(s.amp_x - 4 * p.hip_drift, 0.002);
      const double amp_y = resistive && g != s.best ? 1.4 * s.amp_y : s.amp_y;
      p.hip_amp_y = std::max(amp_y - 4 * p.hip_drift, 0.002);
      p.stride_hz = stride(g);
      p.current_mean = s.current + current_offset(g);
      p.current_std = 0.12 * v;
      if (resistive && g == Gait::Crawl) {
        p.snag_rate = 0.5;
        p.snag_current = 4.0;
      } else if (resistive && g == Gait::Trot) {
        p.snag_rate = 0.2;
        p.snag_current = 4.0;
      }
      p.hip_fy_std = 2.5 + 0.5 * v;
      p.imu_std = 0.2 * v + 4 * (s.amp_x + s.amp_y);
    }
    table.push_back(tp);
  }
  return table;
}

inline nlohmann::ordered_json param_table_to_json(const ParamTable& table) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& t : table) {
    nlohmann::ordered_json tj = nlohmann::ordered_json::object();
    for (Gait g : kAllGaits) tj[std::string(to_string(g))] = nlohmann::json(t[g]);
    j[t.terrain] = tj;
  }
  return j;
}

inline ParamTable param_table_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("terrain params must be an object keyed by terrain");
  ParamTable table;
  for (const auto& [terrain, tj] : j.items()) {
    TerrainParams tp;
    tp.terrain = terrain;
    for (Gait g : kAllGaits) {
      auto it = tj.find(std::string(to_string(g)));
      if (it == tj.end()) {
        throw ConfigError("terrain params: " + terrain + " lacks gait " + std::string(to_string(g)));
      }
      try {
        tp[g] = it->get<GaitSignalParams>();
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("terrain params " + terrain + ": " + e.what());
      }
    }
    table.push_back(tp);
  }
  return table;
}

inline ParamTable load_param_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open terrain params " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("terrain params " + path + ": " + e.what());
  }
  return param_table_from_json(j);
}

/// Gradual loss of footing: spike rate, hip excursion, noise and current ramp
/// up from `onset` until the robot falls `crash_after` seconds later.
struct CrashDrift {
  double rate = 0.5;  // ramp growth per second
  double onset = 0;   // s from segment start
  double crash_after = 4.0;
};

/// One leg caught from `onset`: high lateral hip effort, no forward progress.
struct Entrapment {
  int leg = 1;
  double onset = 0;
  double duration = 1e9;
};

struct Segment {
  double duration = 0;
  std::string terrain;
  double v = 0;
  double w = 0;
  std::optional<CrashDrift> crash;
  std::optional<Entrapment> entrapment;
};

struct ScenarioScript {
  std::vector<Segment> segments;

  double duration() const {
    double d = 0;
    for (const auto& s : segments) d += s.duration;
    return d;
  }
};

inline ScenarioScript scenario_from_json(const nlohmann::json& j) {
  ScenarioScript script;
  try {
    for (const auto& sj : j.at("segments")) {
      Segment s;
      s.duration = sj.at("duration").get<double>();
      s.terrain = sj.at("terrain").get<std::string>();
      s.v = sj.value("v", 0.0);
      s.w = sj.value("w", 0.0);
      if (!(s.duration > 0)) throw SchemaError("scenario: segment duration must be positive");
      if (auto it = sj.find("inject"); it != sj.end() && !it->is_null()) {
        const auto type = it->at("type").get<std::string>();
        if (type == "crash_drift") {
          CrashDrift c;
          c.rate = it->value("rate", c.rate);
          c.onset = it->value("onset", c.onset);
          c.crash_after = it->value("crash_after", c.crash_after);
          s.crash = c;
        } else if (type == "entrapment") {
          Entrapment e;
          e.leg = it->value("leg", e.leg);
          e.onset = it->value("onset", e.onset);
          e.duration = it->value("duration", e.duration);
          LegId check(e.leg);
          (void)check;
          s.entrapment = e;
        } else {
          throw SchemaError("scenario: unknown injection '" + type + "'");
        }
      }
      script.segments.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  } catch (const Error& e) {
    if (dynamic_cast<const SchemaError*>(&e)) throw;
    throw SchemaError(std::string("scenario: ") + e.what());
  }
  if (script.segments.empty()) throw SchemaError("scenario: no segments");
  return script;
}

inline ScenarioScript load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("scenario " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

/// Injection state for the current frame.
struct Disturbance {
  double drift = 0;  // crash ramp level, 0 when inactive
  std::optional<LegId> entrapped;
};

/// Stepwise telemetry generator at the pipeline rate.
class Simulator {
 public:
  Simulator(ParamTable table, std::uint64_t seed) : table_(std::move(table)), rng_(seed) {}

  /// Produces the next frame. A command without a gait (halt) keeps the last
  /// stepping pattern in place with zero odometry.
  ProprioFrame step(const std::string& terrain, const RobotCommand& cmd,
                    const Disturbance& dist = {}) {
    const TerrainParams& tp = find_terrain(table_, terrain);
    if (cmd.gait) gait_ = *cmd.gait;
    const GaitSignalParams& p = tp[gait_];
    const double dt = 1.0 / kPipelineHz;
    const double r = std::max(0.0, dist.drift);

    ProprioFrame f;
    f.t = static_cast<double>(k_) * dt;
    f.gait_label = gait_;
    f.terrain_label = terrain;

    // Knee force: base with front/rear load shift, noise, and load-transfer spikes.
    const double spike_p = 1.0 - std::exp(-p.spike_rate * (1 + 3 * r) * dt);
    std::array<double, kNumLegs> spike{};
    double spike_total = 0;
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      if (rng_.bernoulli(spike_p)) {
        spike[i] = p.spike_magnitude * (1 + 0.2 * std::abs(rng_.normal()));
        spike_total += spike[i];
      }
    }
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      const double shift = (i < 2 ? 0.5 : -0.5) * p.load_shift;
      const double transfer = spike[i] - (spike_total - spike[i]) / 3.0;
      f.legs[i].knee_fz = p.force_base + shift + rng_.normal(p.force_noise * (1 + r)) + transfer;
    }

    // Hip oscillation plus AR(1) drift; diagonal pairs move in phase.
    static constexpr std::array<double, kNumLegs> leg_phase = {0, std::numbers::pi,
                                                               std::numbers::pi, 0};
    phase_ += 2 * std::numbers::pi * p.stride_hz * dt;
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      drift_x_[i] = p.drift_memory * drift_x_[i] + rng_.normal(p.hip_drift);
      drift_y_[i] = p.drift_memory * drift_y_[i] + rng_.normal(p.hip_drift);
      const double s = std::sin(phase_ + leg_phase[i]);
      LegSample& leg = f.legs[i];
      leg.hip_px = p.hip_amp_x * (1 + r) * s + drift_x_[i];
      leg.hip_py = p.hip_amp_y * (1 + r) * s + drift_y_[i];
      leg.knee_pz = -0.45 + 0.02 * std::cos(phase_ + leg_phase[i]);
      leg.hip_vx = (leg.hip_px - prev_[i].hip_px) / dt;
      leg.hip_vy = (leg.hip_py - prev_[i].hip_py) / dt;
      leg.knee_vz = (leg.knee_pz - prev_[i].knee_pz) / dt;
      leg.hip_fx = rng_.normal(2.0);
      leg.hip_fy = rng_.normal(p.hip_fy_std);
    }
    if (k_ == 0) {
      for (auto& leg : f.legs) leg.hip_vx = leg.hip_vy = leg.knee_vz = 0;
    }

    // Battery current with occasional snag surges.
    if (snag_left_ > 0) {
      --snag_left_;
    } else if (rng_.bernoulli(1.0 - std::exp(-p.snag_rate * dt))) {
      snag_left_ = static_cast<int>(std::lround(p.snag_duration * kPipelineHz));
    }
    f.current = p.current_mean + 1.5 * r + rng_.normal(p.current_std) +
                (snag_left_ > 0 ? p.snag_current : 0.0);

    f.imu.ax = rng_.normal(p.imu_std * (1 + r));
    f.imu.ay = rng_.normal(p.imu_std * (1 + r));
    f.imu.az = rng_.normal(p.imu_std * (1 + r));

    double slip = p.slip;
    if (dist.entrapped) {
      LegSample& leg = f.legs[dist.entrapped->slot()];
      leg.hip_fy = 30.0 + rng_.normal(p.hip_fy_std);
      slip = 0.0;
    }
    const double v = cmd.gait ? cmd.v * slip : 0.0;
    const double w = cmd.gait ? cmd.w * slip : 0.0;
    yaw_ += w * dt;
    x_ += v * std::cos(yaw_) * dt;
    y_ += v * std::sin(yaw_) * dt;
    f.odom = {x_, y_, yaw_, v, 0.0, w};

    for (std::size_t i = 0; i < kNumLegs; ++i) prev_[i] = f.legs[i];
    ++k_;
    return f;
  }

  Gait gait() const { return gait_; }

 private:
  ParamTable table_;
  Rng rng_;
  std::uint64_t k_ = 0;
  Gait gait_ = Gait::Trot;
  double phase_ = 0;
  std::array<double, kNumLegs> drift_x_{}, drift_y_{};
  std::array<LegSample, kNumLegs> prev_{};
  int snag_left_ = 0;
  double x_ = 0, y_ = 0, yaw_ = 0;
};

/// Chooses the command for each frame and sees each generated frame.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual RobotCommand command(double t, const Velocity& planned) = 0;
  virtual void observe(const ProprioFrame&) {}
};

class FixedGaitController : public Controller {
 public:
  explicit FixedGaitController(Gait g, VMaxTable v_max = {}) : gait_(g), v_max_(v_max) {}
  RobotCommand command(double, const Velocity& planned) override {
    const double lim = v_max_(gait_);
    return {std::clamp(planned.v, -lim, lim), planned.w, gait_, Mode::Normal};
  }

 private:
  Gait gait_;
  VMaxTable v_max_;
};

/// Runs a script frame by frame. Frames carry terrain and gait labels; the
/// first frame of an injection carries its event label and a crash ends the
/// stream.
inline std::vector<ProprioFrame> generate(const ParamTable& table, const ScenarioScript& script,
                                          Controller& controller, std::uint64_t seed) {
  for (const auto& seg : script.segments) find_terrain(table, seg.terrain);
  Simulator sim(table, seed);
  std::vector<ProprioFrame> frames;
  const double dt = 1.0 / kPipelineHz;
  std::uint64_t k = 0;
  for (const auto& seg : script.segments) {
    const auto count = static_cast<std::uint64_t>(std::llround(seg.duration * kPipelineHz));
    bool trapped_marked = false;
    for (std::uint64_t i = 0; i < count; ++i, ++k) {
      const double t = static_cast<double>(k) * dt;
      const double ts = static_cast<double>(i) * dt;
      Disturbance dist;
      bool crash_now = false;
      if (seg.crash && ts >= seg.crash->onset) {
        dist.drift = seg.crash->rate * (ts - seg.crash->onset);
        crash_now = ts >= seg.crash->onset + seg.crash->crash_after;
      }
      bool trap_now = false;
      if (seg.entrapment && ts >= seg.entrapment->onset &&
          ts < seg.entrapment->onset + seg.entrapment->duration) {
        dist.entrapped = LegId(seg.entrapment->leg);
        trap_now = !trapped_marked;
        trapped_marked = true;
      }
      const RobotCommand cmd = controller.command(t, {seg.v, seg.w});
      ProprioFrame f = sim.step(seg.terrain, cmd, dist);
      if (trap_now) f.event = Event::Entrapment;
      if (crash_now) f.event = Event::Crash;
      controller.observe(f);
      frames.push_back(std::move(f));
      if (crash_now) return frames;
    }
  }
  return frames;
}

struct LabeledLog {
  std::string terrain;
  Gait gait = Gait::Trot;
  std::vector<ProprioFrame> frames;
};

inline constexpr std::uint64_t kCorpusSeed = 20240601;

/// Calibration corpus: every (terrain, gait) pair walked for `seconds` at a
/// fixed gait, each with its own derived seed.
inline std::vector<LabeledLog> bundled_corpus(const ParamTable& table = default_param_table(),
                                              double seconds = 60.0,
                                              std::uint64_t seed = kCorpusSeed) {
  std::vector<LabeledLog> logs;
  std::uint64_t index = 0;
  for (const auto& tp : table) {
    for (Gait g : kAllGaits) {
      ScenarioScript script{{Segment{seconds, tp.terrain, 0.3, 0.0, {}, {}}}};
      FixedGaitController ctl(g);
      logs.push_back({tp.terrain, g, generate(table, script, ctl, seed + 7919 * index++)});
    }
  }
  return logs;
}

inline std::string corpus_file_name(const LabeledLog& log) {
  return log.terrain + "_" + std::string(to_string(log.gait)) + ".jsonl";
}

}  // namespace pronav
