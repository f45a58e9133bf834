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
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/errors.hpp"
#include "pronav/types.hpp"

namespace pronav {

/// Maximum forward speed per gait. Only the ordering trot = amble > crawl is
/// fixed; the absolute values are robot specific.
struct VMaxTable {
  double trot = 1.0;
  double crawl = 0.4;
  double amble = 1.0;

  double operator()(Gait g) const {
    switch (g) {
      case Gait::Trot: return trot;
      case Gait::Crawl: return crawl;
      case Gait::Amble: return amble;
    }
    return 0.0;
  }
};

/// How a pipeline step contributes to the spike counter.
enum class SpikeMode { AnyLeg, PerLeg };

struct FeatureConfig {
  std::size_t window_n = 16;  // knee force samples
  std::size_t window_m = 16;  // hip position samples
  SpikeMode spike_mode = SpikeMode::AnyLeg;
  /// A leg spikes when delta < -spike_margin * |mu_rob|. Zero gives the bare
  /// sign test.
  double spike_margin = 0.1;
};

struct PolicyConfig {
  int d_min = 8;      // frames between gait changes (cases 3-4)
  int k_stable = 16;  // in-active frames before exclusions are cleared
  int k_exit = 16;    // consecutive out-of-active frames before cases 3-4 act
};

/// Global knobs, loadable from the JSON file named by PRONAV_CONFIG.
struct Config {
  FeatureConfig features;
  PolicyConfig policy;
  VMaxTable v_max;

  double chi2 = 5.991;         // terrain-gait ellipse level (95%, 2 dof)
  double gamma_chi2 = 13.82;   // initial safe-region level (99.9%, 2 dof)
  double gamma_inflation = 1.25;
  int gamma_max_inflations = 20;

  double crash_window_s = 3.0;
  double e_thresh = 0.7;
  std::size_t entrapment_window = 16;
  double v_min = 0.05;  // below this commanded speed no entrapment is scored

  double battery_voltage = 0.0;  // required by metrics; 0 means unset
  double goal_radius = 0.5;
  double v_rec = 0.2;
  double w_rec = 0.3;

  std::string stable_terrain = "solid-flat";
  std::vector<std::string> terrains = {"solid-flat", "granular", "poor-foothold",
                                       "high-resistance"};
};

inline void to_json(nlohmann::json& j, const Config& c) {
  j = nlohmann::json{
      {"window_n", c.features.window_n},
      {"window_m", c.features.window_m},
      {"spike_mode", c.features.spike_mode == SpikeMode::AnyLeg ? "any_leg" : "per_leg"},
      {"spike_margin", c.features.spike_margin},
      {"d_min", c.policy.d_min},
      {"k_stable", c.policy.k_stable},
      {"k_exit", c.policy.k_exit},
      {"v_max", {{"trot", c.v_max.trot}, {"crawl", c.v_max.crawl}, {"amble", c.v_max.amble}}},
      {"chi2", c.chi2},
      {"gamma_chi2", c.gamma_chi2},
      {"gamma_inflation", c.gamma_inflation},
      {"gamma_max_inflations", c.gamma_max_inflations},
      {"crash_window_s", c.crash_window_s},
      {"e_thresh", c.e_thresh},
      {"entrapment_window", c.entrapment_window},
      {"v_min", c.v_min},
      {"battery_voltage", c.battery_voltage},
      {"goal_radius", c.goal_radius},
      {"v_rec", c.v_rec},
      {"w_rec", c.w_rec},
      {"stable_terrain", c.stable_terrain},
      {"terrains", c.terrains},
  };
}

/// Missing keys keep their defaults; unknown keys are rejected so typos surface.
inline void from_json(const nlohmann::json& j, Config& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  auto get = [&](const char* key, auto& dst) {
    if (auto it = j.find(key); it != j.end()) it->get_to(dst);
  };
  static const std::vector<std::string> known = {
      "window_n", "window_m", "spike_mode", "spike_margin", "d_min", "k_stable",
      "k_exit", "v_max", "chi2", "gamma_chi2", "gamma_inflation",
      "gamma_max_inflations", "crash_window_s", "e_thresh", "entrapment_window",
      "v_min", "battery_voltage", "goal_radius", "v_rec", "w_rec",
      "stable_terrain", "terrains"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  try {
    get("window_n", c.features.window_n);
    get("window_m", c.features.window_m);
    if (auto it = j.find("spike_mode"); it != j.end()) {
      const auto mode = it->get<std::string>();
      if (mode == "any_leg") c.features.spike_mode = SpikeMode::AnyLeg;
      else if (mode == "per_leg") c.features.spike_mode = SpikeMode::PerLeg;
      else throw ConfigError("spike_mode must be any_leg or per_leg");
    }
    get("spike_margin", c.features.spike_margin);
    get("d_min", c.policy.d_min);
    get("k_stable", c.policy.k_stable);
    get("k_exit", c.policy.k_exit);
    if (auto it = j.find("v_max"); it != j.end()) {
      c.v_max.trot = it->value("trot", c.v_max.trot);
      c.v_max.crawl = it->value("crawl", c.v_max.crawl);
      c.v_max.amble = it->value("amble", c.v_max.amble);
    }
    get("chi2", c.chi2);
    get("gamma_chi2", c.gamma_chi2);
    get("gamma_inflation", c.gamma_inflation);
    get("gamma_max_inflations", c.gamma_max_inflations);
    get("crash_window_s", c.crash_window_s);
    get("e_thresh", c.e_thresh);
    get("entrapment_window", c.entrapment_window);
    get("v_min", c.v_min);
    get("battery_voltage", c.battery_voltage);
    get("goal_radius", c.goal_radius);
    get("v_rec", c.v_rec);
    get("w_rec", c.w_rec);
    get("stable_terrain", c.stable_terrain);
    get("terrains", c.terrains);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

inline void validate(const Config& c) {
  if (c.features.window_n < 2 || c.features.window_m < 2) {
    throw ConfigError("window_n and window_m must be at least 2");
  }
  if (c.features.spike_margin < 0) throw ConfigError("spike_margin must be >= 0");
  if (c.policy.d_min < 0 || c.policy.k_stable < 1 || c.policy.k_exit < 1) {
    throw ConfigError("d_min >= 0, k_stable >= 1 and k_exit >= 1 required");
  }
  if (!(c.v_max.trot > 0 && c.v_max.crawl > 0 && c.v_max.amble > 0)) {
    throw ConfigError("v_max entries must be positive");
  }
  if (!(c.chi2 > 0) || !(c.gamma_chi2 > 0) || !(c.gamma_inflation > 1.0)) {
    throw ConfigError("chi2 levels must be positive and gamma_inflation > 1");
  }
  if (!(c.crash_window_s > 0)) throw ConfigError("crash_window_s must be positive");
  if (c.entrapment_window < 8) throw ConfigError("entrapment_window must be >= 8 frames");
  if (std::find(c.terrains.begin(), c.terrains.end(), c.stable_terrain) == c.terrains.end()) {
    throw ConfigError("stable_terrain must be one of terrains");
  }
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  Config c = j.get<Config>();
  validate(c);
  return c;
}

/// Defaults, overridden by the file named in PRONAV_CONFIG when set.
inline Config config_from_env() {
  if (const char* path = std::getenv("PRONAV_CONFIG"); path && *path) {
    return load_config(path);
  }
  return Config{};
}

}  // namespace pronav
