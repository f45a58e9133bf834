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

#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/calibration.hpp"
#include "pronav/config.hpp"
#include "pronav/metrics.hpp"
#include "pronav/pipeline.hpp"
#include "pronav/plot.hpp"
#include "pronav/profile.hpp"
#include "pronav/simulator.hpp"
#include "pronav/telemetry.hpp"

namespace pronav {

/// Writes the calibration corpus as one JSONL file per (terrain, gait).
inline std::vector<std::string> cmd_corpus(const std::string& out_dir, const ParamTable& table,
                                           double seconds = 60.0,
                                           std::uint64_t seed = kCorpusSeed) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> files;
  for (const auto& log : bundled_corpus(table, seconds, seed)) {
    const auto path = (std::filesystem::path(out_dir) / corpus_file_name(log)).string();
    write_log(path, log.frames);
    files.push_back(path);
  }
  return files;
}

inline CalibrationResult cmd_calibrate(const std::string& logs_dir, const std::string& out,
                                       const Config& cfg) {
  auto result = calibrate(read_labeled_logs(logs_dir), cfg);
  save_profile(out, result.profile);
  return result;
}

inline std::unique_ptr<VelocitySource> parse_velocity_source(const std::string& spec) {
  if (spec.rfind("replay:", 0) == 0) {
    return std::make_unique<ReplayVelocity>(ReplayVelocity::from_file(spec.substr(7)));
  }
  if (spec.rfind("const:", 0) == 0) {
    const auto body = spec.substr(6);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw ConfigError("const velocity must be const:V,W");
    try {
      return std::make_unique<ConstantVelocity>(std::stod(body.substr(0, comma)),
                                                std::stod(body.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw ConfigError("const velocity must be const:V,W");
    }
  }
  throw ConfigError("velocity source must be replay:FILE or const:V,W");
}

/// Streams frames through the pipeline, writing one decision line per frame
/// after warm-up. Returns the number of decisions written.
inline std::size_t cmd_run(const CalibrationProfile& profile, const Config& cfg, std::istream& in,
                           VelocitySource& velocity, std::ostream& out) {
  Pipeline pipeline(profile, cfg);
  LogReader reader(in);
  ProprioFrame frame;
  std::size_t written = 0;
  while (reader.next(frame)) {
    if (auto rec = pipeline.process(frame, velocity.at(frame.t))) {
      out << serialize_decision(*rec) << '\n';
      ++written;
    }
  }
  return written;
}

struct SimulateOptions {
  std::uint64_t seed = 1;
  std::optional<Gait> fixed_gait = Gait::Trot;
  std::optional<CalibrationProfile> profile;  // closed loop when set
};

inline std::vector<ProprioFrame> cmd_simulate(const ScenarioScript& script, const ParamTable& table,
                                              const Config& cfg, const SimulateOptions& opt,
                                              const std::string& out) {
  std::vector<ProprioFrame> frames;
  if (opt.profile) {
    ClosedLoopController ctl(*opt.profile, cfg);
    frames = generate(table, script, ctl, opt.seed);
  } else {
    FixedGaitController ctl(opt.fixed_gait.value_or(Gait::Trot), cfg.v_max);
    frames = generate(table, script, ctl, opt.seed);
  }
  write_log(out, frames);
  return frames;
}

struct EvaluateOptions {
  Goal goal;
  std::string method = "pronav";
  std::string scenario = "default";
};

/// One trial per (log, decisions) pair; writes a JSON report and a CSV table.
inline AggregateReport cmd_evaluate(const std::vector<std::string>& logs,
                                    const std::vector<std::string>& decisions,
                                    const CalibrationProfile& profile, const Config& cfg,
                                    const EvaluateOptions& opt, const std::string& out_json,
                                    const std::string& out_csv) {
  if (logs.size() != decisions.size()) {
    throw SchemaError("evaluate needs one decision file per log");
  }
  const std::size_t warm =
      std::max(profile.features.window_n, profile.features.window_m) - 1;
  std::vector<TrialReport> trials;
  nlohmann::ordered_json report;
  report["method"] = opt.method;
  report["scenario"] = opt.scenario;
  report["trials"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto frames = read_log(logs[i]);
    const auto dec = read_decisions(decisions[i]);
    const std::size_t expected = frames.size() > warm ? frames.size() - warm : 0;
    if (dec.size() != expected) {
      throw SchemaError(decisions[i] + " has " + std::to_string(dec.size()) +
                        " decisions, expected " + std::to_string(expected) + " for " + logs[i]);
    }
    trials.push_back(summarize(frames, opt.goal, cfg.battery_voltage, profile.envelope,
                               cfg.goal_radius));
    auto tj = to_json(trials.back());
    tj["log"] = logs[i];
    report["trials"].push_back(tj);
  }
  const AggregateReport agg = aggregate(trials);
  report["aggregate"] = {
      {"trials", agg.trials},
      {"success_rate", agg.success_rate},
      {"mean_power", agg.mean_power},
      {"mean_power_successful",
       agg.mean_power_successful ? nlohmann::ordered_json(*agg.mean_power_successful) : nlohmann::ordered_json()},
      {"mean_velocity", agg.mean_velocity},
      {"time_to_goal",
       agg.mean_time_to_goal ? nlohmann::ordered_json(*agg.mean_time_to_goal) : nlohmann::ordered_json()},
      {"vibration_cost", agg.vibration_cost},
      {"imu_energy", agg.imu_energy}};
  std::ofstream(out_json) << report.dump(2) << '\n';
  std::ofstream csv(out_csv);
  write_aggregate_csv(csv, agg, opt.method, opt.scenario);
  return agg;
}

inline std::string companion_csv_path(const std::string& svg_path) {
  return std::filesystem::path(svg_path).replace_extension(".csv").string();
}

inline void cmd_plot(const CalibrationProfile& profile, const std::string& decisions,
                     const std::string& out_svg) {
  const auto points = read_decisions(decisions);
  std::ofstream svg(out_svg);
  std::ofstream csv(companion_csv_path(out_svg));
  if (!svg || !csv) throw Error("cannot write plot " + out_svg);
  render_svg(svg, csv, profile, points);
}

}  // namespace pronav
