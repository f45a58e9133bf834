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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pronav/config.hpp"
#include "pronav/features.hpp"
#include "pronav/fusion.hpp"
#include "pronav/gait_policy.hpp"
#include "pronav/profile.hpp"
#include "pronav/safety.hpp"
#include "pronav/simulator.hpp"
#include "pronav/telemetry.hpp"

namespace pronav {

/// One line of the decision stream.
struct DecisionRecord {
  GaitDecision decision;
  SafetyVerdict verdict;
  EntrapmentScore scores;
  RobotCommand command;
  double instability = 0;
};

inline nlohmann::ordered_json to_json(const DecisionRecord& r) {
  const auto& d = r.decision;
  nlohmann::ordered_json j;
  j["t"] = d.t;
  j["pc1"] = d.p.pc1;
  j["pc2"] = d.p.pc2;
  j["gait"] = d.gait ? nlohmann::ordered_json(to_string(*d.gait)) : nlohmann::ordered_json();
  j["active_ellipse"] = d.active_ellipse;
  j["case"] = to_string(d.gait_case);
  j["mode"] = to_string(r.verdict.mode);
  j["crash_risk"] = r.verdict.crash_risk;
  j["halt"] = r.verdict.halt;
  j["e"] = r.scores.e;
  j["recovery"] = r.verdict.recovery_cmd
                      ? nlohmann::ordered_json(to_string(*r.verdict.recovery_cmd))
                      : nlohmann::ordered_json();
  j["v"] = r.command.v;
  j["w"] = r.command.w;
  j["suppressed"] = d.suppressed;
  j["instability"] = r.instability;
  return j;
}

inline std::string serialize_decision(const DecisionRecord& r) { return to_json(r).dump(); }

/// Subset of a decision line needed for plotting and evaluation.
struct DecisionPoint {
  double t = 0;
  PcaPoint p;
  std::optional<Gait> gait;
  Mode mode = Mode::Normal;
};

inline std::vector<DecisionPoint> read_decisions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open decisions " + path);
  std::vector<DecisionPoint> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DecisionPoint d;
      d.t = j.at("t").get<double>();
      d.p = {j.at("pc1").get<double>(), j.at("pc2").get<double>()};
      if (!j.at("gait").is_null()) {
        auto g = gait_from_string(j.at("gait").get<std::string>());
        if (!g) throw SchemaError("unknown gait");
        d.gait = *g;
      }
      const auto mode = j.at("mode").get<std::string>();
      d.mode = mode == "halt" ? Mode::Halt : mode == "recovery" ? Mode::Recovery : Mode::Normal;
      out.push_back(d);
    } catch (const std::exception& e) {
      throw SchemaError(path + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

/// Streaming per-frame chain: features, projection, gait policy, safety,
/// and fusion with the planner velocity.
class Pipeline {
 public:
  Pipeline(const CalibrationProfile& profile, const Config& cfg)
      : zones_(profile.zones()),
        pca_(profile.pca),
        policy_cfg_(cfg.policy),
        crash_cfg_{profile.crash_window_s, profile.pc2_threshold},
        trap_cfg_{profile.f_ref, cfg.v_min, cfg.e_thresh, 8},
        fusion_cfg_{cfg.v_max, cfg.v_rec, cfg.w_rec},
        extractor_(profile.features),
        state_(init_policy(zones_)),
        history_(static_cast<std::size_t>(std::floor(profile.crash_window_s * kPipelineHz))),
        recent_(cfg.entrapment_window) {
    last_cmd_ = fuse({}, gait_, verdict_, fusion_cfg_);
  }

  /// Command for the given planner velocity under the latest decision.
  RobotCommand command_for(const Velocity& planned) const {
    return fuse(planned, gait_, verdict_, fusion_cfg_);
  }

  /// Consumes one frame. Returns nothing while the feature windows warm up.
  std::optional<DecisionRecord> process(const ProprioFrame& frame, const Velocity& planned) {
    recent_.push(frame);
    const auto a = extractor_.push(frame);
    if (!a) {
      last_cmd_ = command_for(planned);
      return std::nullopt;
    }
    DecisionRecord rec;
    const PcaPoint p = project(pca_, *a);
    auto [next, decision] = policy_step(state_, p, zones_, policy_cfg_, frame.t);
    // The pc2 baseline restarts whenever a different ellipse becomes active,
    // and the threshold scales with that ellipse's pc2 spread.
    if (next.active != state_.active) history_.clear();
    state_ = next;
    history_.push(p);
    CrashPredictorConfig crash_cfg = crash_cfg_;
    crash_cfg.pc2_threshold *= pc2_spread(state_.active) / pc2_spread(0);
    const CrashAssessment crash = crash_risk(history_, zones_, state_.active, crash_cfg);
    rec.scores = entrapment_scores(recent_, last_cmd_.v, last_cmd_.w, trap_cfg_);
    rec.verdict = select_mode(rec.scores, crash, trap_cfg_.e_thresh);
    gait_ = decision.gait;
    verdict_ = rec.verdict;
    if (rec.verdict.mode == Mode::Recovery && last_cmd_.mode != Mode::Recovery) ++entrapments_;
    rec.command = last_cmd_ = command_for(planned);
    rec.decision = std::move(decision);
    rec.instability = instability_index(history_);
    return rec;
  }

  double pc2_spread(std::size_t i) const { return std::sqrt(zones_.sz[i].cov()(1, 1)); }

  const PolicyState& state() const { return state_; }
  const ZoneSet& zones() const { return zones_; }
  const RobotCommand& last_command() const { return last_cmd_; }
  /// Number of times recovery mode was entered.
  int entrapment_episodes() const { return entrapments_; }

 private:
  ZoneSet zones_;
  PcaModel pca_;
  PolicyConfig policy_cfg_;
  CrashPredictorConfig crash_cfg_;
  EntrapmentConfig trap_cfg_;
  FusionConfig fusion_cfg_;
  FeatureExtractor extractor_;
  PolicyState state_;
  RingBuffer<PcaPoint> history_;
  RingBuffer<ProprioFrame> recent_;
  std::optional<Gait> gait_ = Gait::Trot;
  SafetyVerdict verdict_;
  RobotCommand last_cmd_;
  int entrapments_ = 0;
};

/// Closes the loop between a simulator and the pipeline.
class ClosedLoopController : public Controller {
 public:
  ClosedLoopController(const CalibrationProfile& profile, const Config& cfg)
      : pipeline_(profile, cfg) {}

  RobotCommand command(double, const Velocity& planned) override {
    planned_ = planned;
    return pipeline_.command_for(planned);
  }

  void observe(const ProprioFrame& frame) override {
    if (auto rec = pipeline_.process(frame, planned_)) records_.push_back(std::move(*rec));
  }

  const std::vector<DecisionRecord>& records() const { return records_; }
  const Pipeline& pipeline() const { return pipeline_; }

 private:
  Pipeline pipeline_;
  Velocity planned_;
  std::vector<DecisionRecord> records_;
};

}  // namespace pronav
