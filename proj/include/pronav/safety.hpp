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
#include <optional>

#include "pronav/projection.hpp"
#include "pronav/terrain_model.hpp"
#include "pronav/types.hpp"

namespace pronav {

struct CrashPredictorConfig {
  double window_s = 3.0;
  double pc2_threshold = 1.0;  // pc2 shift that maps to risk 1
};

struct CrashAssessment {
  double risk = 0;
  bool halt = false;
  bool warm = false;  // history spans the full window
};

/// Risk from the pc2 offset between the recent history and the active
/// ellipse's center. Leaving the safe region forces risk 1.
/// `history` is any container with size() and operator[], oldest first.
template <typename History>
CrashAssessment crash_risk(const History& history, const ZoneSet& zones, std::size_t active,
                           const CrashPredictorConfig& cfg, double hz = kPipelineHz) {
  CrashAssessment out;
  const std::size_t n = history.size();
  if (n == 0) return out;
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += history[i].pc2;
  const double shift = std::abs(sum / static_cast<double>(n) - zones.sz[active].mean().y());
  out.risk = std::min(1.0, shift / cfg.pc2_threshold);
  if (!contains(zones.gamma_safe, history[n - 1])) out.risk = 1.0;
  out.halt = out.risk >= 1.0;
  out.warm = static_cast<double>(n) >= std::floor(cfg.window_s * hz);
  return out;
}

/// Product of the pc1 and pc2 population standard deviations over the history.
template <typename History>
double instability_index(const History& history) {
  const std::size_t n = history.size();
  if (n < 2) return 0;
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += history[i].pc1;
    m2 += history[i].pc2;
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  double v1 = 0, v2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v1 += (history[i].pc1 - m1) * (history[i].pc1 - m1);
    v2 += (history[i].pc2 - m2) * (history[i].pc2 - m2);
  }
  return std::sqrt(v1 / static_cast<double>(n)) * std::sqrt(v2 / static_cast<double>(n));
}

struct EntrapmentConfig {
  double f_ref = 1.0;   // hip_fy RMS that counts as full effort (N)
  double v_min = 0.05;  // commanded speed below which no motion is attempted
  double e_thresh = 0.7;
  std::size_t min_frames = 8;
};

struct EntrapmentScore {
  std::array<double, kNumLegs> e{};

  double max() const { return *std::max_element(e.begin(), e.end()); }
  LegId argmax() const {
    return LegId::from_slot(static_cast<std::size_t>(std::max_element(e.begin(), e.end()) - e.begin()));
  }
};

/// Per-leg score: hip-Y effort times the shortfall of odometry speed against
/// the commanded speed. `frames` is oldest first.
template <typename Frames>
EntrapmentScore entrapment_scores(const Frames& frames, double v_cmd, double /*w_cmd*/,
                                  const EntrapmentConfig& cfg) {
  EntrapmentScore s;
  const std::size_t n = frames.size();
  const double speed_cmd = std::abs(v_cmd);
  if (n < cfg.min_frames || speed_cmd < cfg.v_min) return s;
  double speed = 0;
  std::array<double, kNumLegs> ss{};
  for (std::size_t k = 0; k < n; ++k) {
    const ProprioFrame& f = frames[k];
    speed += f.odom.speed();
    for (std::size_t i = 0; i < kNumLegs; ++i) ss[i] += f.legs[i].hip_fy * f.legs[i].hip_fy;
  }
  const double progress = std::min(1.0, speed / static_cast<double>(n) / speed_cmd);
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const double rms = std::sqrt(ss[i] / static_cast<double>(n));
    const double activity = std::min(1.0, rms / cfg.f_ref);
    s.e[i] = std::clamp(activity * (1.0 - progress), 0.0, 1.0);
  }
  return s;
}

struct SafetyVerdict {
  double crash_risk = 0;
  bool halt = false;
  std::optional<LegId> entrapped_leg;
  std::optional<RecoveryCommand> recovery_cmd;
  Mode mode = Mode::Normal;
};

inline RecoveryCommand recovery_for(LegId leg) {
  return leg.is_left() ? RecoveryCommand::ReverseLeft : RecoveryCommand::ReverseRight;
}

/// Halt beats recovery; recovery fires when any leg score exceeds e_thresh.
inline SafetyVerdict select_mode(const EntrapmentScore& scores, const CrashAssessment& crash,
                                 double e_thresh) {
  SafetyVerdict v;
  v.crash_risk = crash.risk;
  if (crash.halt) {
    v.halt = true;
    v.mode = Mode::Halt;
    return v;
  }
  if (scores.max() > e_thresh) {
    const LegId leg = scores.argmax();
    v.entrapped_leg = leg;
    v.recovery_cmd = recovery_for(leg);
    v.mode = Mode::Recovery;
  }
  return v;
}

}  // namespace pronav
