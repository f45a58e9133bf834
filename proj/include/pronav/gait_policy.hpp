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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pronav/config.hpp"
#include "pronav/terrain_model.hpp"

namespace pronav {

enum class GaitCase : std::uint8_t { InLVZ, InActive, InSZ_MinArea, OutSZ_MinDist, OutGammaSafe };

inline std::string_view to_string(GaitCase c) {
  switch (c) {
    case GaitCase::InLVZ: return "InLVZ";
    case GaitCase::InActive: return "InActive";
    case GaitCase::InSZ_MinArea: return "InSZ_MinArea";
    case GaitCase::OutSZ_MinDist: return "OutSZ_MinDist";
    case GaitCase::OutGammaSafe: return "OutGammaSafe";
  }
  return "?";
}

/// Indices refer to ZoneSet::sz; bit i of `excluded` marks sz[i] as removed.
struct PolicyState {
  std::size_t active = 0;
  std::optional<Gait> gait = Gait::Trot;  // empty while halted
  Gait last_gait = Gait::Trot;            // gait held before the current halt, if any
  std::uint32_t excluded = 0;
  int dwell = 0;
  int stable_streak = 0;
  int exit_streak = 0;

  bool is_excluded(std::size_t i) const { return (excluded >> i) & 1u; }
  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

struct GaitDecision {
  double t = 0;
  PcaPoint p;
  std::optional<Gait> gait;
  std::string active_ellipse;
  GaitCase gait_case = GaitCase::InLVZ;
  Mode mode = Mode::Normal;
  bool suppressed = false;  // cases 3-4 only: the switch was held back
};

inline constexpr std::size_t kMaxZones = 32;

inline PolicyState init_policy(const ZoneSet& zones) {
  if (zones.sz.empty() || zones.sz.size() > kMaxZones) {
    throw CalibrationError("stable zone must hold 1 to 32 ellipses");
  }
  return PolicyState{};
}

namespace detail {

inline std::uint32_t bit(std::size_t i) { return std::uint32_t{1} << i; }

/// Smallest-area stable-zone ellipse containing p outside `mask`; ties go to
/// the lower-current gait.
inline std::optional<std::size_t> min_area_containing(const ZoneSet& z, const PcaPoint& p,
                                                      std::uint32_t mask) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < z.sz.size(); ++i) {
    if ((mask & bit(i)) || !contains(z.sz[i], p)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = z.sz[i];
    const auto& b = z.sz[*best];
    if (a.area < b.area || (a.area == b.area && current_rank(a.gait) < current_rank(b.gait))) {
      best = i;
    }
  }
  return best;
}

/// Nearest (Mahalanobis) non-LVZ ellipse outside `mask`; ties go to the
/// smaller area.
inline std::optional<std::size_t> min_distance(const ZoneSet& z, const PcaPoint& p,
                                               std::uint32_t mask) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < z.sz.size(); ++i) {
    if (mask & bit(i)) continue;
    const double d = mahalanobis2(z.sz[i], p);
    if (!best || d < best_d || (d == best_d && z.sz[i].area < z.sz[*best].area)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace detail

/// One transition of the gait state machine. Pure: the same (state, p, zones,
/// cfg) always yields the same result.
inline std::pair<PolicyState, GaitDecision> policy_step(const PolicyState& state,
                                                        const PcaPoint& p, const ZoneSet& zones,
                                                        const PolicyConfig& cfg, double t = 0) {
  PolicyState next = state;
  if (next.dwell < std::numeric_limits<int>::max()) ++next.dwell;
  GaitDecision d;
  d.t = t;
  d.p = p;

  auto finish = [&](GaitCase c) {
    d.gait_case = c;
    d.gait = next.gait;
    d.active_ellipse = zones.sz[next.active].id;
    d.mode = next.gait ? Mode::Normal : Mode::Halt;
    return std::pair{next, d};
  };
  auto hold_gait = [&](Gait g) {
    if (g != next.last_gait) next.dwell = 0;
    next.gait = g;
    next.last_gait = g;
  };

  if (!contains(zones.gamma_safe, p)) {
    next.gait.reset();
    next.stable_streak = 0;
    next.exit_streak = 0;
    return finish(GaitCase::OutGammaSafe);
  }

  if (contains(zones.lvz(), p)) {
    next.stable_streak = state.active == 0 ? state.stable_streak + 1 : 0;
    next.active = 0;
    next.excluded = 0;
    next.exit_streak = 0;
    hold_gait(Gait::Trot);
    return finish(GaitCase::InLVZ);
  }

  if (contains(zones.sz[state.active], p)) {
    next.stable_streak = state.stable_streak + 1;
    next.exit_streak = 0;
    if (next.stable_streak >= cfg.k_stable) next.excluded = 0;
    hold_gait(zones.sz[state.active].gait);
    return finish(GaitCase::InActive);
  }

  next.stable_streak = 0;
  next.exit_streak = state.exit_streak + 1;
  std::uint32_t mask = state.excluded;
  if (state.active != 0) mask |= detail::bit(state.active);

  GaitCase c;
  std::optional<std::size_t> pick;
  if (detail::min_area_containing(zones, p, 0)) {
    c = GaitCase::InSZ_MinArea;
    pick = detail::min_area_containing(zones, p, mask);
    if (!pick) {
      mask = 0;
      pick = detail::min_area_containing(zones, p, mask);
    }
  } else {
    c = GaitCase::OutSZ_MinDist;
    pick = detail::min_distance(zones, p, mask);
    if (!pick) {
      mask = 0;
      pick = detail::min_distance(zones, p, mask);
    }
    if (!pick) pick = 0;  // stable zone with a single ellipse
  }

  const Gait wanted = zones.sz[*pick].gait;
  const bool confirmed = next.exit_streak >= cfg.k_exit;
  const bool dwell_ok = wanted == state.last_gait || next.dwell >= cfg.d_min;
  if (!confirmed || !dwell_ok) {
    d.suppressed = true;
    next.gait = state.last_gait;
    return finish(c);
  }
  next.active = *pick;
  next.excluded = mask & ~detail::bit(*pick) & ~detail::bit(0);
  next.exit_streak = 0;
  hold_gait(wanted);
  return finish(c);
}

}  // namespace pronav
