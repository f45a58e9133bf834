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
#include <cstddef>
#include <optional>

#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/telemetry.hpp"
#include "pronav/types.hpp"

namespace pronav {

inline constexpr std::size_t kFeatureDim = 9;

/// Slots of the feature vector, in storage order.
enum FeatureIndex : std::size_t {
  kDelta1 = 0,
  kDelta2,
  kDelta3,
  kDelta4,
  kDeltaSum,
  kSpikeCount,
  kSpreadX,
  kSpreadY,
  kCurrent,
};

struct ForceStats {
  std::array<double, kNumLegs> mu_leg{};
  double mu_rob = 0;
  std::array<double, kNumLegs> delta{};
  double delta_sum = 0;
  int spike_count = 0;
  int spike_now = 0;  // this step's contribution to spike_count
};

struct PositionSpread {
  double omega_x = 0;
  double omega_y = 0;
};

struct FeatureVector {
  std::array<double, kFeatureDim> a{};

  double& operator[](std::size_t i) { return a[i]; }
  double operator[](std::size_t i) const { return a[i]; }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Spike contribution of one step given the current deltas.
inline int spike_contribution(const std::array<double, kNumLegs>& delta, double mu_rob,
                              const FeatureConfig& cfg) {
  const double limit = -cfg.spike_margin * std::abs(mu_rob);
  int legs = 0;
  for (double d : delta) legs += d < limit ? 1 : 0;
  if (cfg.spike_mode == SpikeMode::PerLeg) return legs;
  return legs > 0 ? 1 : 0;
}

/// `windows` holds each leg's last n knee forces (any type with size(),
/// capacity() and operator[]); `prior_spikes` holds earlier step contributions,
/// of which the newest n-1 are counted together with this step.
template <typename Window, typename History>
ForceStats force_stats(const std::array<Window, kNumLegs>& windows,
                       const std::array<double, kNumLegs>& current_sample,
                       const History& prior_spikes, const FeatureConfig& cfg) {
  const std::size_t n = cfg.window_n;
  ForceStats s;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (windows[i].size() != n) {
      throw NotWarm("knee force window of leg " + std::to_string(i + 1) + " holds " +
                    std::to_string(windows[i].size()) + " of " + std::to_string(n) + " samples");
    }
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += windows[i][k];
    s.mu_leg[i] = sum / static_cast<double>(n);
  }
  s.mu_rob = (s.mu_leg[0] + s.mu_leg[1] + s.mu_leg[2] + s.mu_leg[3]) / 4.0;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    s.delta[i] = s.mu_rob - current_sample[i];
    s.delta_sum += s.delta[i];
  }
  s.spike_now = spike_contribution(s.delta, s.mu_rob, cfg);
  s.spike_count = s.spike_now;
  const std::size_t have = prior_spikes.size();
  const std::size_t take = std::min(have, n - 1);
  for (std::size_t k = have - take; k < have; ++k) s.spike_count += prior_spikes[k];
  return s;
}

template <typename Window>
PositionSpread position_spread(const std::array<Window, kNumLegs>& x_windows,
                               const std::array<Window, kNumLegs>& y_windows, std::size_t m) {
  auto range = [m](const Window& w, const char* axis, std::size_t leg) {
    if (w.size() != m) {
      throw NotWarm(std::string("hip ") + axis + " window of leg " + std::to_string(leg + 1) +
                    " holds " + std::to_string(w.size()) + " of " + std::to_string(m) +
                    " samples");
    }
    double lo = w[0], hi = w[0];
    for (std::size_t k = 1; k < m; ++k) {
      lo = std::min(lo, w[k]);
      hi = std::max(hi, w[k]);
    }
    return hi - lo;
  };
  PositionSpread s;
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    s.omega_x += range(x_windows[i], "x", i);
    s.omega_y += range(y_windows[i], "y", i);
  }
  return s;
}

inline FeatureVector assemble(const ForceStats& stats, const PositionSpread& spread,
                              double current) {
  FeatureVector v;
  for (std::size_t i = 0; i < kNumLegs; ++i) v[kDelta1 + i] = stats.delta[i];
  v[kDeltaSum] = stats.delta_sum;
  v[kSpikeCount] = static_cast<double>(stats.spike_count);
  v[kSpreadX] = spread.omega_x;
  v[kSpreadY] = spread.omega_y;
  v[kCurrent] = current;
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    if (!std::isfinite(v[i])) {
      throw SignalQualityError("non-finite feature at index " + std::to_string(i));
    }
  }
  return v;
}

/// Streaming feature stage. Emits nothing until both the force and position
/// windows are full. The spike count only covers steps since the force window
/// filled.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureConfig& cfg = {})
      : cfg_(cfg), window_(cfg.window_n, cfg.window_m), spikes_(cfg.window_n) {}

  std::optional<FeatureVector> push(const ProprioFrame& frame) {
    for (const auto& leg : frame.legs) {
      if (!std::isfinite(leg.knee_fz) || !std::isfinite(leg.hip_px) ||
          !std::isfinite(leg.hip_py)) {
        throw SignalQualityError("non-finite joint signal at t=" + std::to_string(frame.t));
      }
    }
    window_.push(frame);
    if (window_.force_fill() < cfg_.window_n) return std::nullopt;
    std::array<double, kNumLegs> now{};
    for (std::size_t i = 0; i < kNumLegs; ++i) now[i] = frame.legs[i].knee_fz;
    const ForceStats stats = force_stats(window_.knee_fz(), now, spikes_, cfg_);
    spikes_.push(stats.spike_now);
    if (window_.position_fill() < cfg_.window_m) return std::nullopt;
    const PositionSpread spread =
        position_spread(window_.hip_px(), window_.hip_py(), cfg_.window_m);
    return assemble(stats, spread, frame.current);
  }

  void reset() {
    window_.clear();
    spikes_.clear();
  }

  const FeatureConfig& config() const { return cfg_; }

 private:
  FeatureConfig cfg_;
  SignalWindow window_;
  RingBuffer<int> spikes_;
};

}  // namespace pronav
