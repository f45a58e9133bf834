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
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pronav/config.hpp"
#include "pronav/features.hpp"
#include "pronav/metrics.hpp"
#include "pronav/profile.hpp"
#include "pronav/projection.hpp"
#include "pronav/simulator.hpp"
#include "pronav/telemetry.hpp"
#include "pronav/terrain_model.hpp"

namespace pronav {

/// Linear-interpolated percentile, q in [0, 100].
inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw Error("percentile of an empty set");
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Splits labeled logs into runs of constant (terrain, gait) label. Frames
/// without both labels are dropped.
inline std::vector<LabeledLog> split_by_label(const std::vector<ProprioFrame>& frames) {
  std::vector<LabeledLog> runs;
  for (const auto& f : frames) {
    if (!f.terrain_label || !f.gait_label) continue;
    if (runs.empty() || runs.back().terrain != *f.terrain_label ||
        runs.back().gait != *f.gait_label) {
      runs.push_back({*f.terrain_label, *f.gait_label, {}});
    }
    runs.back().frames.push_back(f);
  }
  return runs;
}

/// Reads every *.jsonl file of a directory in name order.
inline std::vector<LabeledLog> read_labeled_logs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LabeledLog> runs;
  for (const auto& file : files) {
    auto part = split_by_label(read_log(file.string()));
    runs.insert(runs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return runs;
}

struct CalibrationResult {
  CalibrationProfile profile;
  Warnings warnings;
  /// Projected calibration points per ellipse id.
  std::map<std::string, std::vector<PcaPoint>> clusters;
};

inline bool has_crash(const LabeledLog& run) {
  return std::any_of(run.frames.begin(), run.frames.end(),
                     [](const auto& f) { return f.event == Event::Crash; });
}

/// Fits the full profile. Runs containing a crash event only inform the crash
/// threshold; every other run feeds the PCA, ellipses, and reference values.
inline CalibrationResult calibrate(const std::vector<LabeledLog>& runs, const Config& cfg) {
  CalibrationResult out;
  CalibrationProfile& prof = out.profile;
  prof.features = cfg.features;
  prof.crash_window_s = cfg.crash_window_s;

  struct Run {
    const LabeledLog* log;
    std::vector<FeatureVector> features;
    std::vector<std::size_t> frame_index;  // frame behind each feature
  };
  auto extract = [&](const LabeledLog& log) {
    Run r{&log, {}, {}};
    FeatureExtractor fx(cfg.features);
    for (std::size_t i = 0; i < log.frames.size(); ++i) {
      if (auto a = fx.push(log.frames[i])) {
        r.features.push_back(*a);
        r.frame_index.push_back(i);
      }
    }
    return r;
  };

  std::vector<Run> normal, crashed;
  for (const auto& log : runs) {
    if (std::find(cfg.terrains.begin(), cfg.terrains.end(), log.terrain) == cfg.terrains.end()) {
      throw CalibrationError("log terrain '" + log.terrain + "' is not a configured terrain");
    }
    (has_crash(log) ? crashed : normal).push_back(extract(log));
  }

  std::vector<FeatureVector> all;
  for (const auto& r : normal) all.insert(all.end(), r.features.begin(), r.features.end());
  prof.pca = fit_pca(all, &out.warnings);

  for (const auto& r : normal) {
    auto& pts = out.clusters[ellipse_id(r.log->terrain, r.log->gait)];
    for (const auto& a : r.features) pts.push_back(project(prof.pca, a));
  }
  for (const auto& terrain : cfg.terrains) {
    for (Gait g : kAllGaits) {
      const auto id = ellipse_id(terrain, g);
      auto it = out.clusters.find(id);
      if (it == out.clusters.end()) throw CalibrationError("missing calibration pair " + id);
      prof.ellipses.push_back(
          fit_ellipse(it->second, terrain, g, cfg.chi2, cfg.v_max(g), &out.warnings));
    }
  }

  const auto sz = select_high_stability(prof.ellipses, cfg.terrains, cfg.stable_terrain);
  prof.lvz_id = sz.front().id;
  std::vector<PcaPoint> pooled;
  for (const auto& e : sz) {
    prof.sz_ids.push_back(e.id);
    const auto& pts = out.clusters.at(e.id);
    pooled.insert(pooled.end(), pts.begin(), pts.end());
  }
  prof.gamma_safe =
      build_gamma_safe(pooled, sz, cfg.gamma_chi2, cfg.gamma_inflation, cfg.gamma_max_inflations);

  const TerrainGaitEllipse& lvz = sz.front();
  prof.pc2_threshold = 3.0 * std::sqrt(lvz.cov()(1, 1));
  prof.instability_threshold = 9.0 * std::sqrt(lvz.cov()(0, 0) * lvz.cov()(1, 1));

  // Crash-labeled runs: pc2 shift of the trailing window against the run's
  // own cluster center over the frames preceding each crash.
  std::vector<double> shifts;
  const auto window = static_cast<std::size_t>(std::floor(cfg.crash_window_s * kPipelineHz));
  for (const auto& r : crashed) {
    const auto id = ellipse_id(r.log->terrain, r.log->gait);
    const double center = prof.ellipse(id).mean().y();
    std::vector<double> pc2;
    for (const auto& a : r.features) pc2.push_back(project(prof.pca, a).pc2);
    for (std::size_t c = 0; c < r.log->frames.size(); ++c) {
      if (r.log->frames[c].event != Event::Crash) continue;
      const double t_crash = r.log->frames[c].t;
      for (std::size_t k = 0; k < r.features.size(); ++k) {
        const double t = r.log->frames[r.frame_index[k]].t;
        if (t < t_crash - cfg.crash_window_s || t >= t_crash) continue;
        const std::size_t lo = k + 1 >= window ? k + 1 - window : 0;
        double sum = 0;
        for (std::size_t i = lo; i <= k; ++i) sum += pc2[i];
        shifts.push_back(std::abs(sum / static_cast<double>(k + 1 - lo) - center));
      }
    }
  }
  if (!shifts.empty()) prof.pc2_threshold = percentile(shifts, 5.0);
  if (!(prof.pc2_threshold > 0)) throw CalibrationError("crash threshold must be positive");

  std::vector<double> hip_fy;
  std::vector<ProprioFrame> reference;
  for (const auto& r : normal) {
    for (const auto& f : r.log->frames) {
      for (const auto& leg : f.legs) hip_fy.push_back(std::abs(leg.hip_fy));
    }
    if (r.log->terrain == cfg.stable_terrain && r.log->gait == Gait::Trot) {
      reference.insert(reference.end(), r.log->frames.begin(), r.log->frames.end());
    }
  }
  prof.f_ref = percentile(hip_fy, 95.0);
  if (!(prof.f_ref > 0)) throw CalibrationError("hip_fy reference force must be positive");
  prof.envelope = ReferenceEnvelope::from_log(reference);
  return out;
}

}  // namespace pronav
