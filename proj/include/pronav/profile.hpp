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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include <openssl/sha.h>

#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/metrics.hpp"
#include "pronav/projection.hpp"
#include "pronav/terrain_model.hpp"

namespace pronav {

inline constexpr int kProfileVersion = 1;

/// Everything the streaming pipeline needs, produced by calibration.
struct CalibrationProfile {
  FeatureConfig features;
  PcaModel pca;
  std::vector<TerrainGaitEllipse> ellipses;
  Region gamma_safe;
  std::string lvz_id;
  std::vector<std::string> sz_ids;
  double pc2_threshold = 1.0;
  double crash_window_s = 3.0;
  double f_ref = 1.0;
  double instability_threshold = 0.0;
  ReferenceEnvelope envelope;

  const TerrainGaitEllipse& ellipse(const std::string& id) const {
    for (const auto& e : ellipses) {
      if (e.id == id) return e;
    }
    throw SchemaError("profile has no ellipse '" + id + "'");
  }

  ZoneSet zones() const {
    ZoneSet z;
    for (const auto& id : sz_ids) z.sz.push_back(ellipse(id));
    z.gamma_safe = gamma_safe;
    return z;
  }
};

namespace detail {

inline nlohmann::json vec2_json(const Eigen::Vector2d& v) { return {v.x(), v.y()}; }
inline nlohmann::json mat2_json(const Eigen::Matrix2d& m) {
  return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}};
}

inline const nlohmann::json& field(const nlohmann::json& j, const std::string& key,
                                   const std::string& where = "") {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError("profile: missing field '" + where + key + "'");
  return *it;
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, const std::string& where = "") {
  try {
    return field(j, key, where).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("profile: field '" + where + key + "' has the wrong type or shape");
  }
}

inline Eigen::Vector2d vec2_from(const nlohmann::json& j, const std::string& key,
                                 const std::string& where) {
  auto a = get_as<std::array<double, 2>>(j, key, where);
  return {a[0], a[1]};
}

inline Eigen::Matrix2d mat2_from(const nlohmann::json& j, const std::string& key,
                                 const std::string& where) {
  auto a = get_as<std::array<std::array<double, 2>, 2>>(j, key, where);
  Eigen::Matrix2d m;
  m << a[0][0], a[0][1], a[1][0], a[1][1];
  return m;
}

inline nlohmann::json region_json(const Region& r) {
  return {{"mean", vec2_json(r.mean)}, {"cov", mat2_json(r.cov)}, {"chi2", r.chi2}};
}

inline Region region_from(const nlohmann::json& j, const std::string& where) {
  Region r;
  r.mean = vec2_from(j, "mean", where);
  r.cov = mat2_from(j, "cov", where);
  r.chi2 = get_as<double>(j, "chi2", where);
  if (!(r.chi2 > 0) || !(r.cov.determinant() > 0) || r.cov(0, 1) != r.cov(1, 0)) {
    throw SchemaError("profile: region '" + where + "' is not a valid ellipse");
  }
  return r;
}

inline std::string sha256_hex(const std::string& payload) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(payload.data()), payload.size(), digest);
  std::string hex;
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

}  // namespace detail

/// Profile JSON without the checksum. Keys sort alphabetically, so dump() of
/// this object is the canonical payload.
inline nlohmann::json profile_payload(const CalibrationProfile& p) {
  nlohmann::json j;
  j["version"] = kProfileVersion;
  j["k"] = kComponents;
  j["window_n"] = p.features.window_n;
  j["window_m"] = p.features.window_m;
  j["spike_mode"] = p.features.spike_mode == SpikeMode::AnyLeg ? "any_leg" : "per_leg";
  j["spike_margin"] = p.features.spike_margin;
  j["feature_mean"] = p.pca.feature_mean;
  j["feature_std"] = p.pca.feature_std;
  j["components"] = p.pca.components;
  j["explained_variance"] = p.pca.explained_variance;
  auto ellipses = nlohmann::json::array();
  for (const auto& e : p.ellipses) {
    ellipses.push_back({{"id", e.id},
                        {"terrain", e.terrain},
                        {"gait", to_string(e.gait)},
                        {"mean", detail::vec2_json(e.mean())},
                        {"cov", detail::mat2_json(e.cov())},
                        {"chi2", e.chi2()},
                        {"area", e.area},
                        {"v_max", e.v_max}});
  }
  j["ellipses"] = std::move(ellipses);
  j["gamma_safe"] = detail::region_json(p.gamma_safe);
  j["lvz_id"] = p.lvz_id;
  j["sz_ids"] = p.sz_ids;
  j["crash"] = {{"pc2_threshold", p.pc2_threshold}, {"window_s", p.crash_window_s}};
  j["entrapment"] = {{"f_ref", p.f_ref}};
  j["instability_threshold"] = p.instability_threshold;
  j["envelope"] = {{"min", p.envelope.min_ref}, {"max", p.envelope.max_ref}};
  return j;
}

inline std::string profile_checksum(const CalibrationProfile& p) {
  return detail::sha256_hex(profile_payload(p).dump());
}

inline nlohmann::json profile_to_json(const CalibrationProfile& p) {
  nlohmann::json j = profile_payload(p);
  j["checksum"] = detail::sha256_hex(j.dump());
  return j;
}

inline CalibrationProfile profile_from_json(const nlohmann::json& j) {
  using detail::get_as;
  if (!j.is_object()) throw SchemaError("profile: not a JSON object");
  const int version = get_as<int>(j, "version");
  if (version != kProfileVersion) {
    throw SchemaError("profile: version " + std::to_string(version) + " is not supported");
  }
  if (get_as<std::size_t>(j, "k") != kComponents) throw SchemaError("profile: k must be 2");
  CalibrationProfile p;
  p.features.window_n = get_as<std::size_t>(j, "window_n");
  p.features.window_m = get_as<std::size_t>(j, "window_m");
  const auto mode = get_as<std::string>(j, "spike_mode");
  if (mode != "any_leg" && mode != "per_leg") throw SchemaError("profile: bad spike_mode");
  p.features.spike_mode = mode == "any_leg" ? SpikeMode::AnyLeg : SpikeMode::PerLeg;
  p.features.spike_margin = get_as<double>(j, "spike_margin");
  p.pca.feature_mean = get_as<std::array<double, kFeatureDim>>(j, "feature_mean");
  p.pca.feature_std = get_as<std::array<double, kFeatureDim>>(j, "feature_std");
  p.pca.components =
      get_as<std::array<std::array<double, kFeatureDim>, kComponents>>(j, "components");
  p.pca.explained_variance = get_as<std::array<double, kComponents>>(j, "explained_variance");
  for (double s : p.pca.feature_std) {
    if (!(s > 0)) throw SchemaError("profile: feature_std entries must be positive");
  }

  const auto& ellipses = detail::field(j, "ellipses");
  if (!ellipses.is_array()) throw SchemaError("profile: field 'ellipses' must be an array");
  for (std::size_t i = 0; i < ellipses.size(); ++i) {
    const auto& ej = ellipses[i];
    const std::string where = "ellipses[" + std::to_string(i) + "].";
    TerrainGaitEllipse e;
    e.id = get_as<std::string>(ej, "id", where);
    e.terrain = get_as<std::string>(ej, "terrain", where);
    auto gait = gait_from_string(get_as<std::string>(ej, "gait", where));
    if (!gait) throw SchemaError("profile: field '" + where + "gait' is not a gait");
    e.gait = *gait;
    e.region = detail::region_from(ej, where);
    e.area = get_as<double>(ej, "area", where);
    e.v_max = get_as<double>(ej, "v_max", where);
    p.ellipses.push_back(std::move(e));
  }
  p.gamma_safe = detail::region_from(detail::field(j, "gamma_safe"), "gamma_safe.");
  p.lvz_id = get_as<std::string>(j, "lvz_id");
  p.sz_ids = get_as<std::vector<std::string>>(j, "sz_ids");
  if (p.sz_ids.empty() || p.sz_ids.front() != p.lvz_id) {
    throw SchemaError("profile: sz_ids must start with lvz_id");
  }
  for (const auto& id : p.sz_ids) p.ellipse(id);
  const auto& crash = detail::field(j, "crash");
  p.pc2_threshold = get_as<double>(crash, "pc2_threshold", "crash.");
  p.crash_window_s = get_as<double>(crash, "window_s", "crash.");
  p.f_ref = get_as<double>(detail::field(j, "entrapment"), "f_ref", "entrapment.");
  p.instability_threshold = get_as<double>(j, "instability_threshold");
  const auto& env = detail::field(j, "envelope");
  p.envelope.min_ref = get_as<std::array<double, kHipJoints>>(env, "min", "envelope.");
  p.envelope.max_ref = get_as<std::array<double, kHipJoints>>(env, "max", "envelope.");

  const auto checksum = get_as<std::string>(j, "checksum");
  if (checksum != profile_checksum(p)) throw SchemaError("profile: checksum mismatch");
  return p;
}

inline void save_profile(const std::string& path, const CalibrationProfile& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write profile " + path);
  out << profile_to_json(p).dump(2) << '\n';
}

inline CalibrationProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("profile " + path + ": " + e.what());
  }
  return profile_from_json(j);
}

}  // namespace pronav
