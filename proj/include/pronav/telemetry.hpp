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

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pronav/errors.hpp"
#include "pronav/types.hpp"

namespace pronav {

/// Fixed-capacity FIFO. Index 0 is the oldest sample, size()-1 the newest.
template <typename T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity = 0) : data_(capacity) {}

  void push(const T& value) {
    if (data_.empty()) return;
    data_[(head_ + size_) % data_.size()] = value;
    if (size_ < data_.size()) {
      ++size_;
    } else {
      head_ = (head_ + 1) % data_.size();
    }
  }

  void clear() { head_ = size_ = 0; }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return data_.size(); }
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ == data_.size(); }

  const T& operator[](std::size_t i) const { return data_[(head_ + i) % data_.size()]; }
  const T& oldest() const { return (*this)[0]; }
  const T& newest() const { return (*this)[size_ - 1]; }

  std::vector<T> to_vector() const {
    std::vector<T> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.push_back((*this)[i]);
    return out;
  }

 private:
  std::vector<T> data_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

/// Per-leg history of the signals consumed by the feature stage: knee force
/// over n samples and hip x/y position over m samples.
class SignalWindow {
 public:
  SignalWindow(std::size_t n = 16, std::size_t m = 16) {
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      knee_fz_[i] = RingBuffer<double>(n);
      hip_px_[i] = RingBuffer<double>(m);
      hip_py_[i] = RingBuffer<double>(m);
    }
  }

  void push(const ProprioFrame& frame) {
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      knee_fz_[i].push(frame.legs[i].knee_fz);
      hip_px_[i].push(frame.legs[i].hip_px);
      hip_py_[i].push(frame.legs[i].hip_py);
    }
  }

  void clear() {
    for (std::size_t i = 0; i < kNumLegs; ++i) {
      knee_fz_[i].clear();
      hip_px_[i].clear();
      hip_py_[i].clear();
    }
  }

  std::size_t force_fill() const { return knee_fz_[0].size(); }
  std::size_t position_fill() const { return hip_px_[0].size(); }
  bool warm() const { return knee_fz_[0].full() && hip_px_[0].full(); }

  const std::array<RingBuffer<double>, kNumLegs>& knee_fz() const { return knee_fz_; }
  const std::array<RingBuffer<double>, kNumLegs>& hip_px() const { return hip_px_; }
  const std::array<RingBuffer<double>, kNumLegs>& hip_py() const { return hip_py_; }

 private:
  std::array<RingBuffer<double>, kNumLegs> knee_fz_;
  std::array<RingBuffer<double>, kNumLegs> hip_px_;
  std::array<RingBuffer<double>, kNumLegs> hip_py_;
};

/// Forces above this magnitude (N) are treated as sensor faults.
inline constexpr double kDefaultForceBound = 5000.0;

namespace detail {

inline double number_field(const nlohmann::json& obj, const char* key,
                           const std::string& where, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "missing field '" + key + "'", line);
  if (!it->is_number()) throw ParseError(where + "field '" + key + "' is not a number", line);
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(where + "field '" + key + "' is not finite", line);
  return v;
}

inline const nlohmann::json& object_field(const nlohmann::json& obj, const char* key,
                                          std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", line);
  if (!it->is_object()) throw ParseError(std::string("field '") + key + "' is not an object", line);
  return *it;
}

}  // namespace detail

inline ProprioFrame frame_from_json(const nlohmann::json& j, std::size_t line = 0,
                                    double force_bound = kDefaultForceBound) {
  using detail::number_field;
  if (!j.is_object()) throw ParseError("record is not a JSON object", line);
  ProprioFrame f;
  f.t = number_field(j, "t", "", line);

  auto legs = j.find("legs");
  if (legs == j.end() || !legs->is_array()) throw ParseError("missing array 'legs'", line);
  std::array<bool, kNumLegs> seen{};
  for (const auto& leg : *legs) {
    if (!leg.is_object()) throw ParseError("leg entry is not an object", line);
    auto id_it = leg.find("id");
    if (id_it == leg.end() || !id_it->is_number_integer()) {
      throw ParseError("leg entry without integer 'id'", line);
    }
    const auto id = id_it->get<long long>();
    if (id < 1 || id > 4) throw ParseError("leg id " + std::to_string(id) + " out of range", line);
    const auto slot = static_cast<std::size_t>(id - 1);
    if (seen[slot]) throw ParseError("duplicate leg " + std::to_string(id), line);
    seen[slot] = true;
    const std::string where = "leg " + std::to_string(id) + ": ";
    LegSample& s = f.legs[slot];
    s.hip_px = number_field(leg, "hip_px", where, line);
    s.hip_py = number_field(leg, "hip_py", where, line);
    s.knee_pz = number_field(leg, "knee_pz", where, line);
    s.hip_vx = number_field(leg, "hip_vx", where, line);
    s.hip_vy = number_field(leg, "hip_vy", where, line);
    s.knee_vz = number_field(leg, "knee_vz", where, line);
    s.hip_fx = number_field(leg, "hip_fx", where, line);
    s.hip_fy = number_field(leg, "hip_fy", where, line);
    s.knee_fz = number_field(leg, "knee_fz", where, line);
    for (double force : {s.hip_fx, s.hip_fy, s.knee_fz}) {
      if (std::abs(force) > force_bound) throw ParseError(where + "force exceeds physical bound", line);
    }
  }
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    if (!seen[i]) throw ParseError("missing leg " + std::to_string(i + 1), line);
  }

  f.current = number_field(j, "current", "", line);
  const auto& imu = detail::object_field(j, "imu", line);
  f.imu = {number_field(imu, "ax", "imu: ", line), number_field(imu, "ay", "imu: ", line),
           number_field(imu, "az", "imu: ", line)};
  const auto& odom = detail::object_field(j, "odom", line);
  f.odom.x = number_field(odom, "x", "odom: ", line);
  f.odom.y = number_field(odom, "y", "odom: ", line);
  f.odom.yaw = number_field(odom, "yaw", "odom: ", line);
  f.odom.vx = number_field(odom, "vx", "odom: ", line);
  f.odom.vy = number_field(odom, "vy", "odom: ", line);
  f.odom.wz = number_field(odom, "wz", "odom: ", line);

  if (auto it = j.find("gait"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("field 'gait' is not a string", line);
    auto g = gait_from_string(it->get<std::string>());
    if (!g) throw ParseError("unknown gait '" + it->get<std::string>() + "'", line);
    f.gait_label = *g;
  }
  if (auto it = j.find("terrain"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("field 'terrain' is not a string", line);
    f.terrain_label = it->get<std::string>();
  }
  if (auto it = j.find("event"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw ParseError("field 'event' is not a string", line);
    auto e = event_from_string(it->get<std::string>());
    if (!e) throw ParseError("unknown event '" + it->get<std::string>() + "'", line);
    f.event = *e;
  }
  return f;
}

inline ProprioFrame parse_frame(std::string_view line, std::size_t line_no = 0,
                                double force_bound = kDefaultForceBound) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  return frame_from_json(j, line_no, force_bound);
}

inline nlohmann::ordered_json frame_to_json(const ProprioFrame& f) {
  nlohmann::ordered_json j;
  j["t"] = f.t;
  auto legs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < kNumLegs; ++i) {
    const LegSample& s = f.legs[i];
    legs.push_back({{"id", i + 1},
                    {"hip_px", s.hip_px},
                    {"hip_py", s.hip_py},
                    {"knee_pz", s.knee_pz},
                    {"hip_vx", s.hip_vx},
                    {"hip_vy", s.hip_vy},
                    {"knee_vz", s.knee_vz},
                    {"hip_fx", s.hip_fx},
                    {"hip_fy", s.hip_fy},
                    {"knee_fz", s.knee_fz}});
  }
  j["legs"] = std::move(legs);
  j["current"] = f.current;
  j["imu"] = {{"ax", f.imu.ax}, {"ay", f.imu.ay}, {"az", f.imu.az}};
  j["odom"] = {{"x", f.odom.x},   {"y", f.odom.y},   {"yaw", f.odom.yaw},
               {"vx", f.odom.vx}, {"vy", f.odom.vy}, {"wz", f.odom.wz}};
  if (f.gait_label) j["gait"] = to_string(*f.gait_label);
  if (f.terrain_label) j["terrain"] = *f.terrain_label;
  if (f.event) j["event"] = to_string(*f.event);
  return j;
}

/// One log line, without the trailing newline. Doubles print in shortest
/// round-trip form.
inline std::string serialize_frame(const ProprioFrame& f) { return frame_to_json(f).dump(); }

/// Streams frames from a line-delimited log, enforcing strictly increasing t.
class LogReader {
 public:
  explicit LogReader(std::istream& in, double force_bound = kDefaultForceBound)
      : in_(in), force_bound_(force_bound) {}

  /// False at end of stream.
  bool next(ProprioFrame& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ProprioFrame f = parse_frame(line, line_no_, force_bound_);
      if (have_last_ && !(f.t > last_t_)) {
        throw SequenceError("timestamp " + std::to_string(f.t) + " does not follow " +
                                std::to_string(last_t_),
                            line_no_);
      }
      last_t_ = f.t;
      have_last_ = true;
      out = std::move(f);
      return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_no_; }

 private:
  std::istream& in_;
  double force_bound_;
  std::size_t line_no_ = 0;
  double last_t_ = 0;
  bool have_last_ = false;
};

inline std::vector<ProprioFrame> read_log(std::istream& in) {
  LogReader reader(in);
  std::vector<ProprioFrame> frames;
  ProprioFrame f;
  while (reader.next(f)) frames.push_back(f);
  return frames;
}

inline std::vector<ProprioFrame> read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open log " + path);
  return read_log(in);
}

inline void write_log(std::ostream& out, const std::vector<ProprioFrame>& frames) {
  for (const auto& f : frames) out << serialize_frame(f) << '\n';
}

inline void write_log(const std::string& path, const std::vector<ProprioFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write log " + path);
  write_log(out, frames);
}

}  // namespace pronav
