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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/projection.hpp"
#include "pronav/types.hpp"

namespace pronav {

inline constexpr std::size_t kMinEllipsePoints = 20;
inline constexpr double kMaxCondition = 1e8;
inline constexpr std::size_t kBoundarySamples = 64;

/// Gaussian confidence region: {p : (p - mean)' cov^-1 (p - mean) <= chi2}.
struct Region {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
  double chi2 = 5.991;

  double area() const { return std::numbers::pi * chi2 * std::sqrt(cov.determinant()); }
};

struct TerrainGaitEllipse {
  std::string id;
  std::string terrain;
  Gait gait = Gait::Trot;
  Region region;
  double area = 0;
  double v_max = 0;

  const Eigen::Vector2d& mean() const { return region.mean; }
  const Eigen::Matrix2d& cov() const { return region.cov; }
  double chi2() const { return region.chi2; }
};

inline std::string ellipse_id(const std::string& terrain, Gait gait) {
  return terrain + "/" + std::string(to_string(gait));
}

inline double mahalanobis2(const Region& r, const Eigen::Vector2d& p) {
  const Eigen::Vector2d d = p - r.mean;
  // Explicit 2x2 inverse keeps this allocation-free on the hot path.
  const double a = r.cov(0, 0), b = r.cov(0, 1), c = r.cov(1, 1);
  const double det = a * c - b * b;
  return (c * d.x() * d.x() - 2 * b * d.x() * d.y() + a * d.y() * d.y()) / det;
}
inline double mahalanobis2(const Region& r, const PcaPoint& p) { return mahalanobis2(r, p.vec()); }
inline double mahalanobis2(const TerrainGaitEllipse& e, const PcaPoint& p) {
  return mahalanobis2(e.region, p.vec());
}

/// Boundary-inclusive, with a relative slack of 1e-12 so points constructed
/// on the boundary survive rounding.
inline bool within(const Region& r, double m2) { return m2 <= r.chi2 * (1 + 1e-12); }
inline bool contains(const Region& r, const Eigen::Vector2d& p) {
  return within(r, mahalanobis2(r, p));
}
inline bool contains(const Region& r, const PcaPoint& p) { return contains(r, p.vec()); }
inline bool contains(const TerrainGaitEllipse& e, const PcaPoint& p) {
  return contains(e.region, p);
}

/// Points at angle 2*pi*k/count of the parametrization mean + L(cos, sin)
/// with L L' = chi2 * cov, so each lies on the membership boundary.
inline std::vector<Eigen::Vector2d> boundary_points(const Region& r,
                                                    std::size_t count = kBoundarySamples) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.cov);
  const Eigen::Matrix2d l =
      es.eigenvectors() * (r.chi2 * es.eigenvalues().cwiseMax(0.0)).cwiseSqrt().asDiagonal();
  std::vector<Eigen::Vector2d> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double th = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    out.push_back(r.mean + l * Eigen::Vector2d(std::cos(th), std::sin(th)));
  }
  return out;
}

/// Sample mean and unbiased covariance at the given chi2 level. Covariances
/// with condition number above 1e8 get lambda*I added.
inline Region fit_region(const std::vector<PcaPoint>& points, double chi2,
                         Warnings* warnings = nullptr, const std::string& label = "") {
  if (points.size() < kMinEllipsePoints) {
    throw CalibrationError("cluster " + label + " has " + std::to_string(points.size()) +
                           " points, need at least " + std::to_string(kMinEllipsePoints));
  }
  const double n = static_cast<double>(points.size());
  Region r;
  r.chi2 = chi2;
  r.mean.setZero();
  for (const auto& p : points) r.mean += p.vec();
  r.mean /= n;
  r.cov.setZero();
  for (const auto& p : points) {
    const Eigen::Vector2d d = p.vec() - r.mean;
    r.cov += d * d.transpose();
  }
  r.cov /= (n - 1);
  r.cov(1, 0) = r.cov(0, 1);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(r.cov);
  const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
  if (!(hi > 0)) throw CalibrationError("cluster " + label + " has zero spread");
  if (!(lo > 0) || hi / lo > kMaxCondition) {
    const double lambda = 1e-6 * r.cov.trace() / 2;
    r.cov += lambda * Eigen::Matrix2d::Identity();
    if (warnings) warnings->push_back("cluster " + label + " is near-degenerate; regularized");
  }
  return r;
}

inline TerrainGaitEllipse fit_ellipse(const std::vector<PcaPoint>& points,
                                      const std::string& terrain, Gait gait, double chi2,
                                      double v_max, Warnings* warnings = nullptr) {
  TerrainGaitEllipse e;
  e.id = ellipse_id(terrain, gait);
  e.terrain = terrain;
  e.gait = gait;
  e.region = fit_region(points, chi2, warnings, e.id);
  e.area = e.region.area();
  e.v_max = v_max;
  return e;
}

/// Strict weak order for picking the high-stability gait of one terrain:
/// area / v_max, then area, then nominal current.
inline bool more_stable(const TerrainGaitEllipse& a, const TerrainGaitEllipse& b) {
  const double ra = a.area / a.v_max, rb = b.area / b.v_max;
  if (ra != rb) return ra < rb;
  if (a.area != b.area) return a.area < b.area;
  return current_rank(a.gait) < current_rank(b.gait);
}

/// Per terrain, the ellipse minimizing area / v_max. The stable terrain's
/// winner comes first and is the low-variance zone.
inline std::vector<TerrainGaitEllipse> select_high_stability(
    const std::vector<TerrainGaitEllipse>& ellipses, const std::vector<std::string>& terrains,
    const std::string& stable_terrain) {
  std::vector<std::string> order{stable_terrain};
  for (const auto& t : terrains) {
    if (t != stable_terrain) order.push_back(t);
  }
  std::vector<TerrainGaitEllipse> winners;
  for (const auto& terrain : order) {
    const TerrainGaitEllipse* best = nullptr;
    for (Gait g : kAllGaits) {
      auto it = std::find_if(ellipses.begin(), ellipses.end(), [&](const auto& e) {
        return e.terrain == terrain && e.gait == g;
      });
      if (it == ellipses.end()) {
        throw CalibrationError("missing calibration pair " + ellipse_id(terrain, g));
      }
      if (!best || more_stable(*it, *best)) best = &*it;
    }
    winners.push_back(*best);
  }
  return winners;
}

/// Safe region: one Gaussian over the pooled stable-zone points, its chi2
/// inflated until it holds every sampled boundary point of every stable-zone
/// ellipse.
inline Region build_gamma_safe(const std::vector<PcaPoint>& sz_points,
                               const std::vector<TerrainGaitEllipse>& sz, double chi2 = 13.82,
                               double inflation = 1.25, int max_inflations = 20) {
  Region g = fit_region(sz_points, chi2, nullptr, "safe-region");
  std::vector<Eigen::Vector2d> samples;
  for (const auto& e : sz) {
    auto b = boundary_points(e.region);
    samples.insert(samples.end(), b.begin(), b.end());
  }
  for (int k = 0; k <= max_inflations; ++k) {
    const bool ok = std::all_of(samples.begin(), samples.end(),
                                [&](const auto& p) { return contains(g, p); });
    if (ok) return g;
    g.chi2 *= inflation;
  }
  throw CalibrationError("safe region does not contain the stable zone after " +
                         std::to_string(max_inflations) + " inflations");
}

/// Stable zone ellipses (index 0 is the low-variance zone) plus the safe region.
struct ZoneSet {
  std::vector<TerrainGaitEllipse> sz;
  Region gamma_safe;

  const TerrainGaitEllipse& lvz() const { return sz.front(); }

  std::optional<std::size_t> index_of(const std::string& id) const {
    for (std::size_t i = 0; i < sz.size(); ++i) {
      if (sz[i].id == id) return i;
    }
    return std::nullopt;
  }
};

}  // namespace pronav
