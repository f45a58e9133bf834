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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pronav/errors.hpp"
#include "pronav/features.hpp"

namespace pronav {

inline constexpr std::size_t kComponents = 2;
inline constexpr double kStdFloor = 1e-9;
inline constexpr std::size_t kMinPcaSamples = 10;

struct PcaPoint {
  double pc1 = 0;
  double pc2 = 0;

  Eigen::Vector2d vec() const { return {pc1, pc2}; }
  friend bool operator==(const PcaPoint&, const PcaPoint&) = default;
};

struct PcaModel {
  std::array<double, kFeatureDim> feature_mean{};
  std::array<double, kFeatureDim> feature_std{};
  std::array<std::array<double, kFeatureDim>, kComponents> components{};
  std::array<double, kComponents> explained_variance{};

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

using Warnings = std::vector<std::string>;

/// Z-scores every feature, eigendecomposes the sample covariance of the
/// standardized data, and keeps the two leading axes. Each axis is signed so
/// that its largest-magnitude loading is positive.
inline PcaModel fit_pca(const std::vector<FeatureVector>& data, Warnings* warnings = nullptr) {
  const std::size_t n = data.size();
  if (n < kMinPcaSamples) {
    throw CalibrationError("PCA needs at least " + std::to_string(kMinPcaSamples) +
                           " samples, got " + std::to_string(n));
  }
  constexpr std::size_t d = kFeatureDim;
  PcaModel model;
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0;
    for (const auto& v : data) sum += v[j];
    const double mean = sum / static_cast<double>(n);
    double ss = 0;
    for (const auto& v : data) ss += (v[j] - mean) * (v[j] - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > kStdFloor)) {
      if (warnings) {
        warnings->push_back("feature " + std::to_string(j) + " has near-zero variance; std clamped");
      }
      sd = kStdFloor;
    }
    model.feature_mean[j] = mean;
    model.feature_std[j] = sd;
  }

  Eigen::Matrix<double, Eigen::Dynamic, d> z(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      z(r, j) = (data[r][j] - model.feature_mean[j]) / model.feature_std[j];
    }
  }
  const Eigen::Matrix<double, d, d> cov = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, d, d>> solver(cov);
  if (solver.info() != Eigen::Success) throw CalibrationError("PCA eigendecomposition failed");

  // Eigen returns ascending eigenvalues.
  for (std::size_t c = 0; c < kComponents; ++c) {
    const int col = static_cast<int>(d - 1 - c);
    Eigen::Matrix<double, d, 1> axis = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    for (std::size_t j = 0; j < d; ++j) model.components[c][j] = axis(static_cast<int>(j));
    model.explained_variance[c] = std::max(0.0, solver.eigenvalues()(col));
  }
  return model;
}

inline PcaPoint project(const PcaModel& model, const FeatureVector& a) {
  double out[kComponents] = {0, 0};
  for (std::size_t j = 0; j < kFeatureDim; ++j) {
    if (!std::isfinite(a[j])) {
      throw SignalQualityError("non-finite feature at index " + std::to_string(j));
    }
    const double z = (a[j] - model.feature_mean[j]) / model.feature_std[j];
    out[0] += model.components[0][j] * z;
    out[1] += model.components[1][j] * z;
  }
  return {out[0], out[1]};
}

}  // namespace pronav
