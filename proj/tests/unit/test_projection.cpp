#include <random>

#include <gtest/gtest.h>

#include "pronav/projection.hpp"
#include "support/oracles.hpp"

using namespace pronav;

namespace {

std::vector<FeatureVector> mixed_dataset(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  double mix[9][9];
  for (auto& row : mix)
    for (double& x : row) x = nd(rng);
  std::vector<FeatureVector> out(n);
  for (auto& v : out) {
    double z[9];
    for (int k = 0; k < 9; ++k) z[k] = nd(rng) * (1.0 + k);
    for (int j = 0; j < 9; ++j) {
      v[j] = 10.0 * j;
      for (int k = 0; k < 9; ++k) v[j] += mix[j][k] * z[k];
    }
  }
  return out;
}

std::vector<std::array<double, 9>> raw(const std::vector<FeatureVector>& d) {
  std::vector<std::array<double, 9>> out;
  for (const auto& v : d) out.push_back(v.a);
  return out;
}

}  // namespace

TEST(Pca, MatchesJacobiOracle) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = mixed_dataset(rng, 200);
    const PcaModel m = fit_pca(data);
    const auto ref = oracle::brute_pca(raw(data));
    for (int c = 0; c < 2; ++c) {
      for (int j = 0; j < 9; ++j) EXPECT_NEAR(m.components[c][j], ref.axes[c][j], 1e-8);
      EXPECT_NEAR(m.explained_variance[c], ref.variance[c], 1e-9 * ref.variance[0]);
    }
  }
}

TEST(Pca, ComponentsOrthonormalAndOrdered) {
  std::mt19937_64 rng(5);
  const PcaModel m = fit_pca(mixed_dataset(rng, 100));
  auto dot = [&](int a, int b) {
    double s = 0;
    for (int j = 0; j < 9; ++j) s += m.components[a][j] * m.components[b][j];
    return s;
  };
  EXPECT_NEAR(dot(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(dot(1, 1), 1.0, 1e-9);
  EXPECT_NEAR(dot(0, 1), 0.0, 1e-9);
  EXPECT_GE(m.explained_variance[0], m.explained_variance[1]);
  EXPECT_GE(m.explained_variance[1], 0.0);
}

TEST(Pca, DegeneratePlaneSpansVaryingFeatures) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<FeatureVector> data(100);
  for (auto& v : data) {
    for (int j = 0; j < 9; ++j) v[j] = 1.0 + j;
    v[6] += 0.5 * nd(rng);
    v[8] += 3.0 * nd(rng);
  }
  Warnings warnings;
  const PcaModel m = fit_pca(data, &warnings);
  EXPECT_EQ(warnings.size(), 7u);
  for (int c = 0; c < 2; ++c) {
    const double in_plane = std::hypot(m.components[c][6], m.components[c][8]);
    EXPECT_GT(in_plane, 0.99);
  }
}

TEST(Pca, TooFewSamples) {
  std::mt19937_64 rng(1);
  EXPECT_THROW(fit_pca(mixed_dataset(rng, 9)), CalibrationError);
}

TEST(Projection, MeanMapsToOrigin) {
  std::mt19937_64 rng(17);
  const auto data = mixed_dataset(rng, 150);
  const PcaModel m = fit_pca(data);
  FeatureVector mean;
  for (int j = 0; j < 9; ++j) mean[j] = m.feature_mean[j];
  const PcaPoint p = project(m, mean);
  EXPECT_NEAR(p.pc1, 0.0, 1e-12);
  EXPECT_NEAR(p.pc2, 0.0, 1e-12);
}

TEST(Projection, MatchesExplicitDotProduct) {
  std::mt19937_64 rng(21);
  const auto data = mixed_dataset(rng, 150);
  const PcaModel m = fit_pca(data);
  for (const auto& a : mixed_dataset(rng, 200)) {
    double p[2] = {0, 0};
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < 9; ++j) p[c] += m.components[c][j] * ((a[j] - m.feature_mean[j]) / m.feature_std[j]);
    const PcaPoint q = project(m, a);
    EXPECT_NEAR(q.pc1, p[0], 1e-12 * std::max(1.0, std::fabs(p[0])));
    EXPECT_NEAR(q.pc2, p[1], 1e-12 * std::max(1.0, std::fabs(p[1])));
  }
}

TEST(Projection, InvariantToAffineRescaling) {
  std::mt19937_64 rng(6);
  const auto data = mixed_dataset(rng, 300);
  auto scaled = data;
  for (auto& v : scaled)
    for (int j = 0; j < 9; ++j) v[j] = 3.5 * (j + 1) * v[j] - 7.0;
  const PcaModel a = fit_pca(data), b = fit_pca(scaled);
  for (std::size_t i = 0; i < data.size(); i += 17) {
    const PcaPoint pa = project(a, data[i]), pb = project(b, scaled[i]);
    EXPECT_NEAR(pa.pc1, pb.pc1, 1e-8);
    EXPECT_NEAR(pa.pc2, pb.pc2, 1e-8);
  }
}

TEST(Projection, NonFiniteInput) {
  std::mt19937_64 rng(2);
  const PcaModel m = fit_pca(mixed_dataset(rng, 50));
  FeatureVector a;
  a[4] = std::nan("");
  EXPECT_THROW(project(m, a), SignalQualityError);
}
