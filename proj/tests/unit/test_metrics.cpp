#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pronav/metrics.hpp"
#include "support/oracles.hpp"

using namespace pronav;

namespace {

ReferenceEnvelope box(double lo, double hi) {
  ReferenceEnvelope env;
  env.min_ref.fill(lo);
  env.max_ref.fill(hi);
  return env;
}

std::vector<ProprioFrame> straight_line(double meters, double seconds, double current) {
  const int n = static_cast<int>(seconds * 16) + 1;
  std::vector<ProprioFrame> out(n);
  for (int k = 0; k < n; ++k) {
    out[k].t = k / 16.0;
    out[k].odom.x = meters * k / (n - 1);
    out[k].current = current;
  }
  return out;
}

}  // namespace

TEST(Vibration, InsideEnvelopeIsZero) {
  std::vector<ProprioFrame> frames(10);
  EXPECT_EQ(vibration_cost(frames, box(-0.05, 0.05)), 0.0);
}

TEST(Vibration, SingleExcursion) {
  std::vector<ProprioFrame> frames(1);
  frames[0].legs[2].hip_py = 0.08;
  EXPECT_NEAR(vibration_cost(frames, box(-0.05, 0.05)), 0.03, 1e-15);
  EXPECT_DOUBLE_EQ(excursion(-0.2, -0.05, 0.05), 0.15);
}

TEST(Vibration, ZeroOnEnvelopeLog) {
  std::mt19937_64 rng(1);
  const auto frames = oracle::random_stream(rng, 200);
  EXPECT_EQ(vibration_cost(frames, ReferenceEnvelope::from_log(frames)), 0.0);
  const auto env = ReferenceEnvelope::from_log(frames);
  for (std::size_t j = 0; j < kHipJoints; ++j) EXPECT_LE(env.min_ref[j], env.max_ref[j]);
  EXPECT_THROW(ReferenceEnvelope::from_log({}), Error);
}

TEST(Vibration, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ref = oracle::random_stream(rng, 50);
    const auto frames = oracle::random_stream(rng, 100 + trial);
    const auto env = ReferenceEnvelope::from_log(ref);
    EXPECT_EQ(vibration_cost(frames, env), oracle::vibration_cost(frames, env.min_ref, env.max_ref));
  }
}

TEST(ImuEnergy, DirectSums) {
  EXPECT_EQ(imu_energy(std::vector<ProprioFrame>(5)).total(), 0.0);
  std::vector<ProprioFrame> frames(2);
  frames[0].imu = {1, 0, 2};
  frames[1].imu = {2, 0, 2};
  const auto e = imu_energy(frames);
  EXPECT_EQ(e.total(), 13.0);
  EXPECT_EQ(e.x, 5.0);
  EXPECT_EQ(e.z, 8.0);
}

TEST(ImuEnergy, HomogeneousOfDegreeTwo) {
  std::mt19937_64 rng(3);
  auto frames = oracle::random_stream(rng, 64);
  const double base = imu_energy(frames).total();
  for (auto& f : frames) f.imu = {3 * f.imu.ax, 3 * f.imu.ay, 3 * f.imu.az};
  EXPECT_NEAR(imu_energy(frames).total(), 9 * base, 1e-9 * base);
}

TEST(ImuEnergy, AxisDecompositionMatchesOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto frames = oracle::random_stream(rng, 10 + trial);
    const auto e = imu_energy(frames);
    EXPECT_EQ(e.total(), e.x + e.y + e.z);
    EXPECT_NEAR(e.total(), oracle::imu_energy(frames), 1e-12 * e.total());
  }
}

TEST(Improvement, ReportedPercentages) {
  EXPECT_DOUBLE_EQ(improvement(70, 50), 40.0);
  EXPECT_DOUBLE_EQ(improvement(100, 80), 25.0);
  EXPECT_DOUBLE_EQ(improvement(60, 60), 0.0);
  EXPECT_THROW(improvement(10, 0), Error);
}

TEST(Summarize, PowerVelocityAndSuccess) {
  const auto frames = straight_line(10.0, 25.0, 5.0);
  const auto r = summarize(frames, Goal{10.0, 0.0}, 50.0, box(-1, 1));
  EXPECT_DOUBLE_EQ(r.mean_power, 250.0);
  EXPECT_NEAR(r.mean_velocity, 0.4, 1e-12);
  EXPECT_TRUE(r.success);
  ASSERT_TRUE(r.time_to_goal.has_value());
  EXPECT_NEAR(*r.time_to_goal, 23.75, 1e-9);
}

TEST(Summarize, CrashMeansFailure) {
  auto frames = straight_line(10.0, 25.0, 5.0);
  frames[100].event = Event::Crash;
  const auto r = summarize(frames, Goal{10.0, 0.0}, 50.0, box(-1, 1));
  EXPECT_FALSE(r.success);
  EXPECT_FALSE(r.time_to_goal.has_value());
}

TEST(Summarize, RequiresVoltageAndFrames) {
  EXPECT_THROW(summarize(straight_line(1, 1, 1), Goal{}, 0.0, box(-1, 1)), ConfigError);
  EXPECT_THROW(summarize({}, Goal{}, 50.0, box(-1, 1)), Error);
}

TEST(Aggregate, PermutationInvariantMeans) {
  std::vector<TrialReport> trials = {{true, 100, 0.5, 10.0, 1.0, 2.0},
                                     {false, 200, 0.3, std::nullopt, 3.0, 4.0},
                                     {true, 300, 0.4, 20.0, 5.0, 6.0}};
  const auto a = aggregate(trials);
  std::reverse(trials.begin(), trials.end());
  const auto b = aggregate(trials);
  EXPECT_DOUBLE_EQ(a.mean_power, 200.0);
  EXPECT_DOUBLE_EQ(b.mean_power, a.mean_power);
  EXPECT_NEAR(a.success_rate, 200.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(*a.mean_power_successful, 200.0);
  EXPECT_DOUBLE_EQ(*a.mean_time_to_goal, 15.0);
  EXPECT_DOUBLE_EQ(a.vibration_cost, b.vibration_cost);

  std::ostringstream csv;
  write_aggregate_csv(csv, a, "pronav", "s1");
  EXPECT_EQ(csv.str().rfind("metric,method,scenario,value\nsuccess_rate,pronav,s1,", 0), 0u);
}
