#include <gtest/gtest.h>

#include "pronav/calibration.hpp"
#include "support/oracles.hpp"

using namespace pronav;

namespace {

std::vector<LabeledLog> short_corpus() { return bundled_corpus(default_param_table(), 10.0); }

LabeledLog crashed_run(std::uint64_t seed) {
  Segment seg{20, "solid-flat", 0.3, 0, CrashDrift{0.25, 8.0, 4.0}, {}};
  FixedGaitController ctl(Gait::Trot);
  return {"solid-flat", Gait::Trot, generate(default_param_table(), ScenarioScript{{seg}}, ctl, seed)};
}

}  // namespace

TEST(Calibration, CorpusProfileShape) {
  const auto& prof = fixture::corpus_calibration().profile;
  EXPECT_EQ(prof.ellipses.size(), 12u);
  EXPECT_EQ(prof.lvz_id, "solid-flat/trot");
  ASSERT_EQ(prof.sz_ids.size(), 4u);
  EXPECT_EQ(prof.sz_ids.front(), prof.lvz_id);
  EXPECT_GT(prof.f_ref, 0.0);
  EXPECT_GT(prof.pc2_threshold, 0.0);
  EXPECT_GT(prof.instability_threshold, 0.0);
}

TEST(Calibration, StableZoneInsideSafeRegion) {
  const auto& prof = fixture::corpus_calibration().profile;
  for (const auto& e : prof.zones().sz) {
    for (const auto& b : boundary_points(e.region)) EXPECT_TRUE(contains(prof.gamma_safe, b)) << e.id;
  }
}

TEST(Calibration, MissingPairIsNamed) {
  auto runs = short_corpus();
  runs.erase(std::remove_if(runs.begin(), runs.end(),
                            [](const auto& r) { return r.terrain == "granular" && r.gait == Gait::Amble; }),
             runs.end());
  ASSERT_EQ(runs.size(), 11u);
  try {
    calibrate(runs, Config{});
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_NE(std::string(e.what()).find("granular/amble"), std::string::npos);
  }
}

TEST(Calibration, UnknownTerrainRejected) {
  auto runs = short_corpus();
  runs[0].terrain = "ice";
  EXPECT_THROW(calibrate(runs, Config{}), CalibrationError);
}

TEST(Calibration, RerunGivesIdenticalChecksum) {
  const auto a = calibrate(short_corpus(), Config{});
  const auto b = calibrate(short_corpus(), Config{});
  EXPECT_EQ(profile_checksum(a.profile), profile_checksum(b.profile));
}

TEST(Calibration, SplitByLabelKeepsRuns) {
  const auto corpus = short_corpus();
  std::vector<ProprioFrame> joined;
  for (const auto& log : corpus) joined.insert(joined.end(), log.frames.begin(), log.frames.end());
  joined[5].gait_label.reset();
  const auto runs = split_by_label(joined);
  ASSERT_EQ(runs.size(), corpus.size());
  EXPECT_EQ(runs[0].frames.size(), corpus[0].frames.size() - 1);
  EXPECT_EQ(runs[3].terrain, corpus[3].terrain);
  EXPECT_EQ(runs[3].gait, corpus[3].gait);
}

TEST(Calibration, CrashRunsSetThresholdOnly) {
  const auto base = calibrate(short_corpus(), Config{});
  auto runs = short_corpus();
  runs.push_back(crashed_run(11));
  runs.push_back(crashed_run(12));
  ASSERT_TRUE(has_crash(runs.back()));
  const auto with = calibrate(runs, Config{});
  EXPECT_NE(with.profile.pc2_threshold, base.profile.pc2_threshold);
  EXPECT_GT(with.profile.pc2_threshold, 0.0);
  EXPECT_EQ(with.profile.pca, base.profile.pca);
  EXPECT_TRUE(with.profile.gamma_safe.cov == base.profile.gamma_safe.cov);
  EXPECT_EQ(with.profile.f_ref, base.profile.f_ref);
}

TEST(Percentile, LinearInterpolation) {
  EXPECT_EQ(percentile({3, 1, 2}, 50), 2.0);
  EXPECT_EQ(percentile({1, 2, 3, 4}, 0), 1.0);
  EXPECT_EQ(percentile({1, 2, 3, 4}, 100), 4.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 95), 9.5);
  EXPECT_THROW(percentile({}, 50), Error);
}
