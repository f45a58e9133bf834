#include <random>

#include <gtest/gtest.h>

#include "pronav/gait_policy.hpp"

using namespace pronav;

namespace {

TerrainGaitEllipse zone(const std::string& terrain, Gait g, double x, double y, double var,
                        double chi2 = 5.991) {
  TerrainGaitEllipse e;
  e.id = ellipse_id(terrain, g);
  e.terrain = terrain;
  e.gait = g;
  e.region.mean = {x, y};
  e.region.cov = Eigen::Matrix2d::Identity() * var;
  e.region.chi2 = chi2;
  e.area = e.region.area();
  e.v_max = g == Gait::Crawl ? 0.4 : 1.0;
  return e;
}

/// Isotropic ellipse with the given area.
TerrainGaitEllipse zone_with_area(const std::string& terrain, Gait g, double x, double y,
                                  double area) {
  return zone(terrain, g, x, y, area / (std::numbers::pi * 5.991));
}

Region wide_safe_region() {
  Region r;
  r.cov = Eigen::Matrix2d::Identity() * 1e4;
  r.chi2 = 13.82;
  return r;
}

PolicyConfig literal() {
  PolicyConfig c;
  c.d_min = 0;
  c.k_exit = 1;
  return c;
}

void check_invariants(const PolicyState& s, const GaitDecision& d, const ZoneSet& z) {
  ASSERT_FALSE(s.is_excluded(s.active));
  ASSERT_FALSE(s.is_excluded(0));
  ASSERT_EQ(s.excluded >> z.sz.size(), 0u);
  ASSERT_EQ(!d.gait.has_value(), d.mode == Mode::Halt);
  ASSERT_EQ(d.gait_case == GaitCase::OutGammaSafe, !d.gait.has_value());
}

}  // namespace

TEST(GaitPolicy, InitStartsInLvzWithTrot) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1)}, wide_safe_region()};
  const PolicyState s = init_policy(z);
  EXPECT_EQ(s.gait, Gait::Trot);
  EXPECT_EQ(s.active, 0u);
  EXPECT_EQ(s.excluded, 0u);
  EXPECT_THROW(init_policy(ZoneSet{}), CalibrationError);
}

TEST(GaitPolicy, PointInLvzKeepsTrot) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1)}, wide_safe_region()};
  const auto [s, d] = policy_step(init_policy(z), {0.1, 0.1}, z, literal());
  EXPECT_EQ(d.gait, Gait::Trot);
  EXPECT_EQ(d.gait_case, GaitCase::InLVZ);
  EXPECT_EQ(d.active_ellipse, "solid-flat/trot");
  EXPECT_EQ(s.stable_streak, 1);
}

TEST(GaitPolicy, MinAreaCandidateWinsAndOldActiveIsExcluded) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1),
             zone_with_area("granular", Gait::Crawl, 10, 0, 4.0),
             zone_with_area("poor-foothold", Gait::Amble, 10, 0, 9.0),
             zone("high-resistance", Gait::Trot, -10, 0, 1)},
            wide_safe_region()};
  PolicyState s;
  s.active = 3;
  s.gait = s.last_gait = Gait::Trot;
  const auto [next, d] = policy_step(s, {10, 0}, z, literal());
  EXPECT_EQ(d.gait_case, GaitCase::InSZ_MinArea);
  EXPECT_EQ(next.active, 1u);
  EXPECT_EQ(d.gait, Gait::Crawl);
  EXPECT_TRUE(next.is_excluded(3));
  EXPECT_FALSE(next.is_excluded(2));
}

TEST(GaitPolicy, OutsideZoneGoesToNearestByMahalanobis) {
  // chi2 = 2 keeps p outside all three ellipses at distances 7.1, 3.2, 9.0.
  ZoneSet z{{zone("solid-flat", Gait::Trot, -30, -30, 1),
             zone("granular", Gait::Crawl, std::sqrt(7.1), 0, 1, 2.0),
             zone("poor-foothold", Gait::Amble, 0, std::sqrt(3.2), 1, 2.0),
             zone("high-resistance", Gait::Crawl, -3, 0, 1, 2.0)},
            wide_safe_region()};
  const PcaPoint p{0, 0};
  EXPECT_NEAR(mahalanobis2(z.sz[1], p), 7.1, 1e-12);
  EXPECT_NEAR(mahalanobis2(z.sz[2], p), 3.2, 1e-12);
  EXPECT_NEAR(mahalanobis2(z.sz[3], p), 9.0, 1e-12);
  const auto [s, d] = policy_step(init_policy(z), p, z, literal());
  EXPECT_EQ(d.gait_case, GaitCase::OutSZ_MinDist);
  EXPECT_EQ(d.active_ellipse, "poor-foothold/amble");
  EXPECT_EQ(d.gait, Gait::Amble);
}

TEST(GaitPolicy, OutsideSafeRegionHalts) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1), zone("granular", Gait::Crawl, 3, 0, 1)},
            wide_safe_region()};
  PolicyState s;
  s.active = 1;
  s.gait = s.last_gait = Gait::Crawl;
  s.excluded = 0;
  s.dwell = 0;
  const auto [next, d] = policy_step(s, {500, 0}, z, PolicyConfig{});
  EXPECT_EQ(d.gait_case, GaitCase::OutGammaSafe);
  EXPECT_FALSE(d.gait.has_value());
  EXPECT_EQ(d.mode, Mode::Halt);
  EXPECT_EQ(next.last_gait, Gait::Crawl);
}

TEST(GaitPolicy, StayingInActiveClearsExclusions) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1), zone("granular", Gait::Crawl, 20, 0, 1),
             zone("poor-foothold", Gait::Amble, -20, 0, 1)},
            wide_safe_region()};
  PolicyConfig cfg = literal();
  PolicyState s;
  s.active = 2;
  s.gait = s.last_gait = Gait::Amble;
  s.excluded = 1u << 1;
  for (int k = 0; k < cfg.k_stable; ++k) {
    EXPECT_TRUE(s.is_excluded(1)) << k;
    auto [next, d] = policy_step(s, {-20, 0}, z, cfg);
    EXPECT_EQ(d.gait_case, GaitCase::InActive);
    s = next;
  }
  EXPECT_EQ(s.excluded, 0u);
}

TEST(GaitPolicy, ExitConfirmationAndDwellHoldSwitches) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1), zone("granular", Gait::Crawl, 20, 0, 1)},
            wide_safe_region()};
  PolicyConfig cfg;
  cfg.k_exit = 3;
  cfg.d_min = 0;
  PolicyState s = init_policy(z);
  for (int k = 0; k < 2; ++k) {
    auto [next, d] = policy_step(s, {20, 0}, z, cfg);
    EXPECT_TRUE(d.suppressed);
    EXPECT_EQ(d.gait, Gait::Trot);
    s = next;
  }
  auto [next, d] = policy_step(s, {20, 0}, z, cfg);
  EXPECT_FALSE(d.suppressed);
  EXPECT_EQ(d.gait, Gait::Crawl);

  cfg.k_exit = 1;
  cfg.d_min = 5;
  PolicyState fresh = init_policy(z);
  fresh.dwell = 2;
  auto [held, hd] = policy_step(fresh, {20, 0}, z, cfg);
  EXPECT_TRUE(hd.suppressed);
  EXPECT_EQ(held.active, 0u);
}

TEST(GaitPolicy, PureFunctionOfInputs) {
  ZoneSet z{{zone("solid-flat", Gait::Trot, 0, 0, 1), zone("granular", Gait::Crawl, 4, 0, 2),
             zone("poor-foothold", Gait::Amble, 0, 4, 2)},
            wide_safe_region()};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0, 4);
  PolicyState a = init_policy(z), b = init_policy(z);
  for (int k = 0; k < 5000; ++k) {
    const PcaPoint p{nd(rng), nd(rng)};
    auto [na, da] = policy_step(a, p, z, PolicyConfig{});
    auto [nb, db] = policy_step(b, p, z, PolicyConfig{});
    ASSERT_EQ(na, nb);
    ASSERT_EQ(da.gait, db.gait);
    a = na;
    b = nb;
  }
}

TEST(GaitPolicy, SafetyDominanceAndExclusionSoundness) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-15, 15);
  std::uniform_int_distribution<int> gi(0, 2);
  for (int run = 0; run < 200; ++run) {
    ZoneSet z;
    z.sz.push_back(zone("t0", Gait::Trot, u(rng), u(rng), 1));
    for (int i = 1; i < 5; ++i) {
      z.sz.push_back(zone("t" + std::to_string(i), kAllGaits[gi(rng)], u(rng), u(rng),
                          0.5 + std::abs(u(rng)) / 5));
    }
    z.gamma_safe.cov = Eigen::Matrix2d::Identity() * 40;
    z.gamma_safe.chi2 = 13.82;
    PolicyConfig cfg;
    cfg.d_min = static_cast<int>(rng() % 4);
    cfg.k_exit = 1 + static_cast<int>(rng() % 3);
    PolicyState s = init_policy(z);
    for (int k = 0; k < 500; ++k) {
      const PcaPoint p{2 * u(rng), 2 * u(rng)};
      auto [next, d] = policy_step(s, p, z, cfg);
      check_invariants(next, d, z);
      if (!contains(z.gamma_safe, p)) ASSERT_EQ(d.mode, Mode::Halt);
      s = next;
    }
  }
}

TEST(GaitPolicy, ConvergesInsideFixedEllipse) {
  // Exclusion reset after K_stable is disabled here; with it the bound on
  // gait changes does not hold for nested ellipses.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-6, 6), area(3, 40);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> gi(0, 2);
  PolicyConfig cfg = literal();
  cfg.k_stable = std::numeric_limits<int>::max();
  int converged = 0;
  for (int run = 0; run < 1000; ++run) {
    ZoneSet z;
    z.sz.push_back(zone_with_area("lvz", Gait::Trot, 20 + u(rng), u(rng), area(rng)));
    for (int i = 1; i < 4; ++i) {
      z.sz.push_back(zone_with_area("e" + std::to_string(i), kAllGaits[gi(rng)], u(rng), u(rng),
                                    area(rng)));
    }
    z.gamma_safe.cov = Eigen::Matrix2d::Identity() * 1e3;
    z.gamma_safe.chi2 = 13.82;
    const std::size_t j = 1 + rng() % 3;
    const auto& target = z.sz[j].region;
    const Eigen::Matrix2d l = (target.cov * target.chi2).llt().matrixL();

    PolicyState s = init_policy(z);
    std::optional<Gait> gait = s.gait;
    int changes = 0, settled_at = -1;
    for (int k = 0; k < 3000; ++k) {
      Eigen::Vector2d p;
      do {
        const Eigen::Vector2d g(nd(rng), nd(rng));
        p = target.mean + l * g / std::max(1.0, g.norm());
      } while (contains(z.sz[0].region, p) || !contains(target, p));
      auto [next, d] = policy_step(s, {p.x(), p.y()}, z, cfg);
      ASSERT_TRUE(d.gait.has_value());
      if (d.gait != gait) {
        ++changes;
        gait = d.gait;
      }
      if (next.active == j && settled_at < 0) settled_at = k;
      if (settled_at >= 0) ASSERT_EQ(next.active, j);
      s = next;
    }
    ASSERT_GE(settled_at, 0) << "run " << run;
    EXPECT_LE(changes, static_cast<int>(z.sz.size()) - 1);
    EXPECT_EQ(gait, z.sz[j].gait);
    ++converged;
  }
  EXPECT_EQ(converged, 1000);
}

TEST(GaitCase, Names) {
  EXPECT_EQ(to_string(GaitCase::InSZ_MinArea), "InSZ_MinArea");
  EXPECT_EQ(to_string(GaitCase::OutGammaSafe), "OutGammaSafe");
}
