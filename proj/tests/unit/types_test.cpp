#include "sb2g/types.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sb2g;
using fixtures::labels_of;

TEST(NormalizeLabels, EqualWeightsSplitEvenly) {
  const auto p = normalize_label_distribution(labels_of({2.0, 2.0}));
  EXPECT_DOUBLE_EQ(p(0), 0.5);
  EXPECT_DOUBLE_EQ(p(1), 0.5);
}

TEST(NormalizeLabels, KeepsZeros) {
  const auto p = normalize_label_distribution(labels_of({0.0, 3.0, 1.0}));
  EXPECT_DOUBLE_EQ(p(0), 0.0);
  EXPECT_DOUBLE_EQ(p(1), 0.75);
  EXPECT_DOUBLE_EQ(p(2), 0.25);
}

TEST(NormalizeLabels, AllZeroIsDegenerate) {
  EXPECT_THROW(normalize_label_distribution(labels_of({0.0, 0.0})), DegenerateEvidence);
}

TEST(NormalizeLabels, UniformSumsToOne) {
  const auto u = uniform_labels(4);
  EXPECT_NEAR(u.sum(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(u(3), 0.25);
}

TEST(AffordanceStatus, OnlyMovesForward) {
  using S = AffordanceStatus;
  EXPECT_EQ(advance_status(S::to_be_inspected, S::inspected), S::inspected);
  EXPECT_EQ(advance_status(S::to_be_ascended, S::ascended), S::ascended);
  EXPECT_EQ(advance_status(S::to_be_inspected, S::dismissed), S::dismissed);
  EXPECT_THROW(advance_status(S::inspected, S::to_be_inspected), InvalidTransition);
  EXPECT_THROW(advance_status(S::dismissed, S::to_be_inspected), InvalidTransition);
  EXPECT_THROW(advance_status(S::ascended, S::dismissed), InvalidTransition);
  EXPECT_THROW(advance_status(S::to_be_inspected, S::ascended), InvalidTransition);
}

TEST(AffordanceStatus, RandomWalksAreMonotone) {
  using S = AffordanceStatus;
  const S all[] = {S::to_be_inspected, S::inspected, S::to_be_ascended, S::ascended, S::dismissed};
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    S s = trial % 2 ? S::to_be_inspected : S::to_be_ascended;
    bool resolved = false;
    for (int k = 0; k < 10; ++k) {
      const S next = all[rng() % 5];
      if (!is_allowed_transition(s, next)) continue;
      s = next;
      if (resolved) {
        EXPECT_TRUE(is_resolved(s));
      }
      resolved = is_resolved(s);
    }
  }
}

TEST(ControlLimits, ClampIntoEnvelope) {
  VelocityLimits lim;
  ControlInput u;
  u.vx = 3.0;
  u.vy = -2.0;
  u.omega = 9.0;
  const auto c = clamp_to_limits(u, lim);
  EXPECT_DOUBLE_EQ(c.vx, 1.0);
  EXPECT_DOUBLE_EQ(c.vy, -0.5);
  EXPECT_DOUBLE_EQ(c.omega, 1.0);
  EXPECT_TRUE(within_limits(c, lim));
  EXPECT_DOUBLE_EQ(clamp_to_limits(u, lim, Gait::stair).vx, 0.3);
}

TEST(Angles, WrapIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_angle(3.0 * std::numbers::pi + 0.25), -std::numbers::pi + 0.25, 1e-12);
}
