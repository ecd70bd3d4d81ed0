#include "sb2g/active_search.hpp"

#include "sb2g/entropy.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

using namespace sb2g;
using fixtures::labels_of;

namespace {

LabelInfo exact_label(const std::string& name) {
  LabelInfo l;
  l.name = name;
  l.base_detection = 1.0;
  l.optimal_detection_distance = 2.0;
  return l;
}

struct Open {
  OccupancyGrid grid = OccupancyGrid::from_rows(fixtures::room_rows(64, 64), 0.25);
  NavGrid nav{grid, 0.25};
};

}  // namespace

TEST(ActiveSearch, DeterministicSensorDrivesObjectiveToZero) {
  Open open;
  SensorModel s;
  s.labels = LabelRegistry({exact_label("a"), exact_label("b")});
  s.noise.confusion = Eigen::Matrix2d::Identity();
  SearchWorld world{&s, &open.nav, &open.grid, PlannerConfig{}};

  ObjectBelief b;
  b.mean = Vec2(8, 8);
  b.cov = Mat2::Identity() * 4.0;
  b.labels = labels_of({0.5, 0.5});
  RobotState r;
  r.position = Vec2(6, 8);
  const auto plan = plan_active_search(b, r, world, 42, SearchMethod::exhaustive);
  EXPECT_GT(entropy_objective(b, world.config.entropy_weight), 0.5);
  EXPECT_NEAR(plan.value, 0.0, 1e-12);
}

TEST(ActiveSearch, BranchAndBoundMatchesExhaustiveAtSixMetres) {
  const auto sc = fixtures::load("open-hall");
  NavGrid nav(sc.floors[0], 0.25);
  SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  ObjectBelief b;
  b.mean = sc.objects[0].position;
  b.cov = Mat2::Identity() * 9.0;
  b.labels = labels_of({0.7, 0.1, 0.1, 0.1});
  b.heading_mean = sc.objects[0].orientation;
  const RobotState r = sc.robot.start;
  ASSERT_NEAR((b.mean - r.position).norm(), 6.0, 1e-12);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto bnb = plan_active_search(b, r, world, seed, SearchMethod::branch_and_bound);
    const auto exh = plan_active_search(b, r, world, seed, SearchMethod::exhaustive);
    EXPECT_EQ(bnb.best, exh.best);
    EXPECT_NEAR(bnb.value, exh.value, 1e-9);
    EXPECT_LE(bnb.stats.nodes, exh.stats.nodes);
    EXPECT_EQ(bnb.candidates.size(), static_cast<std::size_t>(sc.planner.action_samples));
    EXPECT_LT(bnb.value, entropy_objective(b, sc.planner.entropy_weight));
  }
}

TEST(ActiveSearch, ChosenActionBeatsStaying) {
  const auto sc = fixtures::load("open-hall");
  NavGrid nav(sc.floors[0], 0.25);
  SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  ObjectBelief b;
  b.mean = sc.objects[0].position;
  b.cov = Mat2::Identity() * 9.0;
  b.labels = labels_of({0.7, 0.1, 0.1, 0.1});
  const RobotState r = sc.robot.start;

  const auto plan = plan_active_search(b, r, world, 7);
  ASSERT_NE(plan.best, 0);
  // One step of expected objective at the stay pose versus the chosen pose.
  auto one_step = [&](const Pose2& p) {
    RobotState at = r;
    at.position = p.position;
    at.heading = p.heading;
    std::vector<SearchOutcome> outs;
    sample_outcomes(b, at, world, 99, outs);
    double v = 0.0;
    for (const auto& o : outs) v += o.weight * entropy_objective(o.belief, sc.planner.entropy_weight);
    return v;
  };
  EXPECT_LT(one_step(plan.candidates[static_cast<std::size_t>(plan.best)]), entropy_objective(b, 0.1));
  EXPECT_LE(plan.value, entropy_objective(b, 0.1));
}

TEST(ActiveSearch, SettledBeliefStaysPut) {
  const auto sc = fixtures::load("open-hall");
  NavGrid nav(sc.floors[0], 0.25);
  SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  ObjectBelief b;
  b.mean = Vec2(8, 8);
  b.cov = Mat2::Zero();
  b.labels = labels_of({1.0, 0.0, 0.0, 0.0});
  RobotState r;
  r.position = Vec2(6.5, 8);
  const auto plan = plan_active_search(b, r, world, 3);
  EXPECT_EQ(plan.best, 0);
  EXPECT_EQ(plan.value, 0.0);
  EXPECT_EQ(plan.candidates[0].position, r.position);
}

TEST(ActiveSearch, OutcomeWeightsSumToOne) {
  const auto sc = fixtures::load("open-hall");
  NavGrid nav(sc.floors[0], 0.25);
  SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  ObjectBelief b;
  b.mean = Vec2(9, 8);
  b.cov = Mat2::Identity();
  b.labels = labels_of({0.4, 0.3, 0.2, 0.1});
  RobotState r;
  r.position = Vec2(6, 8);
  for (bool leaf : {false, true}) {
    std::vector<SearchOutcome> outs;
    sample_outcomes(b, r, world, 5, outs, leaf);
    double total = 0.0;
    for (const auto& o : outs) {
      total += o.weight;
      EXPECT_NEAR(o.belief.labels.sum(), 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(outs.size(), 1u + static_cast<std::size_t>(sc.planner.outcome_samples));
  }
}

TEST(ActiveSearch, SameSeedSameTree) {
  const auto sc = fixtures::load("open-hall");
  NavGrid nav(sc.floors[0], 0.25);
  SearchWorld world{&sc.sensor, &nav, &sc.floors[0], sc.planner};
  ObjectBelief b;
  b.mean = Vec2(10, 9);
  b.cov = Mat2::Identity() * 4.0;
  b.labels = labels_of({0.7, 0.1, 0.1, 0.1});
  RobotState r;
  r.position = Vec2(6, 8);
  const auto a = plan_active_search(b, r, world, 17);
  const auto c = plan_active_search(b, r, world, 17);
  EXPECT_EQ(a.best, c.best);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.stats.nodes, c.stats.nodes);
}
