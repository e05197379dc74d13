#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "swarmdef/dynamics.hpp"
#include "swarmdef/resource.hpp"

using namespace swarmdef;

TEST(Dynamics, DefaultParams) {
  auto a = default_attacker_params();
  auto d = default_defender_params();
  EXPECT_DOUBLE_EQ(a.u_max, 9.0);
  EXPECT_DOUBLE_EQ(a.drag, 1.5);
  EXPECT_DOUBLE_EQ(d.u_max, 18.4);
  EXPECT_DOUBLE_EQ(d.interception_radius, 5.0);
  EXPECT_DOUBLE_EQ(dynamics::speed_bound(a), 6.0);
  EXPECT_NEAR(dynamics::speed_bound(d), 12.2667, 1e-4);
}

TEST(Dynamics, ZeroInputDecaysVelocity) {
  AgentParams p = default_attacker_params();
  AgentState s{Vec2(1, 2), Vec2(3, 0)};
  AgentState n = dynamics::step(s, Vec2::Zero(), 1.0, p);
  EXPECT_NEAR(n.velocity.x(), 3.0 * std::exp(-1.5), 1e-12);
  // ∫ 3 e^{-1.5 t} dt over [0, 1]
  EXPECT_NEAR(n.position.x(), 1.0 + 2.0 * (1.0 - std::exp(-1.5)), 1e-12);
  EXPECT_DOUBLE_EQ(n.position.y(), 2.0);
}

TEST(Dynamics, StepComposesExactly) {
  AgentParams p = default_defender_params();
  AgentState s{Vec2(0, 0), Vec2(1, -2)};
  Vec2 a(5, 7);
  AgentState one = dynamics::step(s, a, 0.2, p);
  AgentState two = dynamics::step(dynamics::step(s, a, 0.1, p), a, 0.1, p);
  EXPECT_NEAR((one.position - two.position).norm(), 0.0, 1e-12);
  EXPECT_NEAR((one.velocity - two.velocity).norm(), 0.0, 1e-12);
}

TEST(Dynamics, MatchesRk4OnRandomInputs) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AgentParams p = default_defender_params();
  for (int run = 0; run < 10; ++run) {
    AgentState s{Vec2(50 * u(rng), 50 * u(rng)), Vec2(5 * u(rng), 5 * u(rng))};
    AgentState ref = s;
    for (int k = 0; k < 50; ++k) {
      Vec2 a = dynamics::clamp_norm(Vec2(20 * u(rng), 20 * u(rng)), p.u_max);
      s = dynamics::step(s, a, 0.02, p);
      ref = oracle::rk4(ref, a, p.drag, 0.02, 1e-4);
    }
    EXPECT_LT((s.position - ref.position).norm(), 1e-6);
    EXPECT_LT((s.velocity - ref.velocity).norm(), 1e-6);
  }
}

TEST(Dynamics, SpeedStaysBelowBound) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  AgentParams p = default_attacker_params();
  const double vbar = dynamics::speed_bound(p);
  AgentState s;
  for (int k = 0; k < 5000; ++k) {
    s = dynamics::step(s, p.u_max * unit_vector(ang(rng)), 0.02, p);
    ASSERT_LE(s.velocity.norm(), vbar + 1e-9);
  }
}

TEST(Dynamics, TerminalSpeeds) {
  for (auto [p, expect] : {std::pair{default_attacker_params(), 6.0}, std::pair{default_defender_params(), 12.27}}) {
    AgentState s;
    for (int k = 0; k < 1000; ++k) s = dynamics::step(s, Vec2(p.u_max, 0), 0.02, p);
    EXPECT_NEAR(s.velocity.norm(), expect, 0.01);
  }
}

TEST(Dynamics, OversizedInputIsClamped) {
  AgentParams p = default_attacker_params();
  AgentState a = dynamics::step({}, Vec2(100, 0), 0.1, p);
  AgentState b = dynamics::step({}, Vec2(p.u_max, 0), 0.1, p);
  EXPECT_NEAR((a.velocity - b.velocity).norm(), 0.0, 1e-12);
}

TEST(Dynamics, RejectsBadInput) {
  AgentParams p = default_attacker_params();
  EXPECT_THROW(dynamics::step({}, Vec2::Zero(), 0.0, p), std::invalid_argument);
  EXPECT_THROW(dynamics::step({}, Vec2(NAN, 0), 0.1, p), std::invalid_argument);
  AgentParams bad = p;
  bad.drag = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Dynamics, ReachDistanceFromRest) {
  AgentParams p = default_defender_params();
  const double c = p.drag, vbar = dynamics::speed_bound(p);
  for (double t : {0.0, 0.5, 2.0, 10.0}) {
    EXPECT_NEAR(dynamics::reach_distance(t, 0.0, p), vbar * (t - (1 - std::exp(-c * t)) / c), 1e-12);
  }
  // Matches the integrator under full thrust.
  AgentState s;
  for (int k = 0; k < 100; ++k) s = dynamics::step(s, Vec2(p.u_max, 0), 0.02, p);
  EXPECT_NEAR(s.position.x(), dynamics::reach_distance(2.0, 0.0, p), 1e-9);
}

TEST(Dynamics, InterceptionTimeIsConsistent) {
  WorldGeometry w;
  AgentParams dp = default_defender_params(), ap = default_attacker_params();
  AgentState att{Vec2(200, 0), Vec2(-6, 0)};
  AgentState near{Vec2(150, 10), Vec2::Zero()};
  AgentState far{Vec2(150, 60), Vec2::Zero()};
  double tn = dynamics::interception_time(near, att, w, dp, ap);
  double tf = dynamics::interception_time(far, att, w, dp, ap);
  ASSERT_TRUE(std::isfinite(tn));
  EXPECT_LT(tn, tf);
  // At tn the attacker is within the defender's reach plus capture radius.
  Vec2 target = dynamics::attacker_position_at(att, tn, w, ap);
  double d = (target - near.position).norm();
  EXPECT_NEAR(dynamics::reach_distance(tn, 0.0, dp), d - dp.interception_radius, 0.02);
  EXPECT_TRUE(dynamics::winning_region(near, att, w, dp, ap));

  AgentState behind{Vec2(600, 0), Vec2::Zero()};
  EXPECT_FALSE(dynamics::winning_region(behind, AgentState{Vec2(100, 0), Vec2::Zero()}, w, dp, ap));
}

TEST(Dynamics, AlreadyWithinCaptureRadius) {
  WorldGeometry w;
  AgentState att{Vec2(100, 0), Vec2::Zero()};
  AgentState def{Vec2(103, 0), Vec2::Zero()};
  EXPECT_EQ(dynamics::interception_time(def, att, w, default_defender_params(), default_attacker_params()), 0.0);
}

TEST(Dynamics, TimeOptimalPathEndsOnBoundary) {
  WorldGeometry w;
  auto path = dynamics::time_optimal_traj(Vec2(0, 200), w);
  EXPECT_NEAR(path.total_length(), 155.0, 1e-12);
  EXPECT_NEAR((path.position_at(1e9) - Vec2(0, 45)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(path.tangent_angle_at(10.0), -M_PI / 2, 1e-12);
  EXPECT_THROW(dynamics::time_optimal_traj(Vec2(0, 10), w), std::invalid_argument);
}

TEST(Dynamics, PathParametrizationPiecewise) {
  PathParametrization p({Vec2(0, 0), Vec2(3, 4), Vec2(3, 10)});
  EXPECT_DOUBLE_EQ(p.total_length(), 11.0);
  EXPECT_NEAR((p.position_at(2.5) - Vec2(1.5, 2.0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.position_at(8.0) - Vec2(3, 7)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((p.position_at(-1) - Vec2(0, 0)).norm(), 0.0, 1e-12);
}

TEST(World, ValidateRejectsOverlaps) {
  WorldGeometry w;
  w.safe_areas.push_back({Vec2(50, 0), 10});
  EXPECT_THROW(w.validate(), std::invalid_argument);
  w.safe_areas[0].center = Vec2(200, 0);
  EXPECT_NO_THROW(w.validate());
  EXPECT_TRUE(w.inside_protected(Vec2(30, 30)));
  EXPECT_FALSE(w.inside_protected(Vec2(40, 40)));
}

TEST(Resource, IdentityAndTable) {
  ResourceAllocation id;
  EXPECT_EQ(id(7), 7);
  ResourceAllocation t(std::map<int, int>{{6, 5}});
  EXPECT_EQ(t(3), 3);
  EXPECT_EQ(t(6), 5);
  EXPECT_EQ(t(9), 8);
  EXPECT_THROW(ResourceAllocation(std::map<int, int>{{2, 4}, {3, 4}}), std::invalid_argument);
}
