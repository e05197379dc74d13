#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "support/oracles.hpp"
#include "swarmdef/assignment.hpp"
#include "swarmdef/bench.hpp"

using namespace swarmdef;

namespace {

SplitSnapshot fig3_snapshot() {
  std::ifstream in(std::string(SWARMDEF_SOURCE_DIR) + "/scenarios/fig3_snapshot.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_io::parse_snapshot(ss.str());
}

EngagementModel model() { return EngagementModel{}; }

}  // namespace

TEST(Interception, CostIsTimeOrLarge) {
  auto m = model();
  AgentState att{Vec2(200, 0), Vec2(-6, 0)};
  AgentState def{Vec2(150, 5), Vec2::Zero()};
  double c = assignment::interception_cost(def, att, m);
  EXPECT_NEAR(c, dynamics::interception_time(def, att, m.world, m.defender, m.attacker), 1e-12);
  AgentState hopeless{Vec2(-300, 0), Vec2::Zero()};
  EXPECT_EQ(assignment::interception_cost(hopeless, att, m), bip::kLargeCost);
}

TEST(Interception, PursuitEndsAtIntercept) {
  auto m = model();
  AgentState att{Vec2(200, 0), Vec2(-6, 0)};
  AgentState def{Vec2(150, 20), Vec2::Zero()};
  double t = assignment::interception_cost(def, att, m);
  Vec2 end = assignment::pursuit_position(def, att, t, t, m);
  Vec2 target = dynamics::attacker_position_at(att, t, m.world, m.attacker);
  EXPECT_LE((end - target).norm(), m.defender.interception_radius + 0.05);
  EXPECT_NEAR((assignment::pursuit_position(def, att, t, 0.0, m) - def.position).norm(), 0.0, 1e-12);
}

TEST(Collision, SymmetricAndZeroWhenApart) {
  auto m = model();
  // Pursuit lines that cross head-on near (100, 0).
  AgentState d1{Vec2(90, -20), Vec2::Zero()}, d2{Vec2(90, 20), Vec2::Zero()};
  AgentState a1{Vec2(130, 20), Vec2(-6, 0)}, a2{Vec2(130, -20), Vec2(-6, 0)};
  double c12 = assignment::collision_cost(d1, a1, d2, a2, m);
  double c21 = assignment::collision_cost(d2, a2, d1, a1, m);
  EXPECT_GT(c12, 0.0);
  EXPECT_DOUBLE_EQ(c12, c21);
  // Parallel, well separated.
  AgentState b1{Vec2(130, -20), Vec2(-6, 0)}, b2{Vec2(130, 20), Vec2(-6, 0)};
  EXPECT_EQ(assignment::collision_cost(d1, b1, d2, b2, m), 0.0);
}

TEST(Cadaa, MatchesBruteForceOfItsProgram) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> x(-40, 40), y(120, 200);
  auto m = model();
  for (int trial = 0; trial < 30; ++trial) {
    int na = std::uniform_int_distribution<int>(1, 3)(rng);
    int nd = std::uniform_int_distribution<int>(na, 5)(rng);
    std::vector<AgentState> defs, atts;
    for (int j = 0; j < nd; ++j) defs.push_back({Vec2(x(rng), 90), Vec2::Zero()});
    for (int i = 0; i < na; ++i) {
      Vec2 p(x(rng), y(rng));
      atts.push_back({p, -4.0 * p.normalized()});
    }
    assignment::EngagementCosts costs(defs, atts, m);
    std::vector<int> di(nd), ai(na);
    std::iota(di.begin(), di.end(), 0);
    std::iota(ai.begin(), ai.end(), 0);
    auto prog = assignment::cadaa_program(di, ai, costs, 0.5);
    auto r = assignment::cadaa(di, ai, costs, 0.5);
    ASSERT_EQ(r.solution.objective, bip::brute_force(prog).objective);
    std::set<int> used(r.interceptor.begin(), r.interceptor.end());
    EXPECT_EQ(used.size(), static_cast<size_t>(na));
  }
  assignment::EngagementCosts c({AgentState{}}, {AgentState{}, AgentState{}}, m);
  EXPECT_THROW(assignment::cadaa({0}, {0, 1}, c, 0.5), std::invalid_argument);
}

TEST(Gather, OptimalMatching) {
  std::vector<Vec2> defs{Vec2(0, 0), Vec2(10, 0), Vec2(20, 0)};
  std::vector<std::vector<Vec2>> slots{{Vec2(20, 5)}, {Vec2(0, 5), Vec2(10, 5)}};
  auto r = assignment::gather_milp(defs, slots, default_defender_params());
  EXPECT_EQ(r.slot_owner[0], (std::vector<int>{2}));
  EXPECT_EQ(r.slot_owner[1], (std::vector<int>{0, 1}));
  EXPECT_NEAR(r.total_distance, 15.0, 1e-12);
  EXPECT_THROW(assignment::gather_milp(defs, {{Vec2(0, 0)}}, default_defender_params()), std::invalid_argument);
}

TEST(Gather, FormationsLeadTheSwarm) {
  EngagementModel m;
  std::vector<int> ids;
  std::vector<Vec2> pos;
  for (int j = 0; j < 8; ++j) {
    ids.push_back(j);
    pos.emplace_back(-10 + 2.5 * j, 60);
  }
  assignment::GatheringParams gp;
  gp.spacing = 2.5;
  auto plan = assignment::gathering_formations(ids, pos, {Vec2(-60, 250), Vec2(80, 240)}, {4, 4}, m, gp);
  ASSERT_TRUE(plan.converged);
  ASSERT_EQ(plan.teams.size(), 2u);
  std::set<int> all;
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(plan.teams[k].size(), 4u);
    EXPECT_GE(plan.lead[k], -gp.eps_tol);
    all.insert(plan.teams[k].begin(), plan.teams[k].end());
    EXPECT_GT((plan.formations[k].center - m.world.protected_center).norm(), m.world.protected_radius);
  }
  EXPECT_EQ(all.size(), 8u);

  gp.capacities = {5, 3};
  auto capped = assignment::gathering_formations(ids, pos, {Vec2(-60, 250), Vec2(80, 240)}, {4, 4}, m, gp);
  EXPECT_EQ(capped.teams[0].size(), 5u);
  EXPECT_EQ(capped.teams[1].size(), 3u);
  gp.capacities = {8};
  EXPECT_THROW(assignment::gathering_formations(ids, pos, {Vec2(-60, 250), Vec2(80, 240)}, {4, 4}, m, gp),
               std::invalid_argument);
}

TEST(RiskTaking, InsideGatherRadiusAndInbound) {
  WorldGeometry w;
  Vec2 gather(0, 150);
  EXPECT_TRUE(assignment::risk_taking_check({Vec2(0, 120), Vec2(0, -3)}, gather, w));
  EXPECT_FALSE(assignment::risk_taking_check({Vec2(0, 180), Vec2(0, -3)}, gather, w));
  EXPECT_FALSE(assignment::risk_taking_check({Vec2(0, 120), Vec2(0, 3)}, gather, w));
}

TEST(WorstCase, ThirtyThreeEight) {
  auto r = assignment::worst_case_costs(30, 3, 8, 30, 3);
  EXPECT_EQ(r.n_delta, 330);
  EXPECT_EQ(r.n_delta_rs, 218);
  EXPECT_EQ(r.n_rsm, 1);
  EXPECT_EQ(r.n_ac_k, 0);
  EXPECT_EQ(r.n_max, 22);
  // log2(2^64 + 2^66), the two surviving summands.
  EXPECT_NEAR(r.log2_heuristic, 66.0 + std::log2(1.25), 1e-9);
  EXPECT_TRUE(r.ordering_holds);
  EXPECT_THROW(assignment::worst_case_costs(-1, 1, 1, 1, 3), std::invalid_argument);
}

TEST(SplitProgram, VectorLengths) {
  EXPECT_EQ(assignment::rs_vector_length(30, 3, 8), 218);
  EXPECT_EQ(assignment::rs_vector_length(5, 1, 4), 5 + 5 * 4);
  auto inst = bench::gen_instance(3, 12, 2, 2);
  assignment::SplitCosts costs(inst.snapshot);
  EXPECT_EQ(assignment::split_program(inst.snapshot, costs).num_vars(), 12 * 4);
  EXPECT_EQ(assignment::split_rs_program(inst.snapshot, costs).num_vars(), 12 * 2 + 4 * 2);
}

TEST(SplitProgram, CapacityMismatchRejected) {
  auto inst = bench::gen_instance(1, 9, 2, 1);
  SplitSnapshot s = inst.snapshot;
  s.defenders.pop_back();
  EXPECT_THROW(assignment::split_miqcqp(s), std::invalid_argument);
  s = inst.snapshot;
  s.capacities = {1};
  EXPECT_THROW(assignment::check_capacity(s), std::invalid_argument);
}

TEST(SplitChecker, FlagsEachViolation) {
  auto inst = bench::gen_instance(2, 7, 2, 1);  // clusters of 3 and 3, one unclustered
  const auto& s = inst.snapshot;
  ASSERT_EQ(s.cluster_sizes, (std::vector<int>{3, 3}));
  EXPECT_EQ(assignment::check_split_assignment(s, {2, 0, 0, 0, 1, 1, 1}), "");
  EXPECT_NE(assignment::check_split_assignment(s, {2, 0, 0, 1, 0, 1, 1}), "");  // not contiguous
  EXPECT_NE(assignment::check_split_assignment(s, {0, 0, 0, 0, 1, 1, 1}), "");  // uncovered
  EXPECT_NE(assignment::check_split_assignment(s, {2, 0, 0, 1, 1, 1, 1}), "");  // capacity
  EXPECT_NE(assignment::check_split_assignment(s, {2, 0, 0, 0, 1, 1}), "");     // length
  EXPECT_NE(assignment::check_split_assignment(s, {3, 0, 0, 0, 1, 1, 1}), "");  // range
}

TEST(SplitSolvers, MatchExhaustiveSearch) {
  struct Dims {
    int na, nac, nuc;
  };
  for (Dims d : {Dims{6, 1, 2}, Dims{8, 2, 2}, Dims{9, 2, 3}, Dims{10, 3, 1}, Dims{7, 1, 4}}) {
    for (unsigned seed = 1; seed <= 4; ++seed) {
      auto inst = bench::gen_instance(seed, d.na, d.nac, d.nuc);
      auto m = assignment::split_miqcqp(inst.snapshot);
      auto rs = assignment::split_rs_miqcqp(inst.snapshot);
      ASSERT_EQ(m.cost, oracle::split_exhaustive(inst.snapshot)) << d.na << ' ' << seed;
      ASSERT_EQ(rs.cost, oracle::split_exhaustive(inst.snapshot, true)) << d.na << ' ' << seed;
    }
  }
}

TEST(SplitSolvers, RestrictionOrderingAndValidity) {
  std::mt19937 rng(8);
  struct Dims {
    int na, nac, nuc;
  };
  const Dims dims[] = {{12, 2, 2}, {12, 3, 2}, {20, 2, 4}, {20, 3, 8}, {15, 1, 6}, {20, 4, 0}};
  for (const Dims& d : dims) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      auto inst = bench::gen_instance(seed, d.na, d.nac, d.nuc);
      auto m = assignment::solve_split(inst.snapshot, SplitSolver::Miqcqp);
      auto rs = assignment::solve_split(inst.snapshot, SplitSolver::RsMiqcqp);
      auto h = assignment::solve_split(inst.snapshot, SplitSolver::Heuristic);
      for (const auto* a : {&m, &rs, &h}) {
        ASSERT_EQ(assignment::check_split_assignment(inst.snapshot, a->task), "");
      }
      EXPECT_LE(m.cost, rs.cost);
      EXPECT_LE(rs.cost, h.cost);
      EXPECT_GE(bench::pct_error(rs.cost, h.cost), 0.0);
    }
  }
}

TEST(SplitSolvers, RsInterceptorsAreTerminal) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto inst = bench::gen_instance(seed, 20, 2, 3);
    auto rs = assignment::split_rs_miqcqp(inst.snapshot);
    const int d = inst.snapshot.num_defenders(), k = inst.snapshot.num_clusters();
    for (int l = 3; l < d - 3; ++l) EXPECT_LT(rs.task[l], k) << "seed " << seed << " position " << l;
  }
}

TEST(SplitSolvers, DegenerateHeuristicIsExact) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    auto inst = bench::gen_instance(seed, 12, 1, 0);
    auto rs = assignment::split_rs_miqcqp(inst.snapshot);
    auto h = assignment::hierarchical_dasa(inst.snapshot);
    EXPECT_EQ(rs.cost, h.cost);
    EXPECT_EQ(bench::pct_error(rs.cost, h.cost), 0.0);
  }
  auto inst = bench::gen_instance(1, 12, 2, 0);
  EXPECT_THROW(assignment::hierarchical_dasa(inst.snapshot, 2), std::invalid_argument);
}

TEST(SplitSolvers, HeuristicRecursesAboveThreshold) {
  auto inst = bench::gen_instance(4, 40, 8, 4);
  auto h = assignment::hierarchical_dasa(inst.snapshot, 3);
  EXPECT_EQ(assignment::check_split_assignment(inst.snapshot, h.task), "");
}

TEST(Fig3Snapshot, SolversAgreeWithExhaustiveSearch) {
  SplitSnapshot s = fig3_snapshot();
  ASSERT_EQ(s.num_defenders(), 13);
  ASSERT_EQ(s.num_clusters(), 2);
  ASSERT_EQ(s.num_unclustered(), 3);
  long leaves = 0;
  double best = oracle::split_exhaustive(s, false, &leaves);
  EXPECT_GT(leaves, 100);
  auto m = assignment::split_miqcqp(s);
  auto rs = assignment::split_rs_miqcqp(s);
  auto h = assignment::hierarchical_dasa(s);
  EXPECT_EQ(m.cost, best);
  EXPECT_EQ(rs.cost, oracle::split_exhaustive(s, true));
  EXPECT_LE(rs.cost, h.cost);
  // Restricted structure: interceptors at both ends, two herding blocks between.
  const int k = s.num_clusters();
  EXPECT_GE(rs.task.front(), k);
  EXPECT_GE(rs.task.back(), k);
  int blocks = 0;
  for (int l = 0; l < 13; ++l) {
    if (rs.task[l] < k && (l == 0 || rs.task[l - 1] != rs.task[l])) ++blocks;
  }
  EXPECT_EQ(blocks, 2);
}
