#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmdef/binary_program.hpp"
#include "swarmdef/dynamics.hpp"
#include "swarmdef/formation.hpp"
#include "swarmdef/resource.hpp"

namespace swarmdef {

struct EngagementModel {
  WorldGeometry world;
  AgentParams defender = default_defender_params();
  AgentParams attacker = default_attacker_params();
};

namespace assignment {

// C^int: interception time if the attacker lies in the defender's winning
// region, bip::kLargeCost otherwise.
double interception_cost(const AgentState& defender, const AgentState& attacker,
                         const EngagementModel& model);

// Position of a defender flying straight at its intercept point, t seconds in.
Vec2 pursuit_position(const AgentState& defender, const AgentState& attacker, double t_int,
                      double t, const EngagementModel& model);

inline constexpr double kCollisionSampleDt = 0.1;

// C^col for engagements (d1 -> a1) and (d2 -> a2): 1 / first sampled time the
// two pursuers come closer than 2 body radii, 0 if they never do or if either
// engagement is infeasible.
double collision_cost(const AgentState& d1, const AgentState& a1, const AgentState& d2,
                      const AgentState& a2, const EngagementModel& model);

// Memoized interception and collision costs over fixed defender / attacker lists.
class EngagementCosts {
 public:
  EngagementCosts(std::vector<AgentState> defenders, std::vector<AgentState> attackers,
                  EngagementModel model);

  double interception(int d, int a) const;
  // Symmetric in the two engagements.
  double collision(int d1, int a1, int d2, int a2) const;

  int num_defenders() const { return static_cast<int>(defenders_.size()); }
  int num_attackers() const { return static_cast<int>(attackers_.size()); }

 private:
  std::vector<AgentState> defenders_;
  std::vector<AgentState> attackers_;
  EngagementModel model_;
  mutable std::vector<double> int_cache_;
  mutable std::map<std::array<int, 4>, double> col_cache_;
};

struct CadaaResult {
  // interceptor[i] is the index (into the defender list) assigned to attacker i.
  std::vector<int> interceptor;
  double objective = 0.0;
  bip::Solution solution;
};

// Collision-aware interception assignment. Every attacker gets exactly one
// defender, every defender takes at most one attacker. Throws
// std::invalid_argument if there are fewer defenders than attackers.
bip::BinaryProgram cadaa_program(const std::vector<int>& defenders, const std::vector<int>& attackers,
                                 const EngagementCosts& costs, double w);
CadaaResult cadaa(const std::vector<int>& defenders, const std::vector<int>& attackers,
                  const EngagementCosts& costs, double w, const bip::SolveBudget& budget = {});

struct GatherResult {
  // slot_owner[k][l] is the defender (index into the position list) sent to slot l of cluster k.
  std::vector<std::vector<int>> slot_owner;
  std::vector<double> gather_time;  // 𝒯_k
  double total_distance = 0.0;
};

GatherResult gather_milp(const std::vector<Vec2>& defenders,
                         const std::vector<std::vector<Vec2>>& slots,
                         const AgentParams& defender_params);

struct GatheringParams {
  double lead_time = 5.0;  // ΔT^g, per cluster
  double eps_tol = 0.1;
  double spacing = 2.0;
  double standoff = 15.0;  // ρ_pa
  int max_iterations = 60;
  ResourceAllocation rd;
  std::vector<int> capacities;  // per-cluster team sizes, overrides rd when set
};

struct GatheringPlan {
  std::vector<LineFormation> formations;
  std::vector<std::vector<int>> teams;  // β_c: defender ids per cluster, slot order
  std::vector<double> gamma;
  std::vector<double> lead;  // γ/v̄_a − 𝒯_k − ΔT^g
  int iterations = 0;
  bool converged = false;
};

// Bisects each cluster's formation point along its path to P so that the
// assigned sub-team arrives ΔT^g ahead of the swarm. Defenders are given as
// (id, position) pairs.
GatheringPlan gathering_formations(const std::vector<int>& defender_ids,
                                   const std::vector<Vec2>& defender_pos,
                                   const std::vector<Vec2>& cluster_com,
                                   const std::vector<int>& cluster_sizes,
                                   const EngagementModel& model, const GatheringParams& params);

bool risk_taking_check(const AgentState& cluster_com, const Vec2& gather_center,
                       const WorldGeometry& world);

struct WorstCaseReport {
  long n_delta = 0;     // MIQCQP decision vector length
  long n_delta_rs = 0;  // rs-MIQCQP decision vector length
  long n_rsm = 0;       // N'_rsM
  long n_ac_k = 0;
  long n_max = 0;
  // Exponents of the four heuristic summands, in order: CADAA pair,
  // N'_rsM − 1 full leaves, the largest leaf, the remainder leaf.
  std::vector<double> heuristic_exponents;
  double log2_heuristic = 0.0;
  double log2_rs = 0.0;
  double log2_full = 0.0;
  bool ordering_holds = false;  // heuristic < rs ≤ full
};

WorstCaseReport worst_case_costs(int n_attackers, int n_clusters, int n_unclustered,
                                 int n_defenders, int min_clusters);

}  // namespace assignment

// Data frozen at a split event: new clusters and unclustered attackers born
// from one parent swarm, and the parent's Open-StringNet in β order.
struct SplitSnapshot {
  std::vector<Vec2> cluster_centers;       // r_ac
  std::vector<int> cluster_sizes;          // n_ac
  std::vector<AgentState> unclustered;     // r_uc
  std::vector<int> unclustered_ids;
  std::vector<AgentState> defenders;       // β^− order
  std::vector<int> defender_ids;
  int n_attackers = 0;                     // N_a of the parent swarm
  ResourceAllocation rd;
  // Optional per-cluster defender counts overriding rd, used when the parent
  // team cannot cover every new cluster at full allocation.
  std::vector<int> capacities;
  EngagementModel model;

  int capacity(int k) const { return capacities.empty() ? rd(cluster_sizes.at(k)) : capacities.at(k); }

  int num_clusters() const { return static_cast<int>(cluster_sizes.size()); }
  int num_unclustered() const { return static_cast<int>(unclustered.size()); }
  int num_defenders() const { return static_cast<int>(defenders.size()); }
};

// task[l] for the defender at net position l: k in [0, N_ac) herds cluster k,
// N_ac + i intercepts unclustered attacker i.
struct SplitAssignment {
  std::vector<int> task;
  double cost = 0.0;  // split objective of the assignment
  long nodes = 0;
  double solve_seconds = 0.0;
};

enum class SplitSolver { Miqcqp, RsMiqcqp, Heuristic };

const char* to_string(SplitSolver s);
std::optional<SplitSolver> parse_split_solver(const std::string& name);

namespace assignment {

// Throws std::invalid_argument unless Σ R_d + N_uc matches the team size.
void check_capacity(const SplitSnapshot& snap);

class SplitCosts {
 public:
  explicit SplitCosts(const SplitSnapshot& snap);
  double herd(int l, int k) const { return herd_[l][k]; }
  const EngagementCosts& engagement() const { return engagement_; }

 private:
  std::vector<std::vector<double>> herd_;
  EngagementCosts engagement_;
};

bip::BinaryProgram split_program(const SplitSnapshot& snap, const SplitCosts& costs);
bip::BinaryProgram split_rs_program(const SplitSnapshot& snap, const SplitCosts& costs);

// Length of the reduced decision vector for the given dimensions.
long rs_vector_length(int n_defenders, int n_clusters, int n_unclustered);

SplitAssignment split_miqcqp(const SplitSnapshot& snap, const bip::SolveBudget& budget = {});
SplitAssignment split_rs_miqcqp(const SplitSnapshot& snap, const bip::SolveBudget& budget = {});
SplitAssignment hierarchical_dasa(const SplitSnapshot& snap, int min_clusters = 3, double w = 0.5,
                                  const bip::SolveBudget& budget = {});
SplitAssignment solve_split(const SplitSnapshot& snap, SplitSolver solver, int min_clusters = 3,
                            double w = 0.5, const bip::SolveBudget& budget = {});

// Split objective of any task vector, evaluated on the full program.
double split_cost(const SplitSnapshot& snap, const SplitCosts& costs, const std::vector<int>& task);

// Empty string if the assignment is valid, otherwise the first violation.
std::string check_split_assignment(const SplitSnapshot& snap, const std::vector<int>& task);

}  // namespace assignment
}  // namespace swarmdef
