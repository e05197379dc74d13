#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "swarmdef/assignment.hpp"

namespace swarmdef::assignment {

bip::BinaryProgram cadaa_program(const std::vector<int>& defenders, const std::vector<int>& attackers,
                                 const EngagementCosts& costs, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("cadaa: weight must lie in [0, 1]");
  const int nd = static_cast<int>(defenders.size());
  const int na = static_cast<int>(attackers.size());
  if (nd < na) throw std::invalid_argument("cadaa: fewer defenders than attackers");

  auto var = [na](int j, int i) { return j * na + i; };
  bip::BinaryProgram prog(nd * na);
  for (int j = 0; j < nd; ++j) {
    for (int i = 0; i < na; ++i) {
      prog.set_linear_cost(var(j, i), (1.0 - w) * costs.interception(defenders[j], attackers[i]));
      prog.meta(var(j, i)) = {defenders[j], attackers[i], 'i'};
    }
  }
  if (w > 0.0) {
    for (int j = 0; j < nd; ++j) {
      for (int i = 0; i < na; ++i) {
        for (int j2 = j + 1; j2 < nd; ++j2) {
          for (int i2 = 0; i2 < na; ++i2) {
            if (i2 == i) continue;
            double c = costs.collision(defenders[j], attackers[i], defenders[j2], attackers[i2]);
            // Both orderings of the pair appear in the sum.
            if (c != 0.0) prog.add_quadratic_cost(var(j, i), var(j2, i2), 2.0 * w * c);
          }
        }
      }
    }
  }
  for (int i = 0; i < na; ++i) {
    bip::Constraint row;
    row.name = "attacker" + std::to_string(i);
    for (int j = 0; j < nd; ++j) row.linear.push_back({var(j, i), 1.0});
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  for (int j = 0; j < nd; ++j) {
    bip::Constraint row;
    row.name = "defender" + std::to_string(j);
    row.sense = bip::Sense::Le;
    for (int i = 0; i < na; ++i) row.linear.push_back({var(j, i), 1.0});
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  return prog;
}

CadaaResult cadaa(const std::vector<int>& defenders, const std::vector<int>& attackers,
                  const EngagementCosts& costs, double w, const bip::SolveBudget& budget) {
  CadaaResult out;
  const int na = static_cast<int>(attackers.size());
  if (na == 0) return out;
  bip::BinaryProgram prog = cadaa_program(defenders, attackers, costs, w);
  out.solution = bip::solve(prog, budget);
  if (out.solution.status != bip::SolveStatus::Optimal) {
    throw std::runtime_error("cadaa: program infeasible");
  }
  out.objective = out.solution.objective;
  out.interceptor.assign(na, -1);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < static_cast<int>(defenders.size()); ++j) {
      if (out.solution.assignment[j * na + i]) {
        out.interceptor[i] = j;
        break;
      }
    }
  }
  return out;
}

GatherResult gather_milp(const std::vector<Vec2>& defenders,
                         const std::vector<std::vector<Vec2>>& slots,
                         const AgentParams& defender_params) {
  std::vector<std::pair<int, int>> flat;
  for (int k = 0; k < static_cast<int>(slots.size()); ++k) {
    for (int l = 0; l < static_cast<int>(slots[k].size()); ++l) flat.push_back({k, l});
  }
  const int n = static_cast<int>(defenders.size());
  const int m = static_cast<int>(flat.size());
  if (n != m) throw std::invalid_argument("gather_milp: defender and slot counts differ");

  GatherResult out;
  out.slot_owner.resize(slots.size());
  out.gather_time.assign(slots.size(), 0.0);
  for (size_t k = 0; k < slots.size(); ++k) out.slot_owner[k].assign(slots[k].size(), -1);
  if (n == 0) return out;

  bip::BinaryProgram prog(n * m);
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < m; ++s) {
      const Vec2& slot = slots[flat[s].first][flat[s].second];
      prog.set_linear_cost(j * m + s, (defenders[j] - slot).norm());
      prog.meta(j * m + s) = {j, s, 's'};
    }
  }
  for (int j = 0; j < n; ++j) {
    bip::Constraint row;
    for (int s = 0; s < m; ++s) row.linear.push_back({j * m + s, 1.0});
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  for (int s = 0; s < m; ++s) {
    bip::Constraint row;
    for (int j = 0; j < n; ++j) row.linear.push_back({j * m + s, 1.0});
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  bip::Solution sol = bip::solve(prog);
  if (sol.status != bip::SolveStatus::Optimal) throw std::runtime_error("gather_milp: infeasible");
  out.total_distance = sol.objective;
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < m; ++s) {
      if (!sol.assignment[j * m + s]) continue;
      auto [k, l] = flat[s];
      out.slot_owner[k][l] = j;
      AgentState st;
      st.position = defenders[j];
      out.gather_time[k] = std::max(out.gather_time[k],
                                    dynamics::time_to_reach(st, slots[k][l], defender_params));
    }
  }
  return out;
}

GatheringPlan gathering_formations(const std::vector<int>& defender_ids,
                                   const std::vector<Vec2>& defender_pos,
                                   const std::vector<Vec2>& cluster_com,
                                   const std::vector<int>& cluster_sizes,
                                   const EngagementModel& model, const GatheringParams& params) {
  const int nk = static_cast<int>(cluster_com.size());
  if (nk == 0 || cluster_sizes.size() != cluster_com.size()) {
    throw std::invalid_argument("gathering_formations: need matching non-empty cluster data");
  }
  if (defender_ids.size() != defender_pos.size()) {
    throw std::invalid_argument("gathering_formations: defender ids and positions differ in size");
  }
  if (!params.capacities.empty() && params.capacities.size() != cluster_sizes.size()) {
    throw std::invalid_argument("gathering_formations: one capacity per cluster required");
  }
  auto team_size = [&](int k) {
    return params.capacities.empty() ? params.rd(cluster_sizes[k]) : params.capacities[k];
  };
  std::vector<PathParametrization> paths;
  std::vector<double> lo(nk, 0.0), hi(nk);
  for (int k = 0; k < nk; ++k) {
    paths.push_back(dynamics::time_optimal_traj(cluster_com[k], model.world));
    hi[k] = std::max(0.0, paths[k].total_length() - params.standoff);
  }
  const double va = dynamics::speed_bound(model.attacker);

  GatheringPlan plan;
  plan.gamma.assign(nk, 0.0);
  plan.lead.assign(nk, 0.0);
  for (int it = 1; it <= params.max_iterations; ++it) {
    plan.iterations = it;
    std::vector<std::vector<Vec2>> slots(nk);
    plan.formations.clear();
    for (int k = 0; k < nk; ++k) {
      plan.gamma[k] = 0.5 * (lo[k] + hi[k]);
      Vec2 center = paths[k].position_at(plan.gamma[k]);
      double phi = paths[k].tangent_angle_at(plan.gamma[k]) - M_PI;
      plan.formations.push_back(
          formation::make_line(center, phi, team_size(k), params.spacing));
      slots[k] = plan.formations.back().slots;
    }
    GatherResult g = gather_milp(defender_pos, slots, model.defender);
    double total = 0.0;
    bool collapsed = true;
    plan.teams.assign(nk, {});
    for (int k = 0; k < nk; ++k) {
      for (int owner : g.slot_owner[k]) plan.teams[k].push_back(defender_ids[owner]);
      plan.lead[k] = plan.gamma[k] / va - g.gather_time[k] - params.lead_time;
      total += std::abs(plan.lead[k]);
      // Late defenders need a formation closer to P, early ones can meet the swarm farther out.
      if (plan.lead[k] < 0.0) {
        lo[k] = plan.gamma[k];
      } else {
        hi[k] = plan.gamma[k];
      }
      collapsed = collapsed && hi[k] - lo[k] < 1e-9;
    }
    if (total <= params.eps_tol) {
      plan.converged = true;
      break;
    }
    if (collapsed) break;
  }
  if (!plan.converged) {
    spdlog::warn("gathering_formations: no convergence after {} iterations", plan.iterations);
  }
  return plan;
}

bool risk_taking_check(const AgentState& cluster_com, const Vec2& gather_center,
                       const WorldGeometry& world) {
  Vec2 rel = cluster_com.position - world.protected_center;
  return rel.norm() <= (gather_center - world.protected_center).norm() &&
         rel.dot(cluster_com.velocity) < 0.0;
}

WorstCaseReport worst_case_costs(int n_attackers, int n_clusters, int n_unclustered,
                                 int n_defenders, int min_clusters) {
  if (n_attackers < 0 || n_clusters < 0 || n_unclustered < 0 || n_defenders < 0 ||
      min_clusters < 1) {
    throw std::invalid_argument("worst_case_costs: invalid dimensions");
  }
  WorstCaseReport r;
  r.n_delta = static_cast<long>(n_defenders) * (n_clusters + n_unclustered);
  r.n_delta_rs = rs_vector_length(n_defenders, n_clusters, n_unclustered);
  r.n_rsm = n_clusters / min_clusters;
  r.n_ac_k = n_clusters - r.n_rsm * min_clusters;
  r.n_max = n_attackers - n_unclustered - 3 * r.n_ac_k - 3L * min_clusters * (r.n_rsm - 1);

  const double nb = min_clusters;
  r.heuristic_exponents = {static_cast<double>(n_unclustered) * n_unclustered, 3.0 * nb * nb,
                           nb * static_cast<double>(r.n_max),
                           3.0 * static_cast<double>(r.n_ac_k) * r.n_ac_k};
  // log2 of 2^a + (N'−1)·2^b + 2^c + 2^d, skipping absent terms.
  std::vector<std::pair<double, double>> terms;  // (multiplicity, exponent)
  terms.push_back({1.0, r.heuristic_exponents[0]});
  if (r.n_rsm > 1) terms.push_back({static_cast<double>(r.n_rsm - 1), r.heuristic_exponents[1]});
  terms.push_back({1.0, r.heuristic_exponents[2]});
  if (r.n_ac_k > 0) terms.push_back({1.0, r.heuristic_exponents[3]});
  double top = -std::numeric_limits<double>::infinity();
  for (auto& t : terms) top = std::max(top, t.second);
  double acc = 0.0;
  for (auto& t : terms) acc += t.first * std::exp2(t.second - top);
  r.log2_heuristic = top + std::log2(acc);
  r.log2_rs = static_cast<double>(r.n_delta_rs);
  r.log2_full = static_cast<double>(r.n_delta);
  r.ordering_holds = r.log2_heuristic < r.log2_rs && r.log2_rs <= r.log2_full;
  return r;
}

}  // namespace swarmdef::assignment
