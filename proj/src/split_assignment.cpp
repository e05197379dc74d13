#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "swarmdef/assignment.hpp"

namespace swarmdef {

const char* to_string(SplitSolver s) {
  switch (s) {
    case SplitSolver::Miqcqp:
      return "miqcqp";
    case SplitSolver::RsMiqcqp:
      return "rs_miqcqp";
    case SplitSolver::Heuristic:
      return "heuristic";
  }
  return "?";
}

std::optional<SplitSolver> parse_split_solver(const std::string& name) {
  if (name == "miqcqp") return SplitSolver::Miqcqp;
  if (name == "rs_miqcqp") return SplitSolver::RsMiqcqp;
  if (name == "heuristic") return SplitSolver::Heuristic;
  return std::nullopt;
}

namespace assignment {

namespace {

std::vector<AgentState> as_vector(const std::vector<AgentState>& v) { return v; }

// Variable layout shared by both programs: herd variables l*K + k first, then
// interception variables for the defenders in `interceptors`.
struct Layout {
  int d = 0;
  int k = 0;
  int u = 0;
  std::vector<int> interceptors;  // net positions allowed to intercept
  std::vector<int> slot_of;       // net position -> index into interceptors, or -1

  Layout(int d_, int k_, int u_, std::vector<int> ints) : d(d_), k(k_), u(u_), interceptors(std::move(ints)) {
    slot_of.assign(d, -1);
    for (int t = 0; t < static_cast<int>(interceptors.size()); ++t) slot_of[interceptors[t]] = t;
  }
  int herd(int l, int kk) const { return l * k + kk; }
  int intercept(int l, int i) const { return d * k + slot_of[l] * u + i; }
  int size() const { return d * k + static_cast<int>(interceptors.size()) * u; }
};

std::vector<int> all_positions(int d) {
  std::vector<int> v(d);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> terminal_positions(int d, int u) {
  StringNetTeam team{all_positions(d), NetKind::Open};
  formation::TerminalGroups g = formation::terminal_groups(team, u);
  std::vector<int> out = g.left;
  out.insert(out.end(), g.right.begin(), g.right.end());
  std::sort(out.begin(), out.end());
  return out;
}

bip::BinaryProgram build(const SplitSnapshot& snap, const SplitCosts& costs, const Layout& lay) {
  const int d = lay.d, k = lay.k, u = lay.u;
  bip::BinaryProgram prog(lay.size());
  for (int l = 0; l < d; ++l) {
    for (int kk = 0; kk < k; ++kk) {
      prog.set_linear_cost(lay.herd(l, kk), costs.herd(l, kk));
      prog.meta(lay.herd(l, kk)) = {l, kk, 'h'};
    }
  }
  const auto& eng = costs.engagement();
  for (int l : lay.interceptors) {
    for (int i = 0; i < u; ++i) {
      prog.set_linear_cost(lay.intercept(l, i), eng.interception(l, i));
      prog.meta(lay.intercept(l, i)) = {l, k + i, 'i'};
    }
  }
  for (size_t a = 0; a < lay.interceptors.size(); ++a) {
    for (size_t b = a + 1; b < lay.interceptors.size(); ++b) {
      const int l1 = lay.interceptors[a], l2 = lay.interceptors[b];
      for (int i = 0; i < u; ++i) {
        for (int i2 = 0; i2 < u; ++i2) {
          if (i == i2) continue;
          double c = eng.collision(l1, i, l2, i2);
          // Both orderings of the pair appear in the sum.
          if (c != 0.0) prog.add_quadratic_cost(lay.intercept(l1, i), lay.intercept(l2, i2), 2.0 * c);
        }
      }
    }
  }

  // One task per defender.
  for (int l = 0; l < d; ++l) {
    bip::Constraint row;
    row.name = "task" + std::to_string(l);
    for (int kk = 0; kk < k; ++kk) row.linear.push_back({lay.herd(l, kk), 1.0});
    if (lay.slot_of[l] >= 0) {
      for (int i = 0; i < u; ++i) row.linear.push_back({lay.intercept(l, i), 1.0});
    }
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  // Capacities.
  for (int kk = 0; kk < k; ++kk) {
    bip::Constraint row;
    row.name = "capacity" + std::to_string(kk);
    for (int l = 0; l < d; ++l) row.linear.push_back({lay.herd(l, kk), 1.0});
    row.rhs = snap.capacity(kk);
    prog.add_constraint(std::move(row));
  }
  // One interceptor per unclustered attacker.
  for (int i = 0; i < u; ++i) {
    bip::Constraint row;
    row.name = "cover" + std::to_string(i);
    for (int l : lay.interceptors) row.linear.push_back({lay.intercept(l, i), 1.0});
    row.rhs = 1.0;
    prog.add_constraint(std::move(row));
  }
  // Contiguity along the parent net.
  for (int kk = 0; kk < k; ++kk) {
    bip::Constraint row;
    row.name = "contiguity" + std::to_string(kk);
    row.sense = bip::Sense::Ge;
    for (int l = 0; l + 1 < d; ++l) row.quad.push_back({lay.herd(l, kk), lay.herd(l + 1, kk), 1.0});
    row.rhs = snap.capacity(kk) - 1.0;
    if (!row.quad.empty()) prog.add_constraint(std::move(row));
  }
  // Every defender assigned.
  {
    bip::Constraint row;
    row.name = "total";
    for (int v = 0; v < lay.size(); ++v) row.linear.push_back({v, 1.0});
    row.rhs = d;
    prog.add_constraint(std::move(row));
  }
  return prog;
}

std::vector<int> decode(const Layout& lay, const bip::Bits& x) {
  std::vector<int> task(lay.d, -1);
  for (int l = 0; l < lay.d; ++l) {
    for (int kk = 0; kk < lay.k; ++kk) {
      if (x[lay.herd(l, kk)]) task[l] = kk;
    }
    if (lay.slot_of[l] >= 0) {
      for (int i = 0; i < lay.u; ++i) {
        if (x[lay.intercept(l, i)]) task[l] = lay.k + i;
      }
    }
  }
  return task;
}

SplitAssignment run_program(const SplitSnapshot& snap, const Layout& lay,
                            const bip::SolveBudget& budget) {
  check_capacity(snap);
  SplitCosts costs(snap);
  bip::BinaryProgram prog = build(snap, costs, lay);
  bip::Solution sol = bip::solve(prog, budget);
  if (sol.status != bip::SolveStatus::Optimal) {
    throw std::runtime_error("split assignment: program infeasible");
  }
  SplitAssignment out;
  out.task = decode(lay, sol.assignment);
  out.nodes = sol.node_count;
  out.solve_seconds = sol.wall_time;
  out.cost = split_cost(snap, costs, out.task);
  return out;
}

SplitSnapshot sub_snapshot(const SplitSnapshot& snap, const std::vector<int>& clusters,
                           const std::vector<int>& positions) {
  SplitSnapshot sub;
  for (int k : clusters) {
    sub.cluster_centers.push_back(snap.cluster_centers[k]);
    sub.cluster_sizes.push_back(snap.cluster_sizes[k]);
    sub.capacities.push_back(snap.capacity(k));
  }
  for (int l : positions) {
    sub.defenders.push_back(snap.defenders[l]);
    sub.defender_ids.push_back(snap.defender_ids.empty() ? l : snap.defender_ids[l]);
  }
  sub.n_attackers = std::accumulate(sub.cluster_sizes.begin(), sub.cluster_sizes.end(), 0);
  sub.rd = snap.rd;
  sub.model = snap.model;
  return sub;
}

struct HeuristicRun {
  const SplitSnapshot& snap;
  int min_clusters;
  const bip::SolveBudget& budget;
  std::vector<int> task;
  long nodes = 0;
  double seconds = 0.0;

  void leaf(const std::vector<int>& clusters, const std::vector<int>& positions) {
    if (clusters.empty()) return;
    SplitSnapshot sub = sub_snapshot(snap, clusters, positions);
    SplitAssignment a = split_rs_miqcqp(sub, budget);
    nodes += a.nodes;
    seconds += a.solve_seconds;
    for (size_t p = 0; p < positions.size(); ++p) task[positions[p]] = clusters[a.task[p]];
  }

  void assign(const std::vector<int>& clusters, const std::vector<int>& positions) {
    if (static_cast<int>(clusters.size()) <= min_clusters) {
      leaf(clusters, positions);
      return;
    }
    std::vector<Vec2> centers;
    std::vector<int> sizes;
    for (int k : clusters) {
      centers.push_back(snap.cluster_centers[k]);
      sizes.push_back(snap.cluster_sizes[k]);
    }
    std::vector<Vec2> pos;
    for (const auto& d : snap.defenders) pos.push_back(d.position);
    StringNetTeam team{positions, NetKind::Open};
    formation::ClusterGroupSplit s = formation::split_clusters_equal(centers, sizes, team, pos, snap.rd);
    auto pick = [&](const std::vector<int>& local) {
      std::vector<int> out;
      for (int i : local) out.push_back(clusters[i]);
      return out;
    };
    std::vector<int> left = pick(s.left_clusters), right = pick(s.right_clusters);
    if (!snap.capacities.empty()) {
      size_t n_left = 0;
      for (int k : left) n_left += snap.capacity(k);
      s.left_defenders.assign(positions.begin(), positions.begin() + n_left);
      s.right_defenders.assign(positions.begin() + n_left, positions.end());
    }
    for (auto [side, defs] : {std::pair{&left, &s.left_defenders}, std::pair{&right, &s.right_defenders}}) {
      if (static_cast<int>(side->size()) > min_clusters) {
        assign(*side, *defs);
      } else {
        leaf(*side, *defs);
      }
    }
  }
};

}  // namespace

void check_capacity(const SplitSnapshot& snap) {
  if (snap.cluster_centers.size() != snap.cluster_sizes.size()) {
    throw std::invalid_argument("split snapshot: cluster centers and sizes differ in length");
  }
  if (snap.unclustered_ids.size() != 0 && snap.unclustered_ids.size() != snap.unclustered.size()) {
    throw std::invalid_argument("split snapshot: unclustered ids and states differ in length");
  }
  if (!snap.defender_ids.empty() && snap.defender_ids.size() != snap.defenders.size()) {
    throw std::invalid_argument("split snapshot: defender ids and states differ in length");
  }
  long need = snap.num_unclustered();
  if (!snap.capacities.empty() && snap.capacities.size() != snap.cluster_sizes.size()) {
    throw std::invalid_argument("split snapshot: one capacity per cluster required");
  }
  for (int k = 0; k < snap.num_clusters(); ++k) need += snap.capacity(k);
  if (need != snap.num_defenders()) {
    throw std::invalid_argument("split snapshot: capacities (" + std::to_string(need) +
                                ") do not match team size (" + std::to_string(snap.num_defenders()) + ")");
  }
}

SplitCosts::SplitCosts(const SplitSnapshot& snap)
    : engagement_(as_vector(snap.defenders), as_vector(snap.unclustered), snap.model) {
  herd_.assign(snap.num_defenders(), std::vector<double>(snap.num_clusters()));
  for (int l = 0; l < snap.num_defenders(); ++l) {
    for (int k = 0; k < snap.num_clusters(); ++k) {
      herd_[l][k] = (snap.cluster_centers[k] - snap.defenders[l].position).norm();
    }
  }
}

bip::BinaryProgram split_program(const SplitSnapshot& snap, const SplitCosts& costs) {
  check_capacity(snap);
  Layout lay(snap.num_defenders(), snap.num_clusters(), snap.num_unclustered(),
             all_positions(snap.num_defenders()));
  return build(snap, costs, lay);
}

bip::BinaryProgram split_rs_program(const SplitSnapshot& snap, const SplitCosts& costs) {
  check_capacity(snap);
  Layout lay(snap.num_defenders(), snap.num_clusters(), snap.num_unclustered(),
             terminal_positions(snap.num_defenders(), snap.num_unclustered()));
  return build(snap, costs, lay);
}

long rs_vector_length(int n_defenders, int n_clusters, int n_unclustered) {
  return static_cast<long>(n_defenders) * n_clusters +
         static_cast<long>(std::min(2 * n_unclustered, n_defenders)) * n_unclustered;
}

SplitAssignment split_miqcqp(const SplitSnapshot& snap, const bip::SolveBudget& budget) {
  Layout lay(snap.num_defenders(), snap.num_clusters(), snap.num_unclustered(),
             all_positions(snap.num_defenders()));
  return run_program(snap, lay, budget);
}

SplitAssignment split_rs_miqcqp(const SplitSnapshot& snap, const bip::SolveBudget& budget) {
  Layout lay(snap.num_defenders(), snap.num_clusters(), snap.num_unclustered(),
             terminal_positions(snap.num_defenders(), snap.num_unclustered()));
  return run_program(snap, lay, budget);
}

SplitAssignment hierarchical_dasa(const SplitSnapshot& snap, int min_clusters, double w,
                                  const bip::SolveBudget& budget) {
  if (min_clusters <= 2) throw std::invalid_argument("hierarchical_dasa: threshold must exceed 2");
  check_capacity(snap);
  const int d = snap.num_defenders();
  const int u = snap.num_unclustered();
  SplitCosts costs(snap);
  HeuristicRun run{snap, min_clusters, budget, std::vector<int>(d, -1)};

  std::vector<int> block = all_positions(d);
  if (u > 0) {
    std::vector<Vec2> uc_pos, def_pos;
    for (const auto& a : snap.unclustered) uc_pos.push_back(a.position);
    for (const auto& p : snap.defenders) def_pos.push_back(p.position);
    formation::UnclusteredSplit s = formation::split_unclustered_groups(
        all_positions(u), uc_pos, StringNetTeam{block, NetKind::Open}, def_pos);
    for (auto [atk, defs] : {std::pair{&s.left_attackers, &s.left_defenders},
                             std::pair{&s.right_attackers, &s.right_defenders}}) {
      CadaaResult r = cadaa(*defs, *atk, costs.engagement(), w, budget);
      run.nodes += r.solution.node_count;
      run.seconds += r.solution.wall_time;
      for (size_t i = 0; i < atk->size(); ++i) run.task[(*defs)[r.interceptor[i]]] = snap.num_clusters() + (*atk)[i];
    }
    block.assign(block.begin() + s.left_defenders.size(), block.end() - s.right_defenders.size());
  }
  run.assign(all_positions(snap.num_clusters()), block);

  SplitAssignment out;
  out.task = std::move(run.task);
  out.nodes = run.nodes;
  out.solve_seconds = run.seconds;
  out.cost = split_cost(snap, costs, out.task);
  return out;
}

SplitAssignment solve_split(const SplitSnapshot& snap, SplitSolver solver, int min_clusters,
                            double w, const bip::SolveBudget& budget) {
  switch (solver) {
    case SplitSolver::Miqcqp:
      return split_miqcqp(snap, budget);
    case SplitSolver::RsMiqcqp:
      return split_rs_miqcqp(snap, budget);
    case SplitSolver::Heuristic:
      return hierarchical_dasa(snap, min_clusters, w, budget);
  }
  throw std::invalid_argument("solve_split: unknown solver");
}

double split_cost(const SplitSnapshot& snap, const SplitCosts& costs, const std::vector<int>& task) {
  // Same additions, in the same order, as BinaryProgram::objective on the full program.
  const int d = snap.num_defenders(), k = snap.num_clusters(), u = snap.num_unclustered();
  if (static_cast<int>(task.size()) != d) throw std::invalid_argument("split_cost: task size mismatch");
  Layout lay(d, k, u, all_positions(d));
  std::vector<int> on;
  for (int l = 0; l < d; ++l) {
    if (task[l] < 0 || task[l] >= k + u) throw std::invalid_argument("split_cost: task out of range");
    on.push_back(task[l] < k ? lay.herd(l, task[l]) : lay.intercept(l, task[l] - k));
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return on[a] < on[b]; });

  const auto& eng = costs.engagement();
  auto linear = [&](int l) {
    return task[l] < k ? costs.herd(l, task[l]) : eng.interception(l, task[l] - k);
  };
  double obj = 0.0;
  for (int l : order) obj += linear(l);
  for (size_t a = 0; a < order.size(); ++a) {
    for (size_t b = a + 1; b < order.size(); ++b) {
      int l1 = order[a], l2 = order[b];
      if (task[l1] < k || task[l2] < k || task[l1] == task[l2]) continue;
      double c = eng.collision(l1, task[l1] - k, l2, task[l2] - k);
      if (c != 0.0) obj += 2.0 * c;
    }
  }
  return obj;
}

std::string check_split_assignment(const SplitSnapshot& snap, const std::vector<int>& task) {
  const int d = snap.num_defenders(), k = snap.num_clusters(), u = snap.num_unclustered();
  if (static_cast<int>(task.size()) != d) return "task vector has wrong length";
  std::vector<int> count(k + u, 0);
  for (int l = 0; l < d; ++l) {
    if (task[l] < 0 || task[l] >= k + u) return "defender " + std::to_string(l) + " has no valid task";
    count[task[l]]++;
  }
  for (int kk = 0; kk < k; ++kk) {
    if (count[kk] != snap.capacity(kk)) {
      return "cluster " + std::to_string(kk) + " has " + std::to_string(count[kk]) + " defenders";
    }
    int first = -1, last = -1;
    for (int l = 0; l < d; ++l) {
      if (task[l] != kk) continue;
      if (first < 0) first = l;
      last = l;
    }
    if (count[kk] > 0 && last - first + 1 != count[kk]) {
      return "cluster " + std::to_string(kk) + " team is not contiguous";
    }
  }
  for (int i = 0; i < u; ++i) {
    if (count[k + i] != 1) return "unclustered attacker " + std::to_string(i) + " not covered once";
  }
  return {};
}

}  // namespace assignment
}  // namespace swarmdef
