#pragma once

// Independent reference implementations and random generators shared by the
// property tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "swarmdef/assignment.hpp"
#include "swarmdef/bench.hpp"
#include "swarmdef/binary_program.hpp"
#include "swarmdef/clustering.hpp"
#include "swarmdef/dynamics.hpp"

namespace oracle {

using swarmdef::AgentParams;
using swarmdef::AgentState;
using swarmdef::Vec2;
namespace bip = swarmdef::bip;

// Classic RK4 on r' = v, v' = a − C v with a held constant.
inline AgentState rk4(AgentState s, const Vec2& a, double drag, double duration, double h) {
  const int steps = static_cast<int>(std::lround(duration / h));
  auto f = [&](const Vec2& v) { return a - drag * v; };
  for (int i = 0; i < steps; ++i) {
    Vec2 v = s.velocity;
    Vec2 k1v = f(v), k1r = v;
    Vec2 k2v = f(v + 0.5 * h * k1v), k2r = v + 0.5 * h * k1v;
    Vec2 k3v = f(v + 0.5 * h * k2v), k3r = v + 0.5 * h * k2v;
    Vec2 k4v = f(v + h * k3v), k4r = v + h * k3v;
    s.position += h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r);
    s.velocity += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return s;
}

// Partition from the definition: cores are points with at least min_pts
// neighbours (self included); clusters are the transitive closure of the
// core-core eps relation; a border point joins the cluster of its
// lowest-index core neighbour. Clusters below min_pts are noise.
struct Partition {
  std::set<std::set<int>> clusters;
  std::set<int> noise;
  bool operator==(const Partition&) const = default;
};

inline Partition dbscan(const std::vector<Vec2>& pts, double eps, int min_pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<char>> near(n, std::vector<char>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) near[i][j] = (pts[i] - pts[j]).norm() <= eps;
  std::vector<char> core(n);
  for (int i = 0; i < n; ++i) core[i] = std::count(near[i].begin(), near[i].end(), 1) >= min_pts;

  // Warshall closure on cores.
  std::vector<std::vector<char>> reach(n, std::vector<char>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = core[i] && core[j] && near[i][j];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;

  std::vector<int> root(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (int j = 0; j <= i; ++j) {
      if (reach[i][j]) {
        root[i] = j;
        break;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (core[i]) continue;
    for (int j = 0; j < n; ++j) {
      if (core[j] && near[i][j]) {
        root[i] = root[j];
        break;
      }
    }
  }
  std::vector<std::set<int>> groups(n);
  Partition out;
  for (int i = 0; i < n; ++i) {
    if (root[i] < 0) {
      out.noise.insert(i);
    } else {
      groups[root[i]].insert(i);
    }
  }
  for (auto& g : groups) {
    if (g.empty()) continue;
    if (static_cast<int>(g.size()) < min_pts) {
      out.noise.insert(g.begin(), g.end());
    } else {
      out.clusters.insert(g);
    }
  }
  return out;
}

inline Partition from(const swarmdef::SwarmPartition& p) {
  Partition out;
  for (const auto& c : p.clusters) out.clusters.insert(std::set<int>(c.begin(), c.end()));
  out.noise.insert(p.unclustered.begin(), p.unclustered.end());
  return out;
}

// Clumpy point sets so that cores, borders and noise all occur.
inline std::vector<Vec2> random_points(std::mt19937& rng, int max_points = 25) {
  std::uniform_int_distribution<int> count(1, max_points), blobs(1, 4);
  std::uniform_real_distribution<double> where(0.0, 20.0);
  std::normal_distribution<double> jitter(0.0, 1.5);
  int n = count(rng), b = blobs(rng);
  std::vector<Vec2> centers;
  for (int i = 0; i < b; ++i) centers.emplace_back(where(rng), where(rng));
  std::vector<Vec2> pts;
  std::uniform_int_distribution<int> pick(0, b);
  for (int i = 0; i < n; ++i) {
    int c = pick(rng);
    if (c == b) {
      pts.emplace_back(where(rng), where(rng));
    } else {
      pts.push_back(centers[c] + Vec2(jitter(rng), jitter(rng)));
    }
  }
  return pts;
}

// ---- random binary programs ----

enum class Shape { Assignment, Transport, Split, Generic };
inline constexpr Shape kShapes[] = {Shape::Assignment, Shape::Transport, Shape::Split, Shape::Generic};

inline bip::Constraint unit_row(const std::vector<int>& vars, bip::Sense sense, double rhs) {
  bip::Constraint c;
  for (int v : vars) c.linear.push_back({v, 1.0});
  c.sense = sense;
  c.rhs = rhs;
  return c;
}

// One-to-one interception with pairwise collision penalties in the objective.
inline bip::BinaryProgram assignment_program(std::mt19937& rng) {
  std::uniform_int_distribution<int> na_d(1, 4);
  int na = na_d(rng);
  int nd = std::uniform_int_distribution<int>(na, std::max(na, 20 / na))(rng);
  nd = std::min(nd, 20 / na);
  bip::BinaryProgram p(nd * na);
  std::uniform_real_distribution<double> cost(1.0, 50.0), pen(0.0, 10.0), coin(0.0, 1.0);
  auto x = [&](int d, int a) { return d * na + a; };
  for (int v = 0; v < nd * na; ++v) p.set_linear_cost(v, cost(rng));
  for (int a = 0; a < na; ++a) {
    std::vector<int> col;
    for (int d = 0; d < nd; ++d) col.push_back(x(d, a));
    p.add_constraint(unit_row(col, bip::Sense::Eq, 1.0));
  }
  for (int d = 0; d < nd; ++d) {
    std::vector<int> row;
    for (int a = 0; a < na; ++a) row.push_back(x(d, a));
    p.add_constraint(unit_row(row, bip::Sense::Le, 1.0));
  }
  for (int d1 = 0; d1 < nd; ++d1)
    for (int d2 = d1 + 1; d2 < nd; ++d2)
      for (int a1 = 0; a1 < na; ++a1)
        for (int a2 = 0; a2 < na; ++a2)
          if (a1 != a2 && coin(rng) < 0.3) p.add_quadratic_cost(x(d1, a1), x(d2, a2), pen(rng));
  return p;
}

// Every agent picks one bin; bins have exact or upper capacities.
inline bip::BinaryProgram transport_program(std::mt19937& rng) {
  int bins = std::uniform_int_distribution<int>(2, 4)(rng);
  int agents = std::uniform_int_distribution<int>(2, 20 / bins)(rng);
  bip::BinaryProgram p(agents * bins);
  std::uniform_real_distribution<double> cost(-5.0, 40.0);
  for (int v = 0; v < agents * bins; ++v) p.set_linear_cost(v, cost(rng));
  for (int i = 0; i < agents; ++i) {
    std::vector<int> row;
    for (int k = 0; k < bins; ++k) row.push_back(i * bins + k);
    p.add_constraint(unit_row(row, bip::Sense::Eq, 1.0));
  }
  bool exact = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  std::vector<int> cap(bins, 0);
  if (exact) {
    for (int i = 0; i < agents; ++i) cap[std::uniform_int_distribution<int>(0, bins - 1)(rng)]++;
  } else {
    for (auto& c : cap) c = std::uniform_int_distribution<int>(0, agents)(rng);
  }
  for (int k = 0; k < bins; ++k) {
    std::vector<int> col;
    for (int i = 0; i < agents; ++i) col.push_back(i * bins + k);
    p.add_constraint(unit_row(col, exact ? bip::Sense::Eq : bip::Sense::Le, cap[k]));
  }
  return p;
}

// The split program (full or terminal-restricted) of a small random instance.
inline bip::BinaryProgram split_shaped_program(std::mt19937& rng) {
  struct Dims {
    int na, nac, nuc;
  };
  static const Dims dims[] = {{3, 1, 0}, {4, 1, 1}, {5, 1, 2}, {6, 2, 0}, {6, 1, 2}, {7, 2, 1}, {7, 1, 2}, {9, 2, 1}};
  const Dims& d = dims[std::uniform_int_distribution<int>(0, std::size(dims) - 1)(rng)];
  unsigned seed = rng();
  auto inst = swarmdef::bench::gen_instance(seed, d.na, d.nac, d.nuc);
  swarmdef::assignment::SplitCosts costs(inst.snapshot);
  bool full = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  long n_full = static_cast<long>(d.na) * (d.nac + d.nuc);
  if (full && n_full <= 20) return swarmdef::assignment::split_program(inst.snapshot, costs);
  return swarmdef::assignment::split_rs_program(inst.snapshot, costs);
}

// Unstructured: mixed-sign objective, random linear and product rows.
inline bip::BinaryProgram generic_program(std::mt19937& rng) {
  int n = std::uniform_int_distribution<int>(1, 20)(rng);
  bip::BinaryProgram p(n);
  std::uniform_real_distribution<double> cost(-10.0, 10.0);
  std::uniform_int_distribution<int> var(0, n - 1), coef(-3, 3), nrows(0, 5);
  for (int v = 0; v < n; ++v) p.set_linear_cost(v, cost(rng));
  int nq = std::uniform_int_distribution<int>(0, n)(rng);
  for (int i = 0; i < nq && n > 1; ++i) {
    int a = var(rng), b = var(rng);
    if (a != b) p.add_quadratic_cost(a, b, cost(rng));
  }
  int rows = nrows(rng);
  for (int r = 0; r < rows; ++r) {
    bip::Constraint c;
    int terms = std::uniform_int_distribution<int>(1, std::min(n, 6))(rng);
    double act = 0.0;
    for (int t = 0; t < terms; ++t) {
      int k = coef(rng);
      if (k == 0) k = 1;
      c.linear.push_back({var(rng), static_cast<double>(k)});
      act += std::abs(k);
    }
    if (n > 1 && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
      int a = var(rng), b = var(rng);
      if (a != b) c.quad.push_back({a, b, static_cast<double>(coef(rng))});
    }
    int s = std::uniform_int_distribution<int>(0, 2)(rng);
    c.sense = s == 0 ? bip::Sense::Eq : s == 1 ? bip::Sense::Le : bip::Sense::Ge;
    c.rhs = std::round(std::uniform_real_distribution<double>(-1.0, act / 2 + 1)(rng));
    p.add_constraint(c);
  }
  return p;
}

inline bip::BinaryProgram random_program(std::mt19937& rng, Shape shape) {
  switch (shape) {
    case Shape::Assignment:
      return assignment_program(rng);
    case Shape::Transport:
      return transport_program(rng);
    case Shape::Split:
      return split_shaped_program(rng);
    case Shape::Generic:
      return generic_program(rng);
  }
  return bip::BinaryProgram(0);
}

// Minimum of split_cost over every valid task vector, enumerated position by
// position with capacity and contiguity pruning. Every leaf is re-checked.
// With terminal_only, interceptors come from the first and last N_uc positions.
inline double split_exhaustive(const swarmdef::SplitSnapshot& snap, bool terminal_only = false,
                               long* leaves = nullptr) {
  const int d = snap.num_defenders(), k = snap.num_clusters(), u = snap.num_unclustered();
  swarmdef::assignment::SplitCosts costs(snap);
  std::vector<int> task(d, -1), count(k + u, 0);
  std::vector<char> closed(k, 0);
  double best = swarmdef::kInf;
  long n_leaves = 0;
  auto rec = [&](auto&& self, int l) -> void {
    if (l == d) {
      if (!swarmdef::assignment::check_split_assignment(snap, task).empty()) return;
      ++n_leaves;
      best = std::min(best, swarmdef::assignment::split_cost(snap, costs, task));
      return;
    }
    for (int t = 0; t < k + u; ++t) {
      if (t < k) {
        if (closed[t] || count[t] >= snap.capacity(t)) continue;
      } else if (count[t] >= 1 || (terminal_only && l >= u && l < d - u)) {
        continue;
      }
      // Leaving a started cluster closes it.
      int prev = l > 0 ? task[l - 1] : -1;
      bool closes = prev >= 0 && prev < k && prev != t;
      task[l] = t;
      count[t]++;
      if (closes) closed[prev] = 1;
      self(self, l + 1);
      if (closes) closed[prev] = 0;
      count[t]--;
    }
    task[l] = -1;
  };
  rec(rec, 0);
  if (leaves) *leaves = n_leaves;
  return best;
}

}  // namespace oracle
