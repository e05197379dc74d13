// Depth-first branch-and-bound for binary programs with quadratic terms.
//
// Rows of the form "sum of a disjoint set of variables = 1" are treated as
// choice groups and branched on as a whole. When the remaining linear rows
// form a transportation structure (every variable in one group and at most
// one capacity row), the node bound is the min-cost-flow optimum of the
// linear part; otherwise each open group contributes its cheapest member.
// Quadratic objective terms whose partner is fixed to one are folded into
// the linear cost, and free pairs contribute their negative part. When every
// product cost is non-negative, each free grouped variable is also charged
// half of its cheapest unavoidable product with every other open group.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "swarmdef/binary_program.hpp"

namespace swarmdef::bip {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

double prune_tol(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : adj_(n) {}

  int add_arc(int from, int to, int cap, double cost) {
    adj_[from].push_back({to, cap, cost, static_cast<int>(adj_[to].size())});
    adj_[to].push_back({from, 0, -cost, static_cast<int>(adj_[from].size()) - 1});
    return static_cast<int>(adj_[from].size()) - 1;
  }

  int residual(int from, int idx) const { return adj_[from][idx].cap; }

  // Sends up to `want` units from s to t. Returns units sent. Nodes must be
  // numbered in a topological order of the initial (acyclic) network.
  int run(int s, int t, int want, double& cost) {
    const int n = static_cast<int>(adj_.size());
    std::vector<double> pot(n, kInf);
    pot[s] = 0.0;
    for (int u = 0; u < n; ++u) {
      if (pot[u] == kInf) continue;
      for (const Arc& a : adj_[u]) {
        if (a.cap > 0) pot[a.to] = std::min(pot[a.to], pot[u] + a.cost);
      }
    }
    for (double& p : pot) {
      if (p == kInf) p = 0.0;
    }
    int sent = 0;
    cost = 0.0;
    std::vector<double> dist(n);
    std::vector<int> prev_node(n), prev_arc(n);
    std::vector<char> done(n);
    while (sent < want) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(done.begin(), done.end(), 0);
      dist[s] = 0.0;
      for (;;) {
        int u = -1;
        for (int v = 0; v < n; ++v) {
          if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) u = v;
        }
        if (u < 0) break;
        done[u] = 1;
        if (u == t) break;
        for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i) {
          const Arc& a = adj_[u][i];
          if (a.cap <= 0 || done[a.to]) continue;
          double nd = dist[u] + a.cost + pot[u] - pot[a.to];
          if (nd < dist[a.to]) {
            dist[a.to] = nd;
            prev_node[a.to] = u;
            prev_arc[a.to] = i;
          }
        }
      }
      if (dist[t] == kInf) break;
      // Unsettled nodes are capped at dist[t] to keep reduced costs non-negative.
      for (int v = 0; v < n; ++v) pot[v] += std::min(dist[v], dist[t]);
      int push = want - sent;
      for (int v = t; v != s; v = prev_node[v]) {
        push = std::min(push, adj_[prev_node[v]][prev_arc[v]].cap);
      }
      for (int v = t; v != s; v = prev_node[v]) {
        Arc& a = adj_[prev_node[v]][prev_arc[v]];
        a.cap -= push;
        adj_[v][a.rev].cap += push;
        cost += push * a.cost;
      }
      sent += push;
    }
    return sent;
  }

 private:
  struct Arc {
    int to;
    int cap;
    double cost;
    int rev;
  };

  std::vector<std::vector<Arc>> adj_;
};

bool is_unit_row(const Constraint& row) {
  if (!row.quad.empty() || row.linear.empty()) return false;
  for (const auto& t : row.linear) {
    if (t.coef != 1.0) return false;
  }
  return true;
}

bool is_integral(double v) { return std::abs(v - std::round(v)) < 1e-12; }

struct Row {
  std::vector<Term> lin;
  std::vector<QuadTerm> quad;
  Sense sense = Sense::Eq;
  double rhs = 0.0;
  // Product terms forming vertex-disjoint paths, with an exact cardinality
  // from a matching unit equality row.
  bool path = false;
  std::vector<int> path_vertices;
  std::vector<char> path_start;
  int cardinality = -1;
};

struct NodeEval {
  bool feasible = false;
  double bound = 0.0;
  Bits candidate;
};

class Search {
 public:
  Search(const BinaryProgram& prog, const SolveBudget& budget)
      : prog_(prog), budget_(budget), n_(prog.num_vars()), start_(std::chrono::steady_clock::now()) {
    compile();
  }

  Solution run() {
    Solution out;
    val_.assign(n_, -1);
    in_queue_.assign(rows_.size(), 0);
    for (int r = 0; r < static_cast<int>(rows_.size()); ++r) enqueue(r);
    if (propagate()) {
      NodeEval root = evaluate();
      if (root.feasible) dfs(root);
    }
    out.node_count = nodes_;
    out.wall_time = elapsed();
    if (have_incumbent_) {
      out.status = SolveStatus::Optimal;
      out.assignment = incumbent_;
      out.objective = incumbent_obj_;
    } else {
      out.status = SolveStatus::Infeasible;
      out.assignment.assign(n_, 0);
    }
    return out;
  }

 private:
  void compile() {
    cost_ = prog_.linear_cost();
    obj_adj_.resize(n_);
    for (const auto& [key, q] : prog_.quadratic_cost()) {
      qterms_.push_back({key.first, key.second, q});
      obj_adj_[key.first].push_back({key.second, q});
      obj_adj_[key.second].push_back({key.first, q});
    }
    var_rows_.resize(n_);
    for (const auto& c : prog_.constraints()) {
      Row r;
      r.lin = c.linear;
      r.quad = c.quad;
      r.sense = c.sense;
      r.rhs = c.rhs;
      rows_.push_back(std::move(r));
    }
    for (int r = 0; r < static_cast<int>(rows_.size()); ++r) {
      std::vector<int> vars;
      for (const auto& t : rows_[r].lin) vars.push_back(t.var);
      for (const auto& t : rows_[r].quad) {
        vars.push_back(t.a);
        vars.push_back(t.b);
      }
      std::sort(vars.begin(), vars.end());
      vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
      for (int v : vars) var_rows_[v].push_back(r);
    }
    detect_groups();
    detect_transport();
    detect_paths();
    pair_bound_ = !qterms_.empty() &&
                  std::all_of(qterms_.begin(), qterms_.end(), [](const QuadTerm& t) { return t.coef >= 0.0; });
    if (pair_bound_) {
      seen_cnt_.assign(groups_.size(), 0);
      seen_min_.assign(groups_.size(), 0.0);
    }
  }

  void detect_groups() {
    group_of_.assign(n_, -1);
    const auto& rows = prog_.constraints();
    for (const auto& row : rows) {
      if (row.sense != Sense::Eq || row.rhs != 1.0 || !is_unit_row(row)) continue;
      std::vector<int> vars;
      bool clash = false;
      for (const auto& t : row.linear) {
        if (group_of_[t.var] >= 0) clash = true;
        vars.push_back(t.var);
      }
      std::sort(vars.begin(), vars.end());
      if (clash || std::adjacent_find(vars.begin(), vars.end()) != vars.end()) continue;
      int g = static_cast<int>(groups_.size());
      for (int v : vars) group_of_[v] = g;
      groups_.push_back(std::move(vars));
    }
  }

  void detect_transport() {
    transport_ = false;
    if (groups_.empty()) return;
    for (int v = 0; v < n_; ++v) {
      if (group_of_[v] < 0) return;
    }
    cap_of_.assign(n_, -1);
    caps_.clear();
    const auto& rows = prog_.constraints();
    for (const auto& row : rows) {
      bool is_group_row = row.sense == Sense::Eq && row.rhs == 1.0 && is_unit_row(row) &&
                          !row.linear.empty() && groups_[group_of_[row.linear.front().var]].size() == row.linear.size() &&
                          std::all_of(row.linear.begin(), row.linear.end(), [&](const Term& t) {
                            return group_of_[t.var] == group_of_[row.linear.front().var];
                          });
      if (is_group_row) continue;
      if (row.linear.empty()) continue;  // products only: dropped in the relaxation
      if (!is_unit_row(row)) return;
      if (implied_by_groups(row)) continue;
      if (row.sense == Sense::Ge || !is_integral(row.rhs) || row.rhs < 0) return;
      bool disjoint = std::all_of(row.linear.begin(), row.linear.end(),
                                  [&](const Term& t) { return cap_of_[t.var] < 0; });
      if (!disjoint) return;
      int k = static_cast<int>(caps_.size());
      for (const auto& t : row.linear) cap_of_[t.var] = k;
      caps_.push_back({static_cast<int>(std::lround(row.rhs)), row.sense == Sense::Eq});
    }
    bool any_eq = std::any_of(caps_.begin(), caps_.end(), [](const Cap& c) { return c.eq; });
    if (any_eq) {
      bool all_eq = std::all_of(caps_.begin(), caps_.end(), [](const Cap& c) { return c.eq; });
      bool all_capped = std::all_of(cap_of_.begin(), cap_of_.end(), [](int c) { return c >= 0; });
      int total = 0;
      for (const auto& c : caps_) total += c.rhs;
      if (!all_eq || !all_capped || total != static_cast<int>(groups_.size())) return;
    }
    transport_ = true;
  }

  // A unit row covering whole groups with rhs equal to their count.
  bool implied_by_groups(const Constraint& row) const {
    std::vector<int> count(groups_.size(), 0);
    for (const auto& t : row.linear) count[group_of_[t.var]]++;
    int covered = 0;
    for (size_t g = 0; g < groups_.size(); ++g) {
      if (count[g] == 0) continue;
      if (count[g] != static_cast<int>(groups_[g].size())) return false;
      ++covered;
    }
    double want = covered;
    switch (row.sense) {
      case Sense::Eq:
        return row.rhs == want;
      case Sense::Le:
        return row.rhs >= want;
      case Sense::Ge:
        return row.rhs <= want;
    }
    return false;
  }

  void detect_paths() {
    const auto& rows = prog_.constraints();
    for (auto& row : rows_) {
      if (!row.lin.empty() || row.quad.empty() || row.sense != Sense::Ge) continue;
      std::map<int, std::vector<int>> adj;
      bool unit = true;
      for (const auto& t : row.quad) {
        if (t.coef != 1.0) unit = false;
        adj[t.a].push_back(t.b);
        adj[t.b].push_back(t.a);
      }
      if (!unit) continue;
      bool ok = true;
      for (const auto& [v, nb] : adj) {
        std::vector<int> s = nb;
        std::sort(s.begin(), s.end());
        if (nb.size() > 2 || std::adjacent_find(s.begin(), s.end()) != s.end()) ok = false;
      }
      if (!ok) continue;
      std::vector<int> order;
      std::vector<char> start;
      std::map<int, char> seen;
      for (const auto& [v, nb] : adj) {
        if (nb.size() != 1 || seen.count(v)) continue;
        int prev = -1, cur = v;
        bool first = true;
        while (cur >= 0 && !seen.count(cur)) {
          seen[cur] = 1;
          order.push_back(cur);
          start.push_back(first ? 1 : 0);
          first = false;
          int next = -1;
          for (int w : adj[cur]) {
            if (w != prev && !seen.count(w)) next = w;
          }
          prev = cur;
          cur = next;
        }
      }
      if (order.size() != adj.size()) continue;  // contains a cycle

      std::vector<int> verts = order;
      std::sort(verts.begin(), verts.end());
      int card = -1;
      for (const auto& other : rows) {
        if (other.sense != Sense::Eq || !is_unit_row(other) || !is_integral(other.rhs)) continue;
        if (other.linear.size() != verts.size()) continue;
        std::vector<int> ov;
        for (const auto& t : other.linear) ov.push_back(t.var);
        std::sort(ov.begin(), ov.end());
        if (ov == verts) {
          card = static_cast<int>(std::lround(other.rhs));
          break;
        }
      }
      if (card < 0) continue;
      row.path = true;
      row.path_vertices = std::move(order);
      row.path_start = std::move(start);
      row.cardinality = card;
    }
  }

  // ---- assignment and propagation ----

  void enqueue(int r) {
    if (!in_queue_[r]) {
      in_queue_[r] = 1;
      queue_.push_back(r);
    }
  }

  bool assign(int v, int8_t b) {
    if (val_[v] == b) return true;
    if (val_[v] != -1) return false;
    val_[v] = b;
    trail_.push_back(v);
    for (int r : var_rows_[v]) enqueue(r);
    return true;
  }

  void undo(size_t mark) {
    while (trail_.size() > mark) {
      val_[trail_.back()] = -1;
      trail_.pop_back();
    }
  }

  bool propagate() {
    while (!queue_.empty()) {
      int r = queue_.back();
      queue_.pop_back();
      in_queue_[r] = 0;
      if (!process_row(r)) {
        for (int q : queue_) in_queue_[q] = 0;
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  int8_t product_state(int a, int b) const {
    if (val_[a] == 0 || val_[b] == 0) return 0;
    if (val_[a] == 1 && val_[b] == 1) return 1;
    return -1;
  }

  bool process_row(int r) {
    const Row& row = rows_[r];
    double mn = 0.0, mx = 0.0;
    auto accumulate = [&](int8_t s, double c) {
      if (s == 1) {
        mn += c;
        mx += c;
      } else if (s == -1) {
        (c > 0 ? mx : mn) += c;
      }
    };
    for (const auto& t : row.lin) accumulate(val_[t.var], t.coef);
    for (const auto& t : row.quad) accumulate(product_state(t.a, t.b), t.coef);

    const bool lo = row.sense != Sense::Le;
    const bool hi = row.sense != Sense::Ge;
    if (lo && mx < row.rhs - kTol) return false;
    if (hi && mn > row.rhs + kTol) return false;

    for (const auto& t : row.lin) {
      if (val_[t.var] != -1) continue;
      const double c = t.coef;
      if (lo) {
        if (c > 0 && mx - c < row.rhs - kTol && !assign(t.var, 1)) return false;
        if (c < 0 && mx + c < row.rhs - kTol && !assign(t.var, 0)) return false;
      }
      if (hi && val_[t.var] == -1) {
        if (c > 0 && mn + c > row.rhs + kTol && !assign(t.var, 0)) return false;
        if (c < 0 && mn - c > row.rhs + kTol && !assign(t.var, 1)) return false;
      }
    }
    for (const auto& t : row.quad) {
      if (product_state(t.a, t.b) != -1) continue;
      const double c = t.coef;
      bool must_one = (lo && c > 0 && mx - c < row.rhs - kTol) ||
                      (hi && c < 0 && mn - c > row.rhs + kTol);
      bool must_zero = (lo && c < 0 && mx + c < row.rhs - kTol) ||
                       (hi && c > 0 && mn + c > row.rhs + kTol);
      if (must_one && must_zero) return false;
      if (must_one) {
        if (!assign(t.a, 1) || !assign(t.b, 1)) return false;
      } else if (must_zero) {
        if (val_[t.a] == 1 && !assign(t.b, 0)) return false;
        if (val_[t.b] == 1 && !assign(t.a, 0)) return false;
      }
    }
    if (row.path && path_max(row) < row.rhs - kTol) return false;
    return true;
  }

  // Largest number of path edges induced by a vertex set of the required
  // cardinality that contains every fixed-one and no fixed-zero vertex.
  double path_max(const Row& row) const {
    const int k = row.cardinality;
    constexpr int kNeg = std::numeric_limits<int>::min() / 4;
    std::vector<int> out0(k + 1, kNeg), out1(k + 1, kNeg), in0(k + 1), in1(k + 1);
    out0[0] = 0;
    for (size_t i = 0; i < row.path_vertices.size(); ++i) {
      const int v = row.path_vertices[i];
      const bool fresh = row.path_start[i];
      std::fill(in0.begin(), in0.end(), kNeg);
      std::fill(in1.begin(), in1.end(), kNeg);
      for (int c = 0; c <= k; ++c) {
        for (int last = 0; last < 2; ++last) {
          int cur = last ? out1[c] : out0[c];
          if (cur == kNeg) continue;
          if (val_[v] != 1) in0[c] = std::max(in0[c], cur);
          if (val_[v] != 0 && c < k) {
            int gain = (last && !fresh) ? 1 : 0;
            in1[c + 1] = std::max(in1[c + 1], cur + gain);
          }
        }
      }
      std::swap(out0, in0);
      std::swap(out1, in1);
    }
    int best = std::max(out0[k], out1[k]);
    return best == kNeg ? -kInf : static_cast<double>(best);
  }

  // ---- bounding ----

  NodeEval evaluate() {
    NodeEval ev;
    ev.candidate.assign(n_, 0);
    double fixed = 0.0;
    for (int v = 0; v < n_; ++v) {
      if (val_[v] == 1) {
        fixed += cost_[v];
        ev.candidate[v] = 1;
      }
    }
    double neg = 0.0;
    for (const auto& t : qterms_) {
      int8_t ps = product_state(t.a, t.b);
      if (ps == 1) fixed += t.coef;
      else if (ps == -1 && val_[t.a] == -1 && val_[t.b] == -1) neg += std::min(0.0, t.coef);
    }
    reduced_.assign(n_, 0.0);
    for (int v = 0; v < n_; ++v) {
      if (val_[v] != -1) continue;
      double r = cost_[v];
      for (const auto& [u, q] : obj_adj_[v]) {
        if (val_[u] == 1) r += q;
      }
      reduced_[v] = r;
    }
    if (pair_bound_) add_pair_bound();

    double part = 0.0;
    bool ok = transport_ ? flow_bound(ev.candidate, part) : group_bound(ev.candidate, part);
    if (!ok) return ev;
    ev.feasible = true;
    ev.bound = fixed + neg + part;
    return ev;
  }

  void add_pair_bound() {
    const int ng = static_cast<int>(groups_.size());
    std::vector<int> free_in(ng, 0);
    std::vector<char> open(ng, 1);
    for (int v = 0; v < n_; ++v) {
      int g = group_of_[v];
      if (g < 0) continue;
      if (val_[v] == 1) open[g] = 0;
      else if (val_[v] == -1) ++free_in[g];
    }
    std::vector<int> touched;
    for (int v = 0; v < n_; ++v) {
      int g = group_of_[v];
      if (g < 0 || val_[v] != -1 || !open[g]) continue;
      touched.clear();
      for (const auto& [u, q] : obj_adj_[v]) {
        int h = group_of_[u];
        if (val_[u] != -1 || h < 0 || h == g || !open[h]) continue;
        if (seen_cnt_[h]++ == 0) {
          touched.push_back(h);
          seen_min_[h] = q;
        } else {
          seen_min_[h] = std::min(seen_min_[h], q);
        }
      }
      for (int h : touched) {
        // Every free member of h interacts with v, so whichever is picked costs at least the minimum.
        if (seen_cnt_[h] == free_in[h]) reduced_[v] += 0.5 * seen_min_[h];
        seen_cnt_[h] = 0;
      }
    }
  }

  bool group_bound(Bits& cand, double& part) {
    part = 0.0;
    for (const auto& g : groups_) {
      bool decided = false;
      int best = -1;
      for (int v : g) {
        if (val_[v] == 1) decided = true;
        if (val_[v] == -1 && (best < 0 || reduced_[v] < reduced_[best])) best = v;
      }
      if (decided) continue;
      if (best < 0) return false;
      part += reduced_[best];
      cand[best] = 1;
    }
    for (int v = 0; v < n_; ++v) {
      if (group_of_[v] < 0 && val_[v] == -1 && reduced_[v] < 0) {
        part += reduced_[v];
        cand[v] = 1;
      }
    }
    return true;
  }

  bool flow_bound(Bits& cand, double& part) {
    const int n_groups = static_cast<int>(groups_.size());
    const int n_caps = static_cast<int>(caps_.size());
    std::vector<int> cap_left(n_caps);
    for (int k = 0; k < n_caps; ++k) cap_left[k] = caps_[k].rhs;
    for (int v = 0; v < n_; ++v) {
      if (val_[v] == 1 && cap_of_[v] >= 0) cap_left[cap_of_[v]]--;
    }
    for (int k = 0; k < n_caps; ++k) {
      if (cap_left[k] < 0) return false;
    }
    const int s = 0, g0 = 1, c0 = 1 + n_groups, t = c0 + n_caps;
    MinCostFlow flow(2 + n_groups + n_caps);
    struct VarArc {
      int var;
      int node;
      int idx;
    };
    std::vector<VarArc> arcs;
    int open = 0;
    for (int g = 0; g < n_groups; ++g) {
      bool decided = false;
      bool any_free = false;
      for (int v : groups_[g]) {
        decided |= val_[v] == 1;
        any_free |= val_[v] == -1;
      }
      if (decided) continue;
      if (!any_free) return false;
      ++open;
      flow.add_arc(s, g0 + g, 1, 0.0);
      for (int v : groups_[g]) {
        if (val_[v] != -1) continue;
        int to = cap_of_[v] >= 0 ? c0 + cap_of_[v] : t;
        arcs.push_back({v, g0 + g, flow.add_arc(g0 + g, to, 1, reduced_[v])});
      }
    }
    for (int k = 0; k < n_caps; ++k) {
      if (cap_left[k] > 0) flow.add_arc(c0 + k, t, cap_left[k], 0.0);
    }
    double cost = 0.0;
    if (flow.run(s, t, open, cost) < open) return false;
    part = 0.0;
    for (const auto& a : arcs) {
      if (flow.residual(a.node, a.idx) == 0) {
        cand[a.var] = 1;
        part += reduced_[a.var];
      }
    }
    return true;
  }

  // ---- search ----

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void check_budget() {
    if (budget_.max_nodes && nodes_ > *budget_.max_nodes) {
      throw BudgetExhausted("solve: node budget exhausted");
    }
    if (budget_.max_seconds && (nodes_ & 63) == 0 && elapsed() > *budget_.max_seconds) {
      throw BudgetExhausted("solve: time budget exhausted");
    }
  }

  bool dominated(double bound) const {
    return have_incumbent_ && bound >= incumbent_obj_ - prune_tol(incumbent_obj_);
  }

  void consider(const Bits& x, double obj) {
    if (!have_incumbent_ || obj < incumbent_obj_ ||
        (obj == incumbent_obj_ && lex_less(x, incumbent_))) {
      have_incumbent_ = true;
      incumbent_ = x;
      incumbent_obj_ = obj;
    }
  }

  // Returns the variable to branch on given the relaxation's candidate.
  int choose_branch(const Bits& cand, bool cand_feasible) const {
    int best = -1;
    auto offer = [&](int v) {
      if (val_[v] != -1) return;
      if (best < 0 || std::abs(cost_[v]) > std::abs(cost_[best]) ||
          (std::abs(cost_[v]) == std::abs(cost_[best]) && v < best)) {
        best = v;
      }
    };
    if (!cand_feasible) {
      for (const auto& row : rows_) {
        double act = 0.0;
        for (const auto& t : row.lin) act += cand[t.var] ? t.coef : 0.0;
        for (const auto& t : row.quad) act += (cand[t.a] && cand[t.b]) ? t.coef : 0.0;
        bool ok = row.sense == Sense::Eq   ? std::abs(act - row.rhs) <= kTol
                  : row.sense == Sense::Ge ? act >= row.rhs - kTol
                                           : act <= row.rhs + kTol;
        if (ok) continue;
        for (const auto& t : row.lin) {
          if (cand[t.var]) offer(t.var);
        }
        for (const auto& t : row.quad) {
          if (cand[t.a]) offer(t.a);
          if (cand[t.b]) offer(t.b);
        }
      }
    }
    if (best < 0) {
      for (const auto& t : qterms_) {
        if (t.coef > 0 && cand[t.a] && cand[t.b]) {
          offer(t.a);
          offer(t.b);
        }
      }
    }
    if (best < 0) {
      for (int v = 0; v < n_; ++v) offer(v);
    }
    return best;
  }

  struct Child {
    int var;
    int8_t value;
    NodeEval eval;
  };

  bool apply(int v, int8_t b) {
    if (!assign(v, b)) return false;
    return propagate();
  }

  void dfs(const NodeEval& node) {
    ++nodes_;
    check_budget();
    if (dominated(node.bound)) return;

    bool cand_ok = prog_.feasible(node.candidate, kTol);
    if (cand_ok) {
      double obj = prog_.objective(node.candidate);
      consider(node.candidate, obj);
      if (obj <= node.bound + prune_tol(node.bound)) return;
    }
    int v = choose_branch(node.candidate, cand_ok);
    if (v < 0) return;  // fully fixed; candidate already examined

    std::vector<Child> children;
    auto try_child = [&](int var, int8_t b) {
      size_t mark = trail_.size();
      if (apply(var, b)) {
        NodeEval ev = evaluate();
        if (ev.feasible) children.push_back({var, b, std::move(ev)});
      }
      undo(mark);
    };
    const int g = group_of_[v];
    if (g >= 0) {
      for (int u : groups_[g]) {
        if (val_[u] == -1) try_child(u, 1);
      }
    } else {
      try_child(v, 1);
      try_child(v, 0);
    }
    std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
      return a.eval.bound < b.eval.bound;
    });
    for (const auto& child : children) {
      if (dominated(child.eval.bound)) continue;
      size_t mark = trail_.size();
      if (apply(child.var, child.value)) dfs(child.eval);
      undo(mark);
    }
  }

  struct Cap {
    int rhs;
    bool eq;
  };

  const BinaryProgram& prog_;
  SolveBudget budget_;
  int n_;
  std::vector<double> cost_;
  std::vector<QuadTerm> qterms_;
  std::vector<std::vector<std::pair<int, double>>> obj_adj_;
  std::vector<Row> rows_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_;
  bool transport_ = false;
  std::vector<int> cap_of_;
  std::vector<Cap> caps_;

  std::vector<int8_t> val_;
  std::vector<int> trail_;
  std::vector<int> queue_;
  std::vector<char> in_queue_;
  std::vector<double> reduced_;
  bool pair_bound_ = false;
  std::vector<int> seen_cnt_;
  std::vector<double> seen_min_;

  bool have_incumbent_ = false;
  Bits incumbent_;
  double incumbent_obj_ = kInf;
  long nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Solution solve(const BinaryProgram& prog, const SolveBudget& budget) {
  prog.validate();
  Search search(prog, budget);
  return search.run();
}

}  // namespace swarmdef::bip
