// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "swarmdef/bench.hpp"
#include "swarmdef/clustering.hpp"
#include "swarmdef/simulation.hpp"

using namespace swarmdef;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Validity recomputed from the task vector alone.
bool valid_split(const SplitSnapshot& s, const std::vector<int>& task) {
  const int d = s.num_defenders(), k = s.num_clusters(), u = s.num_unclustered();
  if (static_cast<int>(task.size()) != d) return false;
  std::vector<int> count(k + u, 0), first(k, -1), last(k, -1);
  for (int l = 0; l < d; ++l) {
    if (task[l] < 0 || task[l] >= k + u) return false;
    ++count[task[l]];
    if (task[l] < k) {
      if (first[task[l]] < 0) first[task[l]] = l;
      last[task[l]] = l;
    }
  }
  for (int c = 0; c < k; ++c) {
    if (count[c] != s.capacity(c)) return false;
    if (last[c] - first[c] + 1 != count[c]) return false;
  }
  for (int i = 0; i < u; ++i) {
    if (count[k + i] != 1) return false;
  }
  return true;
}

void criterion1() {
  auto t0 = Clock::now();
  std::mt19937 rng(20240501);
  int agree = 0, optimal = 0, too_big = 0;
  const int total = 500;
  for (int i = 0; i < total; ++i) {
    auto p = oracle::random_program(rng, oracle::kShapes[i % 4]);
    if (p.num_vars() > 20) ++too_big;
    auto a = bip::solve(p);
    auto b = bip::brute_force(p);
    bool same = a.status == b.status &&
                (a.status != bip::SolveStatus::Optimal || (a.objective == b.objective && p.feasible(a.assignment)));
    agree += same;
    optimal += b.status == bip::SolveStatus::Optimal;
  }
  double secs = since(t0);
  report(1, agree == total && too_big == 0 && secs < 300.0,
         fmt("%d/%d programs agree with exhaustive search (%d feasible, 4 shapes), %.1f s", agree, total,
             optimal, secs));
}

std::vector<BenchRecord> desk_records;

void criterion2() {
  auto t0 = Clock::now();
  BenchOptions o;
  o.grid = bench::default_grid();
  o.reps = 30;
  o.unsafe_large = true;
  o.workers = 1;
  desk_records = bench::bench_assign(o);
  double secs = since(t0);
  auto summary = bench::summarize(desk_records);
  double grand = 0.0, worst_cell = 0.0, worst_instance = 0.0;
  int n = 0, cells = 0, timeouts = 0;
  for (const auto& r : desk_records) {
    timeouts += r.timed_out;
    if (r.solver != SplitSolver::Heuristic || std::isnan(r.pct_e)) continue;
    grand += r.pct_e;
    worst_instance = std::max(worst_instance, r.pct_e);
    ++n;
  }
  grand = n ? grand / n : NAN;
  bool cells_ok = true;
  for (const auto& s : summary) {
    if (s.solver != SplitSolver::Heuristic) continue;
    ++cells;
    cells_ok = cells_ok && s.runs >= 30 && !std::isnan(s.mean_pct_e);
    worst_cell = std::max(worst_cell, s.mean_pct_e);
  }
  report(2, cells_ok && timeouts == 0 && grand <= 4.0 && worst_cell <= 8.0 && secs < 900.0,
         fmt("%d cells x 30 instances: mean %%E %.3f (<= 4), max cell mean %%E %.3f (<= 8), "
             "largest single-instance %%E %.3f, %d timeouts, %.1f s",
             cells, grand, worst_cell, worst_instance, timeouts, secs));
}

void criterion3() {
  std::vector<double> tm, trs, th;
  bool valid = true;
  for (unsigned seed = 1; seed <= 30; ++seed) {
    auto inst = bench::gen_instance(seed, 30, 3, 8);
    auto m = assignment::solve_split(inst.snapshot, SplitSolver::Miqcqp);
    auto rs = assignment::solve_split(inst.snapshot, SplitSolver::RsMiqcqp);
    auto h = assignment::solve_split(inst.snapshot, SplitSolver::Heuristic);
    tm.push_back(m.solve_seconds);
    trs.push_back(rs.solve_seconds);
    th.push_back(h.solve_seconds);
    valid = valid && valid_split(inst.snapshot, m.task) && valid_split(inst.snapshot, rs.task) &&
            valid_split(inst.snapshot, h.task);
  }
  double mm = median(tm), mrs = median(trs), mh = median(th);
  auto wc = assignment::worst_case_costs(30, 3, 8, 30, 3);
  bool ok = valid && mh < mrs && mrs <= mm && 2.0 * mh <= mrs && wc.ordering_holds;
  report(3, ok,
         fmt("(30,3,8) over 30 seeds: median H %.3g s, rs %.3g s, M %.3g s (rs/H %.2fx); worst-case log2 "
             "H %.2f < rs %.2f <= M %.2f",
             mh, mrs, mm, mrs / mh, wc.log2_heuristic, wc.log2_rs, wc.log2_full));
}

void criterion4() {
  std::vector<double> t;
  bool valid = true;
  int capped = 0;
  bip::SolveBudget budget;
  budget.max_seconds = 5.0;
  for (unsigned seed = 1; seed <= 30; ++seed) {
    auto inst = bench::gen_instance(seed, 60, 6, 24);
    auto start = Clock::now();
    try {
      auto h = assignment::hierarchical_dasa(inst.snapshot, 3, 0.5, budget);
      t.push_back(since(start));
      valid = valid && valid_split(inst.snapshot, h.task);
    } catch (const bip::BudgetExhausted&) {
      // Unfinished solves rank above every finished one.
      t.push_back(kInf);
      ++capped;
    }
  }
  double med = median(t);
  report(4, valid && med <= 0.5,
         fmt("heuristic at (60,6,24): median %.4f s over 30 seeds, %d solves unfinished after 5 s", med, capped));
}

void criterion5() {
  std::map<std::tuple<int, int, int, unsigned>, std::map<SplitSolver, double>> by_instance;
  for (const auto& r : desk_records) {
    by_instance[{r.cell.n_attackers, r.cell.n_clusters, r.cell.n_unclustered, r.seed}][r.solver] = r.objective;
  }
  int ok = 0, total = 0;
  for (const auto& [key, costs] : by_instance) {
    ++total;
    if (costs.size() != 3) continue;
    double m = costs.at(SplitSolver::Miqcqp), rs = costs.at(SplitSolver::RsMiqcqp),
           h = costs.at(SplitSolver::Heuristic);
    ok += m <= rs && rs <= h;
  }
  report(5, total > 0 && ok == total, fmt("cost(M) <= cost(rs) <= cost(H) on %d/%d benchmark instances", ok, total));
}

void criterion6() {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0, excess = -kInf;
  for (int run = 0; run < 100; ++run) {
    AgentParams p = run % 2 ? default_defender_params() : default_attacker_params();
    AgentState s{Vec2(50 * u(rng), 50 * u(rng)), Vec2::Zero()};
    s.velocity = dynamics::clamp_norm(Vec2(10 * u(rng), 10 * u(rng)), dynamics::speed_bound(p));
    AgentState ref = s;
    for (int k = 0; k < 500; ++k) {
      Vec2 a = dynamics::clamp_norm(Vec2(p.u_max * 1.5 * u(rng), p.u_max * 1.5 * u(rng)), p.u_max);
      s = dynamics::step(s, a, 0.02, p);
      ref = oracle::rk4(ref, a, p.drag, 0.02, 1e-4);
      excess = std::max(excess, s.velocity.norm() - dynamics::speed_bound(p));
    }
    worst = std::max({worst, (s.position - ref.position).norm(), (s.velocity - ref.velocity).norm()});
  }
  double terminal[2];
  int idx = 0;
  for (const AgentParams& p : {default_attacker_params(), default_defender_params()}) {
    AgentState s;
    for (int k = 0; k < 1500; ++k) s = dynamics::step(s, Vec2(p.u_max, 0), 0.02, p);
    terminal[idx++] = s.velocity.norm();
  }
  bool ok = worst <= 1e-6 && excess <= 1e-9 && std::abs(terminal[0] - 6.0) <= 0.01 &&
            std::abs(terminal[1] - 12.27) <= 0.01;
  report(6, ok,
         fmt("100 runs x 10 s vs RK4 (h=1e-4): max error %.2e; max speed excess %.2e; terminal speeds %.4f, %.4f",
             worst, excess, terminal[0], terminal[1]));
}

void criterion7() {
  auto t0 = Clock::now();
  ScenarioConfig c = scenario_io::load_config(std::string(SWARMDEF_SOURCE_DIR) + "/scenarios/scenario3.json");
  SimTrace tr = sim::run(c);
  double secs = since(t0);
  std::vector<std::string> seq;
  std::string partition, split;
  for (const auto& e : tr.events) {
    if (e.type == "partition") partition = e.detail;
    if (e.type == "split") split = e.detail;
    if (e.type == "partition" || e.type == "interception" || e.type == "split" || e.type == "enclosure" ||
        e.type == "herd_arrival" || e.type == "breach") {
      seq.push_back(e.type);
    }
  }
  const std::vector<std::string> want{"partition",    "interception", "interception", "split",
                                      "interception", "interception", "enclosure",    "enclosure",
                                      "enclosure",    "herd_arrival", "herd_arrival", "herd_arrival"};
  bool ok = tr.error.empty() && seq == want && partition == "clusters=10,4 uc=2" &&
            split.rfind("clusters=4,4 uc=2", 0) == 0 && tr.breaches == 0 && tr.split_events == 1 && secs < 120.0;
  std::string got;
  for (const auto& s : seq) got += (got.empty() ? "" : " ") + s;
  report(7, ok,
         fmt("16v16 scenario: partition [%s], split [%s], %d breaches, event order %s, %.1f s",
             partition.c_str(), split.substr(0, 17).c_str(), tr.breaches, seq == want ? "as expected" : got.c_str(),
             secs));
}

void criterion8() {
  std::mt19937 rng(8);
  int ok = 0;
  const int total = 200;
  const SplitSolver solvers[] = {SplitSolver::Miqcqp, SplitSolver::RsMiqcqp, SplitSolver::Heuristic};
  for (int e = 0; e < total; ++e) {
    int nac = std::uniform_int_distribution<int>(1, 4)(rng);
    int nuc = std::uniform_int_distribution<int>(0, 6)(rng);
    int na = 3 * nac + nuc + std::uniform_int_distribution<int>(0, 10)(rng);
    auto inst = bench::gen_instance(static_cast<unsigned>(e + 1), na, nac, nuc);
    SplitSolver s = solvers[e % 3];
    if (s == SplitSolver::Miqcqp && na * (nac + nuc) > 200) s = SplitSolver::RsMiqcqp;
    auto a = assignment::solve_split(inst.snapshot, s);
    ok += assignment::check_split_assignment(inst.snapshot, a.task).empty() && valid_split(inst.snapshot, a.task);
  }
  report(8, ok == total, fmt("%d/%d split assignments pass the checker and an independent recount", ok, total));
}

void criterion9() {
  std::mt19937 rng(9);
  int ok = 0;
  const int total = 200;
  for (int i = 0; i < total; ++i) {
    auto pts = oracle::random_points(rng, 25);
    double eps = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    int min_pts = std::uniform_int_distribution<int>(2, 5)(rng);
    ok += oracle::from(clustering::cluster(pts, {eps, min_pts, 0, 0})) == oracle::dbscan(pts, eps, min_pts);
  }
  report(9, ok == total, fmt("%d/%d point sets (<= 25 points) match the reference clustering", ok, total));
}

void criterion10() {
  double min_with = kInf;
  int violations = 0, captured = 0;
  for (unsigned seed = 1; seed <= 100; ++seed) {
    auto a = sim::run_crossing(seed, true);
    auto b = sim::run_crossing(seed, false);
    min_with = std::min(min_with, a.min_distance);
    captured += a.both_captured;
    violations += b.min_distance < 1.0;
  }
  report(10, min_with >= 1.0 && violations >= 1,
         fmt("100 crossings: min separation with CBF %.3f m (>= 1), %d violations without CBF, %d/100 "
             "captured with CBF",
             min_with, violations, captured));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  return failures ? 1 : 0;
}
