#include "swarmdef/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace swarmdef::bench {

namespace {

std::mt19937_64 instance_rng(unsigned seed, int n_a, int n_ac, int n_uc) {
  std::seed_seq seq{seed, static_cast<unsigned>(n_a), static_cast<unsigned>(n_ac),
                    static_cast<unsigned>(n_uc)};
  return std::mt19937_64(seq);
}

void check_dims(int n_attackers, int n_clusters, int n_unclustered) {
  if (n_clusters < 1 || n_unclustered < 0 || n_attackers - n_unclustered < 3 * n_clusters) {
    throw std::invalid_argument("bench: need n_a - n_uc >= 3 n_ac with n_ac >= 1");
  }
}

std::vector<int> sizes_from(std::mt19937_64& rng, int n_attackers, int n_clusters,
                            int n_unclustered) {
  const int extra = n_attackers - n_unclustered - 3 * n_clusters;
  // Stars and bars: choose n_ac − 1 bar positions among extra + n_ac − 1 cells.
  std::vector<int> cells(extra + n_clusters - 1);
  std::iota(cells.begin(), cells.end(), 0);
  std::vector<int> bars;
  std::sample(cells.begin(), cells.end(), std::back_inserter(bars), n_clusters - 1, rng);
  std::vector<int> sizes;
  int prev = -1;
  for (int b : bars) {
    sizes.push_back(3 + (b - prev - 1));
    prev = b;
  }
  sizes.push_back(3 + (static_cast<int>(cells.size()) - prev - 1));
  return sizes;
}

}  // namespace

std::vector<int> cluster_sizes(unsigned seed, int n_attackers, int n_clusters, int n_unclustered) {
  check_dims(n_attackers, n_clusters, n_unclustered);
  auto rng = instance_rng(seed, n_attackers, n_clusters, n_unclustered);
  return sizes_from(rng, n_attackers, n_clusters, n_unclustered);
}

BenchInstance gen_instance(unsigned seed, int n_attackers, int n_clusters, int n_unclustered) {
  check_dims(n_attackers, n_clusters, n_unclustered);
  auto rng = instance_rng(seed, n_attackers, n_clusters, n_unclustered);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  BenchInstance inst;
  inst.seed = seed;
  inst.n_attackers = n_attackers;
  inst.n_clusters = n_clusters;
  inst.n_unclustered = n_unclustered;
  inst.cluster_sizes = sizes_from(rng, n_attackers, n_clusters, n_unclustered);

  const double theta = 2.0 * std::numbers::pi * uni(rng);
  const Vec2 com = (150.0 + 50.0 * uni(rng)) * unit_vector(theta);
  const Vec2 to_p = -unit_vector(theta);
  const Vec2 side(-to_p.y(), to_p.x());

  SplitSnapshot& snap = inst.snapshot;
  snap.n_attackers = n_attackers;
  const double gap = 15.0 + 10.0 * uni(rng);
  for (int k = 0; k < n_clusters; ++k) {
    Vec2 c = com + side * ((k - 0.5 * (n_clusters - 1)) * gap) + to_p * (3.0 * gauss(rng));
    snap.cluster_centers.push_back(c);
    snap.cluster_sizes.push_back(inst.cluster_sizes[k]);
    for (int m = 0; m < inst.cluster_sizes[k]; ++m) {
      inst.attackers.push_back(c + 1.5 * Vec2(gauss(rng), gauss(rng)));
    }
  }
  // Unclustered attackers break away sideways, inside the π/4 double cone.
  const double half_width = 0.5 * (n_clusters - 1) * gap + 5.0;
  for (int i = 0; i < n_unclustered; ++i) {
    double s = uni(rng) < 0.5 ? -1.0 : 1.0;
    double lateral = half_width + 8.0 + 20.0 * uni(rng);
    double radial = (1.2 * uni(rng) - 0.6) * lateral;
    AgentState a;
    a.position = com + side * (s * lateral) + to_p * radial;
    Vec2 heading = (snap.model.world.protected_center - a.position).normalized();
    a.velocity = (2.0 + 3.0 * uni(rng)) * heading;
    snap.unclustered.push_back(a);
    snap.unclustered_ids.push_back(i);
  }
  int n_def = n_unclustered;
  for (int s : inst.cluster_sizes) n_def += snap.rd(s);
  const Vec2 line_center = com + to_p * 25.0;
  const double phi = std::atan2(-to_p.y(), -to_p.x());
  std::vector<Vec2> slots = formation::line_slots(line_center, phi, n_def, 2.5);
  for (int l = 0; l < n_def; ++l) {
    AgentState d;
    d.position = slots[l] + 0.5 * Vec2(gauss(rng), gauss(rng));
    d.velocity = -to_p * (2.0 * uni(rng));
    snap.defenders.push_back(d);
    snap.defender_ids.push_back(l);
  }
  return inst;
}

long decision_vector_length(const BenchCell& cell, SplitSolver solver) {
  const long d = cell.n_attackers;  // identity allocation in the benchmark
  switch (solver) {
    case SplitSolver::Miqcqp:
      return d * (cell.n_clusters + cell.n_unclustered);
    case SplitSolver::RsMiqcqp:
      return assignment::rs_vector_length(cell.n_attackers, cell.n_clusters, cell.n_unclustered);
    case SplitSolver::Heuristic:
      return 0;
  }
  return 0;
}

namespace {

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: bad integer '" + tok + "'");
    }
    if (used != tok.size() || v < 0) throw std::invalid_argument("grid: bad integer '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("grid: empty list");
  return out;
}

}  // namespace

std::vector<BenchCell> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() != 3) throw std::invalid_argument("grid: expected NA_LIST:NUC_LIST:NAC_LIST");
  std::vector<BenchCell> out;
  for (int na : int_list(parts[0])) {
    for (int nuc : int_list(parts[1])) {
      for (int nac : int_list(parts[2])) {
        BenchCell c{na, nac, nuc};
        if (c.feasible()) out.push_back(c);
      }
    }
  }
  return out;
}

std::vector<BenchCell> default_grid() { return parse_grid("12,20,30:0,2,4,8:1,2,3"); }

double pct_error(double rs_cost, double heuristic_cost) {
  if (rs_cost == 0.0) return heuristic_cost == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return 100.0 * std::abs(rs_cost - heuristic_cost) / rs_cost;
}

std::vector<BenchRecord> bench_assign(const BenchOptions& opts) {
  if (opts.reps < 1) throw std::invalid_argument("bench: reps must be positive");
  for (const auto& cell : opts.grid) {
    if (!cell.feasible()) throw std::invalid_argument("bench: infeasible cell in grid");
    for (SplitSolver s : opts.solvers) {
      long n = decision_vector_length(cell, s);
      if (n > kGuardVars && !opts.unsafe_large) {
        std::ostringstream msg;
        msg << "bench: " << to_string(s) << " at (" << cell.n_attackers << ',' << cell.n_clusters
            << ',' << cell.n_unclustered << ") has " << n << " binaries, above the guard of "
            << kGuardVars << "; pass --unsafe-large to run it";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  struct Job {
    BenchCell cell;
    unsigned seed;
  };
  std::vector<Job> jobs;
  for (const auto& cell : opts.grid) {
    for (int r = 0; r < opts.reps; ++r) jobs.push_back({cell, opts.seed0 + static_cast<unsigned>(r)});
  }
  std::vector<std::vector<BenchRecord>> results(jobs.size());
  bip::SolveBudget budget;
  budget.max_seconds = opts.time_limit_s;

  auto run_job = [&](size_t idx) {
    const Job& job = jobs[idx];
    BenchInstance inst =
        gen_instance(job.seed, job.cell.n_attackers, job.cell.n_clusters, job.cell.n_unclustered);
    std::vector<BenchRecord> out;
    double rs_cost = std::numeric_limits<double>::quiet_NaN();
    for (SplitSolver s : opts.solvers) {
      BenchRecord rec;
      rec.seed = job.seed;
      rec.cell = job.cell;
      rec.solver = s;
      rec.pct_e = std::numeric_limits<double>::quiet_NaN();
      try {
        SplitAssignment a = assignment::solve_split(inst.snapshot, s, opts.min_clusters, opts.w, budget);
        rec.wall_s = a.solve_seconds;
        rec.objective = a.cost;
        rec.nodes = a.nodes;
        rec.task = a.task;
      } catch (const bip::BudgetExhausted&) {
        rec.timed_out = true;
        rec.wall_s = opts.time_limit_s;
        rec.objective = std::numeric_limits<double>::quiet_NaN();
      }
      if (s == SplitSolver::RsMiqcqp && !rec.timed_out) rs_cost = rec.objective;
      out.push_back(rec);
    }
    for (auto& rec : out) {
      if (rec.solver == SplitSolver::Heuristic && !rec.timed_out && !std::isnan(rs_cost)) {
        rec.pct_e = pct_error(rs_cost, rec.objective);
      }
    }
    results[idx] = std::move(out);
  };

  const int workers = std::max(1, opts.workers);
  if (workers == 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < jobs.size(); i = next++) run_job(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<BenchRecord> flat;
  for (auto& r : results) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  std::vector<BenchSummary> out;
  std::map<std::tuple<int, int, int, int>, std::vector<const BenchRecord*>> groups;
  std::vector<std::tuple<int, int, int, int>> order;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.cell.n_attackers, r.cell.n_clusters, r.cell.n_unclustered,
                               static_cast<int>(r.solver));
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  for (const auto& key : order) {
    const auto& rs = groups[key];
    BenchSummary s;
    s.cell = rs.front()->cell;
    s.solver = rs.front()->solver;
    std::vector<double> walls;
    int n_obj = 0, n_pct = 0;
    for (const BenchRecord* r : rs) {
      ++s.runs;
      walls.push_back(r->wall_s);
      if (r->timed_out) {
        ++s.timeouts;
        continue;
      }
      s.mean_objective += r->objective;
      ++n_obj;
      if (!std::isnan(r->pct_e)) {
        s.mean_pct_e += r->pct_e;
        s.max_pct_e = std::max(s.max_pct_e, r->pct_e);
        ++n_pct;
      }
    }
    s.mean_wall = std::accumulate(walls.begin(), walls.end(), 0.0) / walls.size();
    std::sort(walls.begin(), walls.end());
    size_t m = walls.size() / 2;
    s.median_wall = walls.size() % 2 ? walls[m] : 0.5 * (walls[m - 1] + walls[m]);
    s.mean_objective = n_obj ? s.mean_objective / n_obj : std::numeric_limits<double>::quiet_NaN();
    s.mean_pct_e = n_pct ? s.mean_pct_e / n_pct : std::numeric_limits<double>::quiet_NaN();
    if (!n_pct) s.max_pct_e = std::numeric_limits<double>::quiet_NaN();
    out.push_back(s);
  }
  return out;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "seed,N_a,N_ac,N_uc,solver,wall_s,objective,pctE\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.cell.n_attackers << ',' << r.cell.n_clusters << ','
        << r.cell.n_unclustered << ',' << to_string(r.solver) << ',' << num(r.wall_s) << ','
        << (r.timed_out ? std::string("timeout") : num(r.objective)) << ',' << num(r.pct_e) << '\n';
  }
}

void write_summary_csv(const std::vector<BenchSummary>& summary, std::ostream& out) {
  out << "N_a,N_ac,N_uc,solver,runs,timeouts,mean_wall_s,median_wall_s,mean_objective,mean_pctE,"
         "max_pctE,partial\n";
  for (const auto& s : summary) {
    out << s.cell.n_attackers << ',' << s.cell.n_clusters << ',' << s.cell.n_unclustered << ','
        << to_string(s.solver) << ',' << s.runs << ',' << s.timeouts << ',' << num(s.mean_wall)
        << ',' << num(s.median_wall) << ',' << num(s.mean_objective) << ',' << num(s.mean_pct_e)
        << ',' << num(s.max_pct_e) << ',' << (s.timeouts ? "yes" : "no") << '\n';
  }
}

}  // namespace swarmdef::bench
