#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swarmdef/assignment.hpp"

namespace swarmdef {

struct BenchInstance {
  unsigned seed = 0;
  int n_attackers = 0;
  int n_clusters = 0;
  int n_unclustered = 0;
  std::vector<int> cluster_sizes;
  std::vector<Vec2> attackers;  // clustered attackers, cluster by cluster
  SplitSnapshot snapshot;
};

struct BenchCell {
  int n_attackers = 0;
  int n_clusters = 0;
  int n_unclustered = 0;

  bool feasible() const { return n_attackers - n_unclustered >= 3 * n_clusters && n_clusters >= 1; }
};

struct BenchRecord {
  unsigned seed = 0;
  BenchCell cell;
  SplitSolver solver = SplitSolver::RsMiqcqp;
  double wall_s = 0.0;
  double objective = 0.0;
  double pct_e = 0.0;  // NaN unless heuristic with an rs-MIQCQP reference
  long nodes = 0;
  bool timed_out = false;
  std::vector<int> task;
};

struct BenchOptions {
  std::vector<BenchCell> grid;
  int reps = 30;
  unsigned seed0 = 1;
  std::vector<SplitSolver> solvers{SplitSolver::Miqcqp, SplitSolver::RsMiqcqp, SplitSolver::Heuristic};
  bool unsafe_large = false;
  double time_limit_s = 120.0;  // per solve
  int workers = 1;
  int min_clusters = 3;
  double w = 0.5;
};

struct BenchSummary {
  BenchCell cell;
  SplitSolver solver = SplitSolver::RsMiqcqp;
  int runs = 0;
  int timeouts = 0;
  double mean_wall = 0.0;
  double median_wall = 0.0;
  double mean_objective = 0.0;
  double mean_pct_e = 0.0;
  double max_pct_e = 0.0;
};

namespace bench {

inline constexpr int kGuardVars = 30;

// Uniform composition of n_a − n_uc into n_ac parts of at least 3 each.
std::vector<int> cluster_sizes(unsigned seed, int n_attackers, int n_clusters, int n_unclustered);

// Throws std::invalid_argument when n_a − n_uc < 3·n_ac.
BenchInstance gen_instance(unsigned seed, int n_attackers, int n_clusters, int n_unclustered);

// Decision-vector length of the solver's program for this cell (0 for the heuristic).
long decision_vector_length(const BenchCell& cell, SplitSolver solver);

// Grid spec "NA_LIST:NUC_LIST:NAC_LIST", e.g. "12,20,30:0,2,4,8:1,2,3". Cells
// with n_a − n_uc < 3·n_ac are dropped.
std::vector<BenchCell> parse_grid(const std::string& spec);
std::vector<BenchCell> default_grid();

// Throws std::invalid_argument if an exact solver exceeds the guard without unsafe_large.
std::vector<BenchRecord> bench_assign(const BenchOptions& opts);

double pct_error(double rs_cost, double heuristic_cost);

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);

void write_records_csv(const std::vector<BenchRecord>& records, std::ostream& out);
void write_summary_csv(const std::vector<BenchSummary>& summary, std::ostream& out);

}  // namespace bench

namespace scenario_io {

std::string dump_snapshot(const SplitSnapshot& snap);
SplitSnapshot parse_snapshot(const std::string& json_text);

}  // namespace scenario_io
}  // namespace swarmdef
