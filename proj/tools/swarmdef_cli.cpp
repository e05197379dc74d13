#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmdef/bench.hpp"
#include "swarmdef/clustering.hpp"
#include "swarmdef/plot.hpp"
#include "swarmdef/simulation.hpp"

namespace fs = std::filesystem;
using namespace swarmdef;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SplitSolver> parse_solvers(const std::string& list) {
  std::vector<SplitSolver> out;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto s = parse_split_solver(tok);
    if (!s) throw CLI::ValidationError("--solvers", "unknown solver '" + tok + "'");
    out.push_back(*s);
  }
  if (out.empty()) throw CLI::ValidationError("--solvers", "empty list");
  return out;
}

// x,y per line; a non-numeric first line is taken as a header.
std::vector<Vec2> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Vec2> pts;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      double x = std::stod(line.substr(0, comma));
      double y = std::stod(line.substr(comma + 1));
      pts.emplace_back(x, y);
    } catch (const std::exception&) {
      if (row == 1) continue;
      throw std::invalid_argument(path + ": row " + std::to_string(row) + " is not x,y");
    }
  }
  return pts;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  ScenarioConfig cfg = scenario_io::load_config(config_path);
  SimTrace trace = sim::run(cfg);
  fs::create_directories(out_dir);
  {
    auto out = open_out(fs::path(out_dir) / "trace.csv");
    scenario_io::write_trace_csv(trace, out);
  }
  {
    auto out = open_out(fs::path(out_dir) / "events.csv");
    scenario_io::write_events_csv(trace, out);
  }
  std::cout << "scenario " << cfg.name << ": t_end=" << trace.end_time << " events=" << trace.events.size()
            << " splits=" << trace.split_events << " breaches=" << trace.breaches
            << (trace.completed ? " completed" : " incomplete") << '\n';
  for (const auto& e : trace.events) {
    std::cout << std::fixed << std::setprecision(2) << std::setw(8) << e.t << "  " << e.type << ' '
              << e.subject << ' ' << e.object << ' ' << e.detail << '\n';
  }
  if (!trace.error.empty()) {
    std::cerr << "error: " << trace.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_bench(const BenchOptions& opts, const std::string& out_dir) {
  auto records = bench::bench_assign(opts);
  auto summary = bench::summarize(records);
  fs::create_directories(out_dir);
  {
    auto out = open_out(fs::path(out_dir) / "bench.csv");
    bench::write_records_csv(records, out);
  }
  {
    auto out = open_out(fs::path(out_dir) / "summary.csv");
    bench::write_summary_csv(summary, out);
  }
  {
    auto out = open_out(fs::path(out_dir) / "bench.svg");
    out << plot::bench_svg(summary);
  }
  bench::write_summary_csv(summary, std::cout);
  return 0;
}

int cmd_cluster(const std::string& path, std::optional<double> eps, int min_pts, int defenders,
                double string_length) {
  auto pts = read_points(path);
  if (pts.empty()) throw std::invalid_argument(path + ": no points");
  ClusteringParams params =
      clustering::dbscan_params(static_cast<int>(pts.size()), defenders > 0 ? defenders : static_cast<int>(pts.size()),
                                string_length);
  if (eps) params.eps = *eps;
  params.min_pts = min_pts;
  SwarmPartition part = clustering::cluster(pts, params);
  std::cout << "eps=" << params.eps << " min_pts=" << params.min_pts << '\n';
  for (size_t k = 0; k < part.clusters.size(); ++k) {
    std::cout << "cluster " << k << " center=(" << part.centers[k].x() << ',' << part.centers[k].y()
              << ") radius=" << part.radii[k] << " members=";
    for (size_t i = 0; i < part.clusters[k].size(); ++i) std::cout << (i ? "," : "") << part.clusters[k][i];
    std::cout << '\n';
  }
  std::cout << "unclustered=";
  for (size_t i = 0; i < part.unclustered.size(); ++i) std::cout << (i ? "," : "") << part.unclustered[i];
  std::cout << '\n';
  return 0;
}

int cmd_assign(const std::string& path, const std::string& solver_name, int min_clusters, double w) {
  auto solver = parse_split_solver(solver_name);
  if (!solver) throw CLI::ValidationError("--solver", "unknown solver '" + solver_name + "'");
  SplitSnapshot snap = scenario_io::parse_snapshot(read_file(path));
  SplitAssignment a = assignment::solve_split(snap, *solver, min_clusters, w);
  std::string why = assignment::check_split_assignment(snap, a.task);
  std::cout << "solver=" << to_string(*solver) << " cost=" << std::setprecision(10) << a.cost
            << " nodes=" << a.nodes << " seconds=" << a.solve_seconds << '\n';
  std::cout << "position,defender,task\n";
  const int k = snap.num_clusters();
  for (size_t l = 0; l < a.task.size(); ++l) {
    int id = snap.defender_ids.empty() ? static_cast<int>(l) : snap.defender_ids[l];
    int t = a.task[l];
    std::string label = t < k ? "C" + std::to_string(t) : "U" + std::to_string(t - k);
    std::cout << l << ',' << id << ',' << label << '\n';
  }
  if (!why.empty()) {
    std::cerr << "assignment check failed: " << why << '\n';
    return 1;
  }
  return 0;
}

int cmd_plot(const std::string& trace_path, const std::string& out_path, const std::string& config_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open " + trace_path);
  auto records = plot::read_trace_csv(in);
  std::optional<WorldGeometry> world;
  if (!config_path.empty()) world = scenario_io::load_config(config_path).world;
  auto out = open_out(out_path);
  out << plot::trajectory_svg(records, world);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarm defense assignment and simulation toolkit"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::string config, out_dir = "out";
  auto* simulate = app.add_subcommand("simulate", "run a scenario config, write trace.csv and events.csv");
  simulate->add_option("config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "output directory");

  BenchOptions bopts;
  std::string grid = "12,20,30:0,2,4,8:1,2,3", solvers = "miqcqp,rs_miqcqp,heuristic";
  std::string bench_out = "bench_out";
  auto* bench = app.add_subcommand("bench", "benchmark the split solvers on random instances");
  bench->add_option("--grid", grid, "NA_LIST:NUC_LIST:NAC_LIST");
  bench->add_option("--reps", bopts.reps, "instances per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bopts.seed0, "first seed");
  bench->add_option("--solvers", solvers, "comma list of miqcqp,rs_miqcqp,heuristic");
  bench->add_option("--time-limit", bopts.time_limit_s, "seconds per exact solve")->check(CLI::PositiveNumber);
  bench->add_option("--workers", bopts.workers, "worker threads")->check(CLI::Range(1, 256));
  bench->add_option("--min-clusters", bopts.min_clusters, "heuristic leaf size")->check(CLI::Range(3, 1000));
  bench->add_flag("--unsafe-large", bopts.unsafe_large, "allow exact solves above the size guard");
  bench->add_option("--out", bench_out, "output directory");

  std::string points;
  std::optional<double> eps;
  int min_pts = 3, defenders = 0;
  double string_length = 10.0;
  auto* cluster = app.add_subcommand("cluster", "DBSCAN partition of an x,y point CSV");
  cluster->add_option("points", points, "CSV of x,y")->required()->check(CLI::ExistingFile);
  cluster->add_option("--eps", eps, "neighbourhood radius (default derived from team size)")
      ->check(CLI::PositiveNumber);
  cluster->add_option("--min-pts", min_pts, "core point threshold")->check(CLI::Range(1, 1000));
  cluster->add_option("--defenders", defenders, "defender count for the derived eps")->check(CLI::Range(3, 100000));
  cluster->add_option("--string-length", string_length, "string barrier length")->check(CLI::PositiveNumber);

  std::string snapshot, solver = "rs_miqcqp";
  int assign_min_clusters = 3;
  double w = 0.5;
  auto* assign = app.add_subcommand("assign", "solve one split snapshot");
  assign->add_option("snapshot", snapshot, "split snapshot JSON")->required()->check(CLI::ExistingFile);
  assign->add_option("--solver", solver, "miqcqp|rs_miqcqp|heuristic");
  assign->add_option("--min-clusters", assign_min_clusters, "heuristic leaf size")->check(CLI::Range(3, 1000));
  assign->add_option("--w", w, "CADAA collision weight")->check(CLI::Range(0.0, 1.0));

  std::string trace_path, svg_path = "trace.svg", plot_config;
  auto* plot = app.add_subcommand("plot", "render a trace CSV as SVG");
  plot->add_option("trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", svg_path, "SVG path");
  plot->add_option("--config", plot_config, "scenario JSON for P and safe areas")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*simulate) return cmd_simulate(config, out_dir);
    if (*bench) {
      bopts.grid = bench::parse_grid(grid);
      bopts.solvers = parse_solvers(solvers);
      return cmd_bench(bopts, bench_out);
    }
    if (*cluster) return cmd_cluster(points, eps, min_pts, defenders, string_length);
    if (*assign) return cmd_assign(snapshot, solver, assign_min_clusters, w);
    if (*plot) return cmd_plot(trace_path, svg_path, plot_config);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
