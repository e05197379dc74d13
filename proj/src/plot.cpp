#include "swarmdef/plot.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace swarmdef::plot {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 800.0;
constexpr double kMargin = 40.0;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Frame {
  double x0 = 0, y0 = 0, scale = 1;
  Vec2 map(const Vec2& p) const {
    return Vec2(kMargin + (p.x() - x0) * scale, kHeight - kMargin - (p.y() - y0) * scale);
  }
};

Frame fit(double xmin, double xmax, double ymin, double ymax) {
  Frame f;
  double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  f.scale = (kWidth - 2 * kMargin) / span;
  f.x0 = xmin;
  f.y0 = ymin;
  return f;
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,agent_id,class,x,y,vx,vy,phase,team") {
    throw std::invalid_argument("trace csv: unexpected header");
  }
  std::vector<TraceRecord> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 9) throw std::invalid_argument("trace csv: row " + std::to_string(row) + " malformed");
    TraceRecord r;
    try {
      r.t = std::stod(f[0]);
      r.agent_id = std::stoi(f[1]);
      r.position = Vec2(std::stod(f[3]), std::stod(f[4]));
      r.velocity = Vec2(std::stod(f[5]), std::stod(f[6]));
      r.team = std::stoi(f[8]);
    } catch (const std::exception&) {
      throw std::invalid_argument("trace csv: row " + std::to_string(row) + " malformed");
    }
    if (f[2] == "attacker") {
      r.cls = AgentClass::Attacker;
    } else if (f[2] == "defender") {
      r.cls = AgentClass::Defender;
    } else {
      throw std::invalid_argument("trace csv: unknown class on row " + std::to_string(row));
    }
    r.phase = f[7];
    out.push_back(std::move(r));
  }
  return out;
}

std::string trajectory_svg(const std::vector<TraceRecord>& records,
                           const std::optional<WorldGeometry>& world) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto grow = [&](const Vec2& p, double r) {
    xmin = std::min(xmin, p.x() - r);
    xmax = std::max(xmax, p.x() + r);
    ymin = std::min(ymin, p.y() - r);
    ymax = std::max(ymax, p.y() + r);
  };
  for (const auto& r : records) grow(r.position, 0.0);
  if (world) {
    grow(world->protected_center, world->protected_radius);
    for (const auto& s : world->safe_areas) grow(s.center, s.radius);
  }
  if (xmin > xmax) xmin = ymin = 0, xmax = ymax = 1;
  Frame f = fit(xmin, xmax, ymin, ymax);

  std::map<std::pair<int, int>, std::vector<Vec2>> paths;
  for (const auto& r : records) {
    paths[{r.cls == AgentClass::Attacker ? 0 : 1, r.agent_id}].push_back(f.map(r.position));
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (world) {
    Vec2 c = f.map(world->protected_center);
    os << "<circle cx=\"" << c.x() << "\" cy=\"" << c.y() << "\" r=\"" << world->protected_radius * f.scale
       << "\" fill=\"#f4d4d4\" stroke=\"#a33\"/>\n";
    for (const auto& s : world->safe_areas) {
      Vec2 p = f.map(s.center);
      os << "<circle cx=\"" << p.x() << "\" cy=\"" << p.y() << "\" r=\"" << s.radius * f.scale
         << "\" fill=\"#d4f4d4\" stroke=\"#3a3\"/>\n";
    }
  }
  for (const auto& [key, pts] : paths) {
    const char* color = key.first == 0 ? "#c0392b" : "#2e5fa8";
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (const auto& p : pts) os << p.x() << ',' << p.y() << ' ';
    os << "\"/>\n";
    const Vec2& end = pts.back();
    os << "<circle cx=\"" << end.x() << "\" cy=\"" << end.y() << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string bench_svg(const std::vector<BenchSummary>& summary) {
  std::vector<std::tuple<int, int, int>> cells;
  for (const auto& s : summary) {
    auto key = std::make_tuple(s.cell.n_attackers, s.cell.n_clusters, s.cell.n_unclustered);
    if (std::find(cells.begin(), cells.end(), key) == cells.end()) cells.push_back(key);
  }
  double lo = 1e300, hi = -1e300;
  for (const auto& s : summary) {
    double v = std::log10(std::max(s.median_wall, 1e-7));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo > hi) lo = 0, hi = 1;
  if (hi - lo < 1e-9) hi = lo + 1;
  const double plot_w = kWidth - 2 * kMargin, plot_h = kHeight / 2 - 2 * kMargin;
  auto px = [&](size_t i) { return kMargin + plot_w * (cells.size() > 1 ? double(i) / (cells.size() - 1) : 0.5); };
  auto py = [&](double wall) {
    double v = std::log10(std::max(wall, 1e-7));
    return kMargin + plot_h * (1.0 - (v - lo) / (hi - lo));
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight / 2
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kMargin << "\" y=\"20\" font-size=\"12\">median solve time, log10 s in ["
     << lo << ", " << hi << "]</text>\n";
  const std::map<SplitSolver, const char*> colors{{SplitSolver::Miqcqp, "#c0392b"},
                                                  {SplitSolver::RsMiqcqp, "#e67e22"},
                                                  {SplitSolver::Heuristic, "#2e5fa8"}};
  for (const auto& [solver, color] : colors) {
    std::ostringstream pts;
    bool any = false;
    for (size_t i = 0; i < cells.size(); ++i) {
      for (const auto& s : summary) {
        if (s.solver != solver) continue;
        if (std::make_tuple(s.cell.n_attackers, s.cell.n_clusters, s.cell.n_unclustered) != cells[i]) continue;
        pts << px(i) << ',' << py(s.median_wall) << ' ';
        any = true;
      }
    }
    if (!any) continue;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str()
       << "\"/>\n";
    os << "<text x=\"" << kWidth - 150 << "\" y=\"" << 20 + 15 * static_cast<int>(solver) << "\" fill=\""
       << color << "\" font-size=\"12\">" << to_string(solver) << "</text>\n";
  }
  for (size_t i = 0; i < cells.size(); ++i) {
    auto [na, nac, nuc] = cells[i];
    os << "<text x=\"" << px(i) << "\" y=\"" << kHeight / 2 - 10 << "\" font-size=\"8\" "
       << "text-anchor=\"middle\">" << na << '/' << nac << '/' << nuc << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace swarmdef::plot
