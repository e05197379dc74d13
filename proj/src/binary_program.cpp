#include "swarmdef/binary_program.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace swarmdef::bip {

BinaryProgram::BinaryProgram(int n_vars) : n_(n_vars) {
  if (n_vars < 0) throw std::invalid_argument("BinaryProgram: negative size");
  linear_.assign(n_vars, 0.0);
  meta_.assign(n_vars, VarMeta{});
}

void BinaryProgram::set_linear_cost(int v, double c) { linear_.at(v) = c; }

void BinaryProgram::add_linear_cost(int v, double c) { linear_.at(v) += c; }

void BinaryProgram::add_quadratic_cost(int a, int b, double coef) {
  if (a < 0 || b < 0 || a >= n_ || b >= n_) throw std::out_of_range("add_quadratic_cost: index");
  if (a == b) {
    linear_[a] += coef;
    return;
  }
  if (a > b) std::swap(a, b);
  quad_[{a, b}] += coef;
}

int BinaryProgram::add_constraint(Constraint c) {
  rows_.push_back(std::move(c));
  return static_cast<int>(rows_.size()) - 1;
}

double BinaryProgram::objective(const Bits& x) const {
  double obj = 0.0;
  for (int v = 0; v < n_; ++v) {
    if (x[v]) obj += linear_[v];
  }
  for (const auto& [key, q] : quad_) {
    if (x[key.first] && x[key.second]) obj += q;
  }
  return obj;
}

double BinaryProgram::row_activity(const Constraint& row, const Bits& x) const {
  double act = 0.0;
  for (const auto& t : row.linear) {
    if (x[t.var]) act += t.coef;
  }
  for (const auto& t : row.quad) {
    if (x[t.a] && x[t.b]) act += t.coef;
  }
  return act;
}

bool BinaryProgram::feasible(const Bits& x, double tol) const {
  if (static_cast<int>(x.size()) != n_) return false;
  for (const auto& row : rows_) {
    double act = row_activity(row, x);
    switch (row.sense) {
      case Sense::Eq:
        if (std::abs(act - row.rhs) > tol) return false;
        break;
      case Sense::Ge:
        if (act < row.rhs - tol) return false;
        break;
      case Sense::Le:
        if (act > row.rhs + tol) return false;
        break;
    }
  }
  return true;
}

void BinaryProgram::validate() const {
  auto check_var = [&](int v) {
    if (v < 0 || v >= n_) throw std::invalid_argument("BinaryProgram: variable index out of range");
  };
  for (double c : linear_) {
    if (!std::isfinite(c)) throw std::invalid_argument("BinaryProgram: non-finite linear cost");
  }
  for (const auto& [key, q] : quad_) {
    check_var(key.first);
    check_var(key.second);
    if (!std::isfinite(q)) throw std::invalid_argument("BinaryProgram: non-finite quadratic cost");
  }
  for (const auto& row : rows_) {
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("BinaryProgram: non-finite rhs");
    for (const auto& t : row.linear) {
      check_var(t.var);
      if (!std::isfinite(t.coef)) throw std::invalid_argument("BinaryProgram: non-finite coefficient");
    }
    for (const auto& t : row.quad) {
      check_var(t.a);
      check_var(t.b);
      if (t.a == t.b) throw std::invalid_argument("BinaryProgram: product term needs two variables");
      if (!std::isfinite(t.coef)) throw std::invalid_argument("BinaryProgram: non-finite coefficient");
    }
  }
}

bool lex_less(const Bits& a, const Bits& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

namespace {

struct RowRef {
  int row;
  double coef;
};

struct QuadRowRef {
  int row;
  int other;
  double coef;
};

bool row_ok(Sense sense, double act, double rhs, double tol) {
  switch (sense) {
    case Sense::Eq:
      return std::abs(act - rhs) <= tol;
    case Sense::Ge:
      return act >= rhs - tol;
    case Sense::Le:
      return act <= rhs + tol;
  }
  return false;
}

}  // namespace

Solution brute_force(const BinaryProgram& prog) {
  prog.validate();
  const int n = prog.num_vars();
  if (n > kBruteForceMaxVars) throw std::invalid_argument("brute_force: too many variables");
  auto t0 = std::chrono::steady_clock::now();

  const auto& rows = prog.constraints();
  const int m = static_cast<int>(rows.size());
  std::vector<std::vector<RowRef>> lin_refs(n);
  std::vector<std::vector<QuadRowRef>> quad_refs(n);
  for (int r = 0; r < m; ++r) {
    for (const auto& t : rows[r].linear) lin_refs[t.var].push_back({r, t.coef});
    for (const auto& t : rows[r].quad) {
      quad_refs[t.a].push_back({r, t.b, t.coef});
      quad_refs[t.b].push_back({r, t.a, t.coef});
    }
  }
  std::vector<std::vector<std::pair<int, double>>> obj_adj(n);
  for (const auto& [key, q] : prog.quadratic_cost()) {
    obj_adj[key.first].push_back({key.second, q});
    obj_adj[key.second].push_back({key.first, q});
  }
  const auto& c = prog.linear_cost();

  constexpr double kTol = 1e-9;
  Bits x(n, 0);
  std::vector<double> act(m, 0.0);
  std::vector<char> ok(m);
  int violated = 0;
  for (int r = 0; r < m; ++r) {
    ok[r] = row_ok(rows[r].sense, 0.0, rows[r].rhs, kTol);
    violated += !ok[r];
  }
  double obj = 0.0;

  Solution best;
  best.status = SolveStatus::Infeasible;
  double best_obj = std::numeric_limits<double>::infinity();
  auto consider = [&]() {
    if (violated != 0) return;
    if (best.status == SolveStatus::Optimal &&
        obj > best_obj + 1e-6 * std::max(1.0, std::abs(best_obj))) {
      return;
    }
    double exact = prog.objective(x);
    if (best.status != SolveStatus::Optimal || exact < best_obj ||
        (exact == best_obj && lex_less(x, best.assignment))) {
      best.status = SolveStatus::Optimal;
      best.assignment = x;
      best_obj = exact;
    }
  };

  consider();
  const uint64_t total = uint64_t{1} << n;
  for (uint64_t i = 1; i < total; ++i) {
    const int v = std::countr_zero(i);
    const double s = x[v] ? -1.0 : 1.0;
    x[v] ^= 1;
    obj += s * c[v];
    for (const auto& [u, q] : obj_adj[v]) {
      if (x[u]) obj += s * q;
    }
    auto touch = [&](int r, double delta) {
      act[r] += delta;
      bool now = row_ok(rows[r].sense, act[r], rows[r].rhs, kTol);
      if (now != static_cast<bool>(ok[r])) {
        violated += now ? -1 : 1;
        ok[r] = now;
      }
    };
    for (const auto& ref : lin_refs[v]) touch(ref.row, s * ref.coef);
    for (const auto& ref : quad_refs[v]) {
      if (x[ref.other]) touch(ref.row, s * ref.coef);
    }
    consider();
  }

  best.node_count = static_cast<long>(total);
  best.objective = best.status == SolveStatus::Optimal ? best_obj : 0.0;
  if (best.status != SolveStatus::Optimal) best.assignment.assign(n, 0);
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return best;
}

void write_text(const BinaryProgram& prog, std::ostream& out) {
  out.precision(17);
  out << "vars " << prog.num_vars() << '\n';
  for (int v = 0; v < prog.num_vars(); ++v) {
    if (prog.linear_cost()[v] != 0.0) out << "c " << v << ' ' << prog.linear_cost()[v] << '\n';
  }
  for (const auto& [key, q] : prog.quadratic_cost()) {
    out << "q " << key.first << ' ' << key.second << ' ' << q << '\n';
  }
  for (const auto& row : prog.constraints()) {
    const char* sense = row.sense == Sense::Eq ? "eq" : row.sense == Sense::Ge ? "ge" : "le";
    out << "row " << sense << ' ' << row.rhs << ' ' << (row.name.empty() ? "-" : row.name) << '\n';
    for (const auto& t : row.linear) out << "l " << t.var << ' ' << t.coef << '\n';
    for (const auto& t : row.quad) out << "p " << t.a << ' ' << t.b << ' ' << t.coef << '\n';
  }
  for (int v = 0; v < prog.num_vars(); ++v) {
    const auto& m = prog.meta(v);
    if (m.agent >= 0 || m.task >= 0 || m.kind != '?') {
      out << "meta " << v << ' ' << m.agent << ' ' << m.kind << ' ' << m.task << '\n';
    }
  }
}

BinaryProgram read_text(std::istream& in) {
  std::string line;
  std::optional<BinaryProgram> prog;
  std::vector<Constraint> rows;
  auto fail = [](const std::string& l) {
    throw std::invalid_argument("read_text: malformed line '" + l + "'");
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "vars") {
      int n;
      if (!(ss >> n)) fail(line);
      prog.emplace(n);
      continue;
    }
    if (!prog) fail(line);
    if (tag == "c") {
      int v;
      double c;
      if (!(ss >> v >> c)) fail(line);
      prog->set_linear_cost(v, c);
    } else if (tag == "q") {
      int a, b;
      double q;
      if (!(ss >> a >> b >> q)) fail(line);
      prog->add_quadratic_cost(a, b, q);
    } else if (tag == "row") {
      std::string sense, name;
      double rhs;
      if (!(ss >> sense >> rhs >> name)) fail(line);
      Constraint c;
      c.sense = sense == "eq" ? Sense::Eq : sense == "ge" ? Sense::Ge : Sense::Le;
      if (sense != "eq" && sense != "ge" && sense != "le") fail(line);
      c.rhs = rhs;
      c.name = name == "-" ? "" : name;
      rows.push_back(std::move(c));
    } else if (tag == "l") {
      Term t;
      if (rows.empty() || !(ss >> t.var >> t.coef)) fail(line);
      rows.back().linear.push_back(t);
    } else if (tag == "p") {
      QuadTerm t;
      if (rows.empty() || !(ss >> t.a >> t.b >> t.coef)) fail(line);
      rows.back().quad.push_back(t);
    } else if (tag == "meta") {
      int v;
      VarMeta m;
      if (!(ss >> v >> m.agent >> m.kind >> m.task)) fail(line);
      prog->meta(v) = m;
    } else {
      fail(line);
    }
  }
  if (!prog) throw std::invalid_argument("read_text: missing 'vars' line");
  for (auto& r : rows) prog->add_constraint(std::move(r));
  prog->validate();
  return std::move(*prog);
}

}  // namespace swarmdef::bip
