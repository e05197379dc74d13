#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swarmdef::bip {

// Cost used for infeasible engagements (defender outside its winning region).
inline constexpr double kLargeCost = 1e6;

enum class Sense { Eq, Ge, Le };

struct Term {
  int var = 0;
  double coef = 0.0;
};

// coef · x_a · x_b with a != b.
struct QuadTerm {
  int a = 0;
  int b = 0;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> linear;
  std::vector<QuadTerm> quad;
  Sense sense = Sense::Eq;
  double rhs = 0.0;
  std::string name;
};

// What a decision variable stands for: agent `agent` doing task `task` of
// kind `kind` ('h' herd, 'i' intercept, 's' slot, '?' unspecified).
struct VarMeta {
  int agent = -1;
  int task = -1;
  char kind = '?';
};

using Bits = std::vector<uint8_t>;

class BinaryProgram {
 public:
  explicit BinaryProgram(int n_vars = 0);

  int num_vars() const { return n_; }

  void set_linear_cost(int v, double c);
  void add_linear_cost(int v, double c);
  // Adds coef · x_a · x_b to the objective. a == b folds into the linear cost.
  void add_quadratic_cost(int a, int b, double coef);
  int add_constraint(Constraint c);

  VarMeta& meta(int v) { return meta_.at(v); }
  const VarMeta& meta(int v) const { return meta_.at(v); }

  const std::vector<double>& linear_cost() const { return linear_; }
  // Upper-triangular (a < b) entries, ascending.
  const std::map<std::pair<int, int>, double>& quadratic_cost() const { return quad_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  double objective(const Bits& x) const;
  double row_activity(const Constraint& row, const Bits& x) const;
  bool feasible(const Bits& x, double tol = 1e-9) const;

  // Throws std::invalid_argument on out-of-range indices or non-finite data.
  void validate() const;

 private:
  int n_;
  std::vector<double> linear_;
  std::map<std::pair<int, int>, double> quad_;
  std::vector<Constraint> rows_;
  std::vector<VarMeta> meta_;
};

enum class SolveStatus { Optimal, Infeasible };

struct Solution {
  Bits assignment;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Infeasible;
  long node_count = 0;
  double wall_time = 0.0;
};

struct SolveBudget {
  std::optional<long> max_nodes;
  std::optional<double> max_seconds;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Solution solve(const BinaryProgram& prog, const SolveBudget& budget = {});

inline constexpr int kBruteForceMaxVars = 24;
Solution brute_force(const BinaryProgram& prog);

// True if a is lexicographically smaller than b (x_0 most significant).
bool lex_less(const Bits& a, const Bits& b);

// Plain-text dump, one line per term:
//   vars <n>
//   c <var> <coef>
//   q <a> <b> <coef>
//   row <eq|ge|le> <rhs> <name>
//   l <var> <coef>          (linear term of the preceding row)
//   p <a> <b> <coef>        (product term of the preceding row)
//   meta <var> <agent> <kind> <task>
void write_text(const BinaryProgram& prog, std::ostream& out);
BinaryProgram read_text(std::istream& in);

}  // namespace swarmdef::bip
