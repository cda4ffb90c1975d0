#pragma once
// Problem container shared by the LP and MILP solvers, plus a plain-text
// dump for offline debugging. Minimization only; rows are sparse; variable
// bounds may be infinite on either side.

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace tep {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, GreaterEqual, Equal };

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  Relation rel = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;  // optional, for dumps and diagnostics
};

struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // minimize c'x
  std::vector<double> lower;      // -kInf allowed
  std::vector<double> upper;      // +kInf allowed
  std::vector<LpRow> rows;
  std::vector<std::uint8_t> is_binary;  // MILP only; implies bounds within [0,1]
  std::vector<std::string> var_names;   // optional

  int add_variable(double lo, double hi, double cost, std::string name = {}) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    is_binary.push_back(0);
    var_names.push_back(std::move(name));
    return num_vars++;
  }
  int add_binary(double cost, std::string name = {}) {
    const int v = add_variable(0.0, 1.0, cost, std::move(name));
    is_binary[static_cast<size_t>(v)] = 1;
    return v;
  }
  int add_row(LpRow row) {
    rows.push_back(std::move(row));
    return static_cast<int>(rows.size()) - 1;
  }
  int num_rows() const { return static_cast<int>(rows.size()); }

  bool well_formed() const {
    if (static_cast<int>(objective.size()) != num_vars) return false;
    if (static_cast<int>(lower.size()) != num_vars) return false;
    if (static_cast<int>(upper.size()) != num_vars) return false;
    for (int j = 0; j < num_vars; ++j) {
      if (lower[static_cast<size_t>(j)] > upper[static_cast<size_t>(j)]) return false;
      if (is_binary[static_cast<size_t>(j)] &&
          (lower[static_cast<size_t>(j)] < 0 || upper[static_cast<size_t>(j)] > 1))
        return false;
    }
    for (const LpRow& r : rows)
      for (const auto& [v, c] : r.coeffs) {
        if (v < 0 || v >= num_vars) return false;
        if (!std::isfinite(c)) return false;
      }
    return true;
  }

  std::string var_name(int j) const {
    if (!var_names[static_cast<size_t>(j)].empty()) return var_names[static_cast<size_t>(j)];
    return "x" + std::to_string(j + 1);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

// Row duals follow the minimization convention: <= rows carry y <= 0,
// >= rows carry y >= 0, equalities are free; dV/d(rhs) = y either way.
struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;          // per row
  std::vector<double> reduced_costs;  // per variable
  int iterations = 0;
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, NodeLimit, NumericalFailure };

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::NodeLimit: return "node-limit";
    case MilpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct MilpSolution {
  MilpStatus status = MilpStatus::NumericalFailure;
  double objective = 0.0;   // incumbent
  double best_bound = 0.0;  // global lower bound at termination
  std::vector<double> x;
  int nodes = 0;
  int lp_iterations = 0;
  double gap() const {
    if (!std::isfinite(objective)) return kInf;
    return std::abs(objective - best_bound) / std::max(1.0, std::abs(objective));
  }
};

// Fixed-keyword text dump, one constraint per line.
inline void write_lp_format(const LinearProgram& lp, std::ostream& os) {
  auto term = [&](double c, int v, bool lead) {
    std::string s;
    if (c < 0) s += lead ? "- " : "- ";
    else if (!lead) s += "+ ";
    const double a = std::abs(c);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", a);
    s += buf;
    s += " ";
    s += lp.var_name(v);
    return s;
  };

  os << "MINIMIZE\n ";
  bool lead = true;
  for (int j = 0; j < lp.num_vars; ++j) {
    const double c = lp.objective[static_cast<size_t>(j)];
    if (c == 0) continue;
    os << (lead ? "" : " ") << term(c, j, lead);
    lead = false;
  }
  if (lead) os << "0";
  os << "\nSUBJECT TO\n";
  char buf[64];
  for (size_t i = 0; i < lp.rows.size(); ++i) {
    const LpRow& r = lp.rows[i];
    os << " " << (r.name.empty() ? "c" + std::to_string(i + 1) : r.name) << ": ";
    bool rl = true;
    for (const auto& [v, c] : r.coeffs) {
      if (c == 0) continue;
      os << (rl ? "" : " ") << term(c, v, rl);
      rl = false;
    }
    if (rl) os << "0";
    const char* rel = r.rel == Relation::LessEqual ? "<=" : r.rel == Relation::GreaterEqual ? ">=" : "=";
    std::snprintf(buf, sizeof buf, "%.12g", r.rhs);
    os << " " << rel << " " << buf << "\n";
  }
  os << "BOUNDS\n";
  for (int j = 0; j < lp.num_vars; ++j) {
    const double lo = lp.lower[static_cast<size_t>(j)];
    const double hi = lp.upper[static_cast<size_t>(j)];
    if (lp.is_binary[static_cast<size_t>(j)] && lo == 0 && hi == 1) continue;
    os << " ";
    if (lo == -kInf && hi == kInf) {
      os << lp.var_name(j) << " free\n";
      continue;
    }
    if (lo != -kInf) {
      std::snprintf(buf, sizeof buf, "%.12g", lo);
      os << buf << " <= ";
    }
    os << lp.var_name(j);
    if (hi != kInf) {
      std::snprintf(buf, sizeof buf, "%.12g", hi);
      os << " <= " << buf;
    }
    os << "\n";
  }
  bool any_bin = false;
  for (int j = 0; j < lp.num_vars; ++j) {
    if (!lp.is_binary[static_cast<size_t>(j)]) continue;
    if (!any_bin) os << "BINARY\n ";
    else os << " ";
    os << lp.var_name(j);
    any_bin = true;
  }
  if (any_bin) os << "\n";
  os << "END\n";
}

}  // namespace tep
