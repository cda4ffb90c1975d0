#pragma once
// Branch and bound for mixed binary programs on top of the bounded simplex.
// Best-bound node selection with lowest-id tie break, most-fractional
// branching with lowest-index tie break, children fix one binary to 0 or 1
// through bound overrides so the LP itself is never copied. Deterministic
// for a fixed input.

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "tep/linear_program.hpp"
#include "tep/simplex.hpp"

namespace tep {

struct MilpOptions {
  double gap_tol = 0.0;       // stop when (incumbent - bound)/max(1,|incumbent|) <= this
  double integer_tol = 1e-6;  // |x - round(x)| below this counts as integral
  int node_limit = 200000;
  SimplexOptions lp;
};

class BranchAndBound {
 public:
  explicit BranchAndBound(MilpOptions opt = {}) : opt_(opt) {}

  MilpSolution solve(const LinearProgram& lp) {
    lp_ = &lp;
    binaries_.clear();
    for (int j = 0; j < lp.num_vars; ++j)
      if (lp.is_binary[static_cast<size_t>(j)]) binaries_.push_back(j);

    MilpSolution out;
    nodes_.clear();
    active_.clear();
    incumbent_obj_ = kInf;
    incumbent_x_.clear();
    evaluated_ = 0;
    lp_iterations_ = 0;

    const Eval root = evaluate(/*parent=*/-1, /*fix_var=*/-1, /*fix_val=*/0);
    if (root.lp_status == LpStatus::Infeasible) {
      out.status = MilpStatus::Infeasible;
      out.nodes = evaluated_;
      out.lp_iterations = static_cast<int>(lp_iterations_);
      return out;
    }
    if (root.lp_status == LpStatus::Unbounded) {
      out.status = MilpStatus::Unbounded;
      out.nodes = evaluated_;
      out.lp_iterations = static_cast<int>(lp_iterations_);
      return out;
    }
    if (root.lp_status != LpStatus::Optimal) {
      out.status = MilpStatus::NumericalFailure;
      out.nodes = evaluated_;
      out.lp_iterations = static_cast<int>(lp_iterations_);
      return out;
    }

    double bound_on_exit = incumbent_obj_;
    bool limit_hit = false;
    bool failed = false;

    while (!active_.empty()) {
      const auto it = active_.begin();
      const double bound = it->first;
      const int id = it->second;
      active_.erase(it);

      if (bound >= incumbent_obj_ - 1e-9) continue;  // cannot improve
      if (incumbent_obj_ < kInf) {
        const double gap =
            (incumbent_obj_ - bound) / std::max(1.0, std::abs(incumbent_obj_));
        if (gap <= opt_.gap_tol) {
          bound_on_exit = bound;
          limit_hit = true;  // early but proven within gap
          break;
        }
      }
      if (evaluated_ >= opt_.node_limit) {
        bound_on_exit = bound;
        limit_hit = true;
        failed = true;  // marks NodeLimit rather than gap stop
        break;
      }

      const int var = nodes_[static_cast<size_t>(id)].branch_var;
      for (int val = 0; val <= 1; ++val) {
        const Eval child = evaluate(id, var, val);
        if (child.lp_status == LpStatus::Infeasible) continue;
        if (child.lp_status != LpStatus::Optimal) {
          out.status = MilpStatus::NumericalFailure;
          fill(out, std::min(bound, lowest_active_bound()));
          return out;
        }
      }
    }

    if (!limit_hit) {
      // Exhausted: the incumbent (if any) is proven optimal.
      if (incumbent_x_.empty()) {
        out.status = MilpStatus::Infeasible;
        out.nodes = evaluated_;
        out.lp_iterations = static_cast<int>(lp_iterations_);
        return out;
      }
      out.status = MilpStatus::Optimal;
      fill(out, incumbent_obj_);
      return out;
    }
    if (failed && incumbent_x_.empty()) {
      out.status = MilpStatus::NodeLimit;
      fill(out, bound_on_exit);
      return out;
    }
    out.status = failed ? MilpStatus::NodeLimit : MilpStatus::Optimal;
    fill(out, bound_on_exit);
    return out;
  }

 private:
  struct Node {
    int parent = -1;
    int fix_var = -1;
    int fix_val = 0;
    int branch_var = -1;
    double bound = 0;
  };
  struct Eval {
    LpStatus lp_status = LpStatus::NumericalFailure;
    int id = -1;
  };

  MilpOptions opt_;
  const LinearProgram* lp_ = nullptr;
  std::vector<int> binaries_;
  std::vector<Node> nodes_;
  std::set<std::pair<double, int>> active_;  // (bound, node id)
  double incumbent_obj_ = kInf;
  std::vector<double> incumbent_x_;
  int evaluated_ = 0;
  long long lp_iterations_ = 0;

  double lowest_active_bound() const {
    double b = incumbent_obj_;
    if (!active_.empty()) b = std::min(b, active_.begin()->first);
    return b;
  }

  void fill(MilpSolution& out, double bound) const {
    out.objective = incumbent_obj_;
    out.best_bound = bound;
    out.x = incumbent_x_;
    out.nodes = evaluated_;
    out.lp_iterations = static_cast<int>(lp_iterations_);
  }

  // Solves the LP at a prospective node; on fractional optimum below the
  // incumbent, records it as active. Returns the LP status and node id.
  Eval evaluate(int parent, int fix_var, int fix_val) {
    std::vector<double> lo = lp_->lower;
    std::vector<double> hi = lp_->upper;
    if (fix_var >= 0) {
      lo[static_cast<size_t>(fix_var)] = fix_val;
      hi[static_cast<size_t>(fix_var)] = fix_val;
    }
    for (int p = parent; p >= 0; p = nodes_[static_cast<size_t>(p)].parent) {
      const Node& a = nodes_[static_cast<size_t>(p)];
      if (a.fix_var >= 0) {
        lo[static_cast<size_t>(a.fix_var)] = a.fix_val;
        hi[static_cast<size_t>(a.fix_var)] = a.fix_val;
      }
    }

    SimplexSolver solver(opt_.lp);
    const LpSolution rel = solver.solve(*lp_, &lo, &hi);
    ++evaluated_;
    lp_iterations_ += rel.iterations;

    Eval ev;
    ev.lp_status = rel.status;
    if (rel.status != LpStatus::Optimal) return ev;

    // Most-fractional binary, lowest index on ties.
    int branch = -1;
    double best_frac = opt_.integer_tol;
    for (int j : binaries_) {
      const double v = rel.x[static_cast<size_t>(j)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-9) {
        best_frac = frac;
        branch = j;
      }
    }

    if (branch < 0) {
      if (rel.objective < incumbent_obj_ - 1e-12) {
        incumbent_obj_ = rel.objective;
        incumbent_x_ = rel.x;
        for (int j : binaries_)
          incumbent_x_[static_cast<size_t>(j)] =
              std::round(incumbent_x_[static_cast<size_t>(j)]);
        // Newly proven incumbent retires dominated open nodes.
        for (auto it = active_.begin(); it != active_.end();) {
          if (it->first >= incumbent_obj_ - 1e-9) it = active_.erase(it);
          else ++it;
        }
      }
      return ev;
    }

    if (rel.objective >= incumbent_obj_ - 1e-9) return ev;  // pruned by bound

    Node node;
    node.parent = parent;
    node.fix_var = fix_var;
    node.fix_val = fix_val;
    node.branch_var = branch;
    node.bound = rel.objective;
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    active_.emplace(node.bound, id);
    ev.id = id;
    return ev;
  }
};

inline MilpSolution solve_milp(const LinearProgram& lp, MilpOptions opt = {}) {
  return BranchAndBound(opt).solve(lp);
}

}  // namespace tep
