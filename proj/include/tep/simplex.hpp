#pragma once
// Bounded-variable primal simplex over the slack-equality form
//   min c'x  s.t.  A x + s = b,  lo <= (x, s) <= hi
// where slack bounds encode the row relation (<=: s in [0,inf),
// >=: s in (-inf,0], =: s fixed at 0). Phase 1 minimizes the total bound
// violation of the basic variables (composite objective, first-breakpoint
// ratio test); phase 2 is the usual bounded ratio test with bound flips.
//
// The basis inverse is kept explicitly and updated rank-1 per pivot, with
// periodic refactorization through Eigen's LU. Deterministic by
// construction: Dantzig pricing with lowest-index ties, switching to
// Bland's rule after a stall, all loops in fixed index order.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tep/linear_program.hpp"

namespace tep {

struct SimplexOptions {
  double feas_tol = 1e-7;      // bound violation tolerance
  double opt_tol = 1e-7;       // reduced-cost tolerance
  double pivot_tol = 1e-9;     // smallest acceptable pivot magnitude
  int max_iterations = 0;      // 0 = automatic from problem size
  int refactor_every = 100;    // pivots between refactorizations
  int stall_limit = 256;       // non-improving pivots before Bland's rule
};

class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions opt = {}) : opt_(opt) {}

  LpSolution solve(const LinearProgram& lp) { return solve(lp, nullptr, nullptr); }

  // Overrides replace the variable bounds of lp without copying it; either
  // pointer may be null. Sized num_vars when present.
  LpSolution solve(const LinearProgram& lp, const std::vector<double>* lo_override,
                   const std::vector<double>* hi_override) {
    build(lp, lo_override, hi_override);
    LpSolution sol;
    if (m_ == 0) return solve_unconstrained(lp);

    if (!run_phase(/*phase1=*/true, sol)) return sol;
    refactorize();
    if (max_violation() > 10 * opt_.feas_tol) {
      sol.status = LpStatus::Infeasible;
      finalize(lp, sol);
      return sol;
    }
    if (!run_phase(/*phase1=*/false, sol)) return sol;
    sol.status = LpStatus::Optimal;
    finalize(lp, sol);
    return sol;
  }

 private:
  SimplexOptions opt_;

  int n_ = 0;  // structural variables
  int m_ = 0;  // rows
  int total_ = 0;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> rhs_;
  // CSC columns for structurals; slack column i is implicit (+1 in row i).
  std::vector<std::vector<std::pair<int, double>>> cols_;

  enum class NonBasic : std::uint8_t { AtLower, AtUpper, FreeZero };
  std::vector<int> basis_;       // variable occupying each row position
  std::vector<int> position_;    // variable -> row position, -1 when nonbasic
  std::vector<NonBasic> state_;  // meaningful for nonbasic variables
  std::vector<double> value_;
  Eigen::MatrixXd binv_;
  int pivots_since_refactor_ = 0;
  int iterations_ = 0;
  bool bland_ = false;
  int stall_ = 0;

  void build(const LinearProgram& lp, const std::vector<double>* lo_override,
             const std::vector<double>* hi_override) {
    n_ = lp.num_vars;
    m_ = lp.num_rows();
    total_ = n_ + m_;
    lo_.assign(static_cast<size_t>(total_), 0.0);
    hi_.assign(static_cast<size_t>(total_), 0.0);
    cost_.assign(static_cast<size_t>(total_), 0.0);
    rhs_.assign(static_cast<size_t>(m_), 0.0);
    cols_.assign(static_cast<size_t>(n_), {});

    const std::vector<double>& lo_src = lo_override ? *lo_override : lp.lower;
    const std::vector<double>& hi_src = hi_override ? *hi_override : lp.upper;
    for (int j = 0; j < n_; ++j) {
      lo_[static_cast<size_t>(j)] = lo_src[static_cast<size_t>(j)];
      hi_[static_cast<size_t>(j)] = hi_src[static_cast<size_t>(j)];
      cost_[static_cast<size_t>(j)] = lp.objective[static_cast<size_t>(j)];
    }
    // Aggregate duplicate (row, var) entries so pivoting sees one coefficient.
    std::vector<double> dense(static_cast<size_t>(n_), 0.0);
    std::vector<int> touched;
    for (int i = 0; i < m_; ++i) {
      const LpRow& r = lp.rows[static_cast<size_t>(i)];
      rhs_[static_cast<size_t>(i)] = r.rhs;
      touched.clear();
      for (const auto& [v, c] : r.coeffs) {
        if (dense[static_cast<size_t>(v)] == 0.0 && c != 0.0) touched.push_back(v);
        dense[static_cast<size_t>(v)] += c;
      }
      std::sort(touched.begin(), touched.end());
      for (int v : touched) {
        if (dense[static_cast<size_t>(v)] != 0.0)
          cols_[static_cast<size_t>(v)].emplace_back(i, dense[static_cast<size_t>(v)]);
        dense[static_cast<size_t>(v)] = 0.0;
      }
      const int sj = n_ + i;
      switch (r.rel) {
        case Relation::LessEqual:
          lo_[static_cast<size_t>(sj)] = 0.0;
          hi_[static_cast<size_t>(sj)] = kInf;
          break;
        case Relation::GreaterEqual:
          lo_[static_cast<size_t>(sj)] = -kInf;
          hi_[static_cast<size_t>(sj)] = 0.0;
          break;
        case Relation::Equal:
          lo_[static_cast<size_t>(sj)] = 0.0;
          hi_[static_cast<size_t>(sj)] = 0.0;
          break;
      }
    }

    basis_.resize(static_cast<size_t>(m_));
    position_.assign(static_cast<size_t>(total_), -1);
    state_.assign(static_cast<size_t>(total_), NonBasic::AtLower);
    value_.assign(static_cast<size_t>(total_), 0.0);

    for (int j = 0; j < total_; ++j) {
      const double lo = lo_[static_cast<size_t>(j)], hi = hi_[static_cast<size_t>(j)];
      if (lo != -kInf) {
        state_[static_cast<size_t>(j)] = NonBasic::AtLower;
        value_[static_cast<size_t>(j)] = lo;
      } else if (hi != kInf) {
        state_[static_cast<size_t>(j)] = NonBasic::AtUpper;
        value_[static_cast<size_t>(j)] = hi;
      } else {
        state_[static_cast<size_t>(j)] = NonBasic::FreeZero;
        value_[static_cast<size_t>(j)] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      basis_[static_cast<size_t>(i)] = n_ + i;
      position_[static_cast<size_t>(n_ + i)] = i;
    }
    binv_ = Eigen::MatrixXd::Identity(m_, m_);
    recompute_basic_values();
    pivots_since_refactor_ = 0;
    iterations_ = 0;
    bland_ = false;
    stall_ = 0;
    if (opt_.max_iterations <= 0) opt_.max_iterations = 10000 + 50 * (m_ + n_);
  }

  // --- column access ---------------------------------------------------------

  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_) {
      for (const auto& [row, coef] : cols_[static_cast<size_t>(j)]) f(row, coef);
    } else {
      f(j - n_, 1.0);
    }
  }

  Eigen::VectorXd ftran(int j) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for_col(j, [&](int row, double coef) { w += coef * binv_.col(row); });
    return w;
  }

  double dot_col(const Eigen::VectorXd& y, int j) const {
    double r = 0;
    for_col(j, [&](int row, double coef) { r += y[row] * coef; });
    return r;
  }

  // --- state maintenance ------------------------------------------------------

  void recompute_basic_values() {
    Eigen::VectorXd rhs_eff(m_);
    for (int i = 0; i < m_; ++i) rhs_eff[i] = rhs_[static_cast<size_t>(i)];
    for (int j = 0; j < total_; ++j) {
      if (position_[static_cast<size_t>(j)] >= 0) continue;
      const double v = value_[static_cast<size_t>(j)];
      if (v == 0.0) continue;
      for_col(j, [&](int row, double coef) { rhs_eff[row] -= coef * v; });
    }
    Eigen::VectorXd xb = binv_ * rhs_eff;
    for (int i = 0; i < m_; ++i)
      value_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = xb[i];
  }

  bool refactorize() {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) {
      for_col(basis_[static_cast<size_t>(i)],
              [&](int row, double coef) { b(row, i) = coef; });
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) return false;
    binv_ = lu.inverse();
    if (!binv_.allFinite()) return false;
    pivots_since_refactor_ = 0;
    recompute_basic_values();
    return true;
  }

  double max_violation() const {
    double worst = 0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<size_t>(i)];
      const double v = value_[static_cast<size_t>(j)];
      worst = std::max(worst, v - hi_[static_cast<size_t>(j)]);
      worst = std::max(worst, lo_[static_cast<size_t>(j)] - v);
    }
    return worst;
  }

  double total_infeasibility() const {
    double t = 0;
    for (int i = 0; i < m_; ++i) {
      const int j = basis_[static_cast<size_t>(i)];
      const double v = value_[static_cast<size_t>(j)];
      if (v > hi_[static_cast<size_t>(j)]) t += v - hi_[static_cast<size_t>(j)];
      else if (v < lo_[static_cast<size_t>(j)]) t += lo_[static_cast<size_t>(j)] - v;
    }
    return t;
  }

  double current_objective() const {
    double obj = 0;
    for (int j = 0; j < n_; ++j)
      obj += cost_[static_cast<size_t>(j)] * value_[static_cast<size_t>(j)];
    return obj;
  }

  // --- core loop ---------------------------------------------------------------

  // Runs one phase to its local optimum. Returns false when the overall solve
  // must stop (limits or numerics), with sol.status filled in.
  bool run_phase(bool phase1, LpSolution& sol) {
    double best_metric = phase1 ? total_infeasibility() : current_objective();
    stall_ = 0;
    bland_ = false;

    while (true) {
      if (iterations_ >= opt_.max_iterations) {
        sol.status = LpStatus::IterationLimit;
        finalize_partial(sol);
        return false;
      }

      Eigen::VectorXd y;
      if (phase1) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
        bool any = false;
        for (int i = 0; i < m_; ++i) {
          const int j = basis_[static_cast<size_t>(i)];
          const double v = value_[static_cast<size_t>(j)];
          if (v > hi_[static_cast<size_t>(j)] + opt_.feas_tol) {
            d[i] = 1.0;
            any = true;
          } else if (v < lo_[static_cast<size_t>(j)] - opt_.feas_tol) {
            d[i] = -1.0;
            any = true;
          }
        }
        if (!any) return true;  // primal feasible
        y = binv_.transpose() * d;
      } else {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i)
          cb[i] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
        y = binv_.transpose() * cb;
      }

      int enter = -1;
      int dir = 0;
      double best_score = 0;
      for (int j = 0; j < total_; ++j) {
        if (position_[static_cast<size_t>(j)] >= 0) continue;
        if (!(hi_[static_cast<size_t>(j)] - lo_[static_cast<size_t>(j)] > 0))
          continue;  // fixed variables never move
        const double r = phase1
                             ? -dot_col(y, j)
                             : cost_[static_cast<size_t>(j)] - dot_col(y, j);
        int s = 0;
        switch (state_[static_cast<size_t>(j)]) {
          case NonBasic::AtLower:
            if (r < -opt_.opt_tol) s = 1;
            break;
          case NonBasic::AtUpper:
            if (r > opt_.opt_tol) s = -1;
            break;
          case NonBasic::FreeZero:
            if (r < -opt_.opt_tol) s = 1;
            else if (r > opt_.opt_tol) s = -1;
            break;
        }
        if (s == 0) continue;
        if (bland_) {
          enter = j;
          dir = s;
          break;
        }
        if (std::abs(r) > best_score + 1e-12) {
          best_score = std::abs(r);
          enter = j;
          dir = s;
        }
      }
      if (enter < 0) return true;  // phase optimum

      if (!pivot(enter, dir, phase1, sol)) return false;
      ++iterations_;

      const double metric = phase1 ? total_infeasibility() : current_objective();
      if (metric < best_metric - 1e-10 * (1.0 + std::abs(best_metric))) {
        best_metric = metric;
        stall_ = 0;
        bland_ = false;
      } else if (++stall_ > opt_.stall_limit) {
        bland_ = true;
      }
    }
  }

  // One ratio test plus basis update. dir is the movement sense of the
  // entering variable. Returns false on hard failure (status filled in).
  bool pivot(int enter, int dir, bool phase1, LpSolution& sol) {
    const Eigen::VectorXd w = ftran(enter);

    // Step limit from basic variables. A basic already beyond a bound and
    // moving further away contributes no breakpoint; one moving back toward
    // a violated bound blocks there (first breakpoint of the composite
    // phase-1 objective).
    double best_t = kInf;
    int leave_pos = -1;
    double leave_pivot = 0;
    double leave_target = 0;
    auto ratio_pass = [&](double piv_threshold) {
      for (int i = 0; i < m_; ++i) {
        const double wi = w[i];
        if (std::abs(wi) < piv_threshold) continue;
        const int bj = basis_[static_cast<size_t>(i)];
        const double rate = -dir * wi;  // d(value of basic i) / d(step)
        const double v = value_[static_cast<size_t>(bj)];
        const double lo = lo_[static_cast<size_t>(bj)];
        const double hi = hi_[static_cast<size_t>(bj)];
        double target;
        if (rate > 0) {
          if (v < lo - opt_.feas_tol) target = lo;
          else if (v > hi + opt_.feas_tol) continue;  // worsening, no breakpoint
          else if (hi != kInf) target = hi;
          else continue;
        } else {
          if (v > hi + opt_.feas_tol) target = hi;
          else if (v < lo - opt_.feas_tol) continue;
          else if (lo != -kInf) target = lo;
          else continue;
        }
        double t = (target - v) / rate;
        if (t < 0) t = 0;  // within tolerance of the bound already
        if (t < best_t - 1e-9) {
          best_t = t;
          leave_pos = i;
          leave_pivot = wi;
          leave_target = target;
        } else if (t <= best_t + 1e-9 && leave_pos >= 0) {
          const bool take =
              bland_ ? bj < basis_[static_cast<size_t>(leave_pos)]
                     : std::abs(wi) > std::abs(leave_pivot) + 1e-12;
          if (take) {
            best_t = std::min(best_t, t);
            leave_pos = i;
            leave_pivot = wi;
            leave_target = target;
          }
        }
      }
    };
    ratio_pass(opt_.pivot_tol);

    // Entering variable blocks itself by flipping to its opposite bound.
    const double range =
        hi_[static_cast<size_t>(enter)] - lo_[static_cast<size_t>(enter)];
    const bool flip_possible =
        state_[static_cast<size_t>(enter)] != NonBasic::FreeZero && range != kInf;
    bool flip = false;
    if (flip_possible && range < best_t) {
      best_t = range;
      flip = true;
    }

    if (!flip && leave_pos < 0) {
      // Retry with a looser pivot threshold before giving up.
      ratio_pass(1e-12);
      if (leave_pos < 0) {
        if (flip_possible) {
          best_t = range;
          flip = true;
        } else if (phase1) {
          // Phase 1 is bounded below by zero infeasibility, so a missing
          // block means the pricing direction was numerically bogus.
          sol.status = LpStatus::NumericalFailure;
          finalize_partial(sol);
          return false;
        } else {
          sol.status = LpStatus::Unbounded;
          finalize_partial(sol);
          return false;
        }
      }
    }

    const double t = best_t;
    value_[static_cast<size_t>(enter)] += dir * t;
    if (t != 0) {
      for (int i = 0; i < m_; ++i) {
        if (w[i] == 0.0) continue;
        value_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] -= dir * t * w[i];
      }
    }

    if (flip) {
      state_[static_cast<size_t>(enter)] =
          dir > 0 ? NonBasic::AtUpper : NonBasic::AtLower;
      value_[static_cast<size_t>(enter)] = dir > 0
                                               ? hi_[static_cast<size_t>(enter)]
                                               : lo_[static_cast<size_t>(enter)];
      return true;
    }

    const int leave_var = basis_[static_cast<size_t>(leave_pos)];
    value_[static_cast<size_t>(leave_var)] = leave_target;
    state_[static_cast<size_t>(leave_var)] =
        (leave_target == hi_[static_cast<size_t>(leave_var)] &&
         hi_[static_cast<size_t>(leave_var)] != lo_[static_cast<size_t>(leave_var)])
            ? NonBasic::AtUpper
            : NonBasic::AtLower;
    position_[static_cast<size_t>(leave_var)] = -1;
    basis_[static_cast<size_t>(leave_pos)] = enter;
    position_[static_cast<size_t>(enter)] = leave_pos;

    // Rank-1 update of the explicit inverse: the row operations that map the
    // entering column to the unit vector at leave_pos.
    const Eigen::RowVectorXd pivot_row = binv_.row(leave_pos) / leave_pivot;
    Eigen::VectorXd w2 = w;
    w2[leave_pos] = 0.0;
    binv_.noalias() -= w2 * pivot_row;
    binv_.row(leave_pos) = pivot_row;

    if (++pivots_since_refactor_ >= opt_.refactor_every) {
      if (!refactorize()) {
        sol.status = LpStatus::NumericalFailure;
        finalize_partial(sol);
        return false;
      }
    }
    return true;
  }

  // --- reporting ----------------------------------------------------------------

  void finalize(const LinearProgram& lp, LpSolution& sol) {
    refactorize();
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i)
      cb[i] = cost_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
    const Eigen::VectorXd y = binv_.transpose() * cb;
    sol.duals.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) sol.duals[static_cast<size_t>(i)] = y[i];
    sol.reduced_costs.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j)
      sol.reduced_costs[static_cast<size_t>(j)] =
          position_[static_cast<size_t>(j)] >= 0
              ? 0.0
              : cost_[static_cast<size_t>(j)] - dot_col(y, j);
    sol.x.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = value_[static_cast<size_t>(j)];
    sol.objective = 0;
    for (int j = 0; j < n_; ++j)
      sol.objective += lp.objective[static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];
    sol.iterations = iterations_;
  }

  void finalize_partial(LpSolution& sol) {
    sol.x.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) sol.x[static_cast<size_t>(j)] = value_[static_cast<size_t>(j)];
    sol.objective = current_objective();
    sol.iterations = iterations_;
  }

  // Rows absent: minimize each variable independently.
  LpSolution solve_unconstrained(const LinearProgram& lp) {
    LpSolution sol;
    sol.x.assign(static_cast<size_t>(n_), 0.0);
    sol.reduced_costs.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
      const double c = lp.objective[static_cast<size_t>(j)];
      const double lo = lo_[static_cast<size_t>(j)];
      const double hi = hi_[static_cast<size_t>(j)];
      double v;
      if (c > 0) {
        if (lo == -kInf) {
          sol.status = LpStatus::Unbounded;
          return sol;
        }
        v = lo;
      } else if (c < 0) {
        if (hi == kInf) {
          sol.status = LpStatus::Unbounded;
          return sol;
        }
        v = hi;
      } else {
        v = lo != -kInf ? lo : (hi != kInf ? hi : 0.0);
      }
      sol.x[static_cast<size_t>(j)] = v;
      sol.objective += c * v;
      sol.reduced_costs[static_cast<size_t>(j)] = c;
    }
    sol.status = LpStatus::Optimal;
    return sol;
  }
};

inline LpSolution solve_lp(const LinearProgram& lp, SimplexOptions opt = {}) {
  return SimplexSolver(opt).solve(lp);
}

inline LpSolution solve_lp_with_bounds(const LinearProgram& lp,
                                       const std::vector<double>& lower,
                                       const std::vector<double>& upper,
                                       SimplexOptions opt = {}) {
  return SimplexSolver(opt).solve(lp, &lower, &upper);
}

}  // namespace tep
