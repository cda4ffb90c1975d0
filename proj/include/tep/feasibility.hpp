#pragma once
// Scenario feasibility subproblem: given a trial plan, minimize total load
// shed under DC operation with bounded shed and generation-spill recourse.
// The spill keeps the LP feasible for any plan and any balanced snapshot, so
// "robust" is exactly "optimal shed below tolerance".
//
//   min sum r_i
//   s.t. sum_n A[i,n] f_n - r_i + s_i = g_i - d_i          (balance, =)
//        f_j - gamma_j (th_from - th_to) = 0               (existing, =)
//        +-(f_k - gamma_k (th_from - th_to)) <= M_k (1-xk) (candidates)
//        +-f_k <= fbar_k xk                                (candidates)
//        |f_j| <= fbar_j, 0 <= r <= d, 0 <= s <= g, th_slack = 0
//
// The candidate-row duals price a unit of xk. Each absolute-value pair is
// combined by summing its two multipliers, so degenerate splits at xk = 0
// still sum to the true slope of the optimal value in the shared rhs.

#include <cmath>
#include <cstdint>
#include <vector>

#include "tep/linear_program.hpp"
#include "tep/network.hpp"
#include "tep/simplex.hpp"

namespace tep {

// Total-shed tolerance (MW) below which a plan counts as serving a scenario.
inline constexpr double kShedTolMw = 1e-3;

// Per-bus shed above this is a curtailed bus for the spread count.
inline constexpr double kShedBusTolMw = 1e-6;

struct BendersCut {
  int scenario = 0;   // scenario id the cut was derived from
  int iteration = 0;  // filled by the decomposition loop
  double base = 0.0;  // shed at the anchor plan
  std::vector<double> coeffs;  // per candidate, d(shed)/d(x_k) subgradient
  std::vector<std::uint8_t> anchor;

  // Lower bound on the shed of plan x; equals base at the anchor.
  double evaluate(const std::vector<std::uint8_t>& x) const {
    double v = base;
    for (size_t k = 0; k < coeffs.size(); ++k)
      v += coeffs[k] * (static_cast<double>(x[k]) - static_cast<double>(anchor[k]));
    return v;
  }
};

struct FeasibilityResult {
  int scenario = 0;
  LpStatus status = LpStatus::NumericalFailure;
  double shed = 0.0;              // w_s, MW
  int shed_buses = 0;             // i_s: buses curtailed above tolerance
  std::vector<double> shed_by_bus;
  std::vector<double> spill_by_bus;
  std::vector<double> pi_m;   // combined multipliers of the angle-law pairs
  std::vector<double> pi_f;   // combined multipliers of the capacity pairs
  std::vector<double> big_m;  // constants the subproblem was built with
  int iterations = 0;

  bool robust(double tol = kShedTolMw) const {
    return status == LpStatus::Optimal && shed <= tol;
  }
};

// big_m is indexed like the candidate order (net.candidate_indices()).
inline FeasibilityResult solve_feasibility(const Network& net, const TrialPlan& plan,
                                           const OperationScenario& scn,
                                           const std::vector<double>& big_m,
                                           int slack_index,
                                           const SimplexOptions& lp_opt = {}) {
  const int nb = net.num_buses();
  const auto exist = net.existing_indices();
  const auto cand = net.candidate_indices();
  const int ne = static_cast<int>(exist.size());
  const int nc = static_cast<int>(cand.size());

  LinearProgram lp;
  // Variable layout: existing flows, candidate flows, angles, shed, spill.
  std::vector<int> vf_e(static_cast<size_t>(ne));
  for (int j = 0; j < ne; ++j) {
    const Circuit& c = net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])];
    vf_e[static_cast<size_t>(j)] = lp.add_variable(-c.rating, c.rating, 0.0);
  }
  std::vector<int> vf_c(static_cast<size_t>(nc));
  for (int k = 0; k < nc; ++k) vf_c[static_cast<size_t>(k)] = lp.add_variable(-kInf, kInf, 0.0);
  std::vector<int> vth(static_cast<size_t>(nb));
  for (int i = 0; i < nb; ++i)
    vth[static_cast<size_t>(i)] =
        i == slack_index ? lp.add_variable(0.0, 0.0, 0.0) : lp.add_variable(-kInf, kInf, 0.0);
  std::vector<int> vr(static_cast<size_t>(nb)), vs(static_cast<size_t>(nb));
  for (int i = 0; i < nb; ++i)
    vr[static_cast<size_t>(i)] =
        lp.add_variable(0.0, scn.demand[static_cast<size_t>(i)], 1.0);
  for (int i = 0; i < nb; ++i)
    vs[static_cast<size_t>(i)] =
        lp.add_variable(0.0, scn.generation[static_cast<size_t>(i)], 0.0);

  // Balance rows, one per bus.
  {
    std::vector<LpRow> rows(static_cast<size_t>(nb));
    for (int i = 0; i < nb; ++i) {
      rows[static_cast<size_t>(i)].rel = Relation::Equal;
      rows[static_cast<size_t>(i)].rhs = scn.generation[static_cast<size_t>(i)] -
                                         scn.demand[static_cast<size_t>(i)];
      rows[static_cast<size_t>(i)].coeffs.emplace_back(vr[static_cast<size_t>(i)], -1.0);
      rows[static_cast<size_t>(i)].coeffs.emplace_back(vs[static_cast<size_t>(i)], 1.0);
    }
    auto couple = [&](int var, const Circuit& c) {
      rows[static_cast<size_t>(net.bus_index(c.from))].coeffs.emplace_back(var, 1.0);
      rows[static_cast<size_t>(net.bus_index(c.to))].coeffs.emplace_back(var, -1.0);
    };
    for (int j = 0; j < ne; ++j)
      couple(vf_e[static_cast<size_t>(j)],
             net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])]);
    for (int k = 0; k < nc; ++k)
      couple(vf_c[static_cast<size_t>(k)],
             net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])]);
    for (int i = 0; i < nb; ++i) lp.add_row(std::move(rows[static_cast<size_t>(i)]));
  }

  // Existing circuits obey their angle law exactly.
  for (int j = 0; j < ne; ++j) {
    const Circuit& c = net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])];
    const double g = net.gamma(c);
    LpRow row;
    row.rel = Relation::Equal;
    row.rhs = 0.0;
    row.coeffs.emplace_back(vf_e[static_cast<size_t>(j)], 1.0);
    row.coeffs.emplace_back(vth[static_cast<size_t>(net.bus_index(c.from))], -g);
    row.coeffs.emplace_back(vth[static_cast<size_t>(net.bus_index(c.to))], g);
    lp.add_row(std::move(row));
  }

  // Candidate rows, four per candidate: angle pair then capacity pair.
  const int cand_rows_at = lp.num_rows();
  for (int k = 0; k < nc; ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])];
    const double g = net.gamma(c);
    const double built = plan.built[static_cast<size_t>(k)] ? 1.0 : 0.0;
    const int fv = vf_c[static_cast<size_t>(k)];
    const int tf = vth[static_cast<size_t>(net.bus_index(c.from))];
    const int tt = vth[static_cast<size_t>(net.bus_index(c.to))];
    const double m = big_m[static_cast<size_t>(k)];

    LpRow dp;
    dp.rel = Relation::LessEqual;
    dp.rhs = m * (1.0 - built);
    dp.coeffs = {{fv, 1.0}, {tf, -g}, {tt, g}};
    lp.add_row(std::move(dp));
    LpRow dm;
    dm.rel = Relation::LessEqual;
    dm.rhs = m * (1.0 - built);
    dm.coeffs = {{fv, -1.0}, {tf, g}, {tt, -g}};
    lp.add_row(std::move(dm));
    LpRow fp;
    fp.rel = Relation::LessEqual;
    fp.rhs = c.rating * built;
    fp.coeffs = {{fv, 1.0}};
    lp.add_row(std::move(fp));
    LpRow fm;
    fm.rel = Relation::LessEqual;
    fm.rhs = c.rating * built;
    fm.coeffs = {{fv, -1.0}};
    lp.add_row(std::move(fm));
  }

  const LpSolution sol = solve_lp(lp, lp_opt);

  FeasibilityResult out;
  out.scenario = scn.id;
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.big_m = big_m;
  if (sol.status != LpStatus::Optimal) return out;

  out.shed = sol.objective;
  out.shed_by_bus.resize(static_cast<size_t>(nb));
  out.spill_by_bus.resize(static_cast<size_t>(nb));
  for (int i = 0; i < nb; ++i) {
    out.shed_by_bus[static_cast<size_t>(i)] = sol.x[static_cast<size_t>(vr[static_cast<size_t>(i)])];
    out.spill_by_bus[static_cast<size_t>(i)] = sol.x[static_cast<size_t>(vs[static_cast<size_t>(i)])];
    if (out.shed_by_bus[static_cast<size_t>(i)] > kShedBusTolMw) ++out.shed_buses;
  }

  // Combine each row pair so degenerate dual splits still sum to the slope.
  out.pi_m.resize(static_cast<size_t>(nc));
  out.pi_f.resize(static_cast<size_t>(nc));
  for (int k = 0; k < nc; ++k) {
    const size_t base = static_cast<size_t>(cand_rows_at + 4 * k);
    out.pi_m[static_cast<size_t>(k)] = sol.duals[base] + sol.duals[base + 1];
    out.pi_f[static_cast<size_t>(k)] = sol.duals[base + 2] + sol.duals[base + 3];
  }
  return out;
}

// Assembles the investment-space cut: shed(x) >= base + coeffs . (x - anchor).
inline BendersCut compute_cut(const FeasibilityResult& res, const Network& net,
                              const TrialPlan& plan) {
  const auto cand = net.candidate_indices();
  BendersCut cut;
  cut.scenario = res.scenario;
  cut.base = res.shed;
  cut.anchor = plan.built;
  cut.coeffs.resize(cand.size());
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    cut.coeffs[k] = -res.big_m[k] * res.pi_m[k] + c.rating * res.pi_f[k];
  }
  return cut;
}

}  // namespace tep
