#pragma once

// Cutting-plane decomposition. A master MILP picks build plans; every
// scenario the trial plan cannot serve contributes a subgradient cut from
// its feasibility LP, and the loop repeats until some trial plan sheds
// nothing anywhere. The master may optionally embed full OPF blocks for a
// few critical scenarios, which turns the first trial plans from wild
// guesses into near-feasible candidates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/branch_and_bound.hpp"
#include "tep/dc_flow.hpp"
#include "tep/feasibility.hpp"
#include "tep/formulation.hpp"
#include "tep/network.hpp"

namespace tep {

enum class CriticalCriterion {
  ShedAmount,  // rank scenarios by total shed at the probe plan
  ShedSpread,  // rank by how many buses shed
};

// Scenarios that screening flags at a probe plan, ranked by the chosen
// criterion (descending, ties by scenario id ascending) and truncated.
struct CriticalSelection {
  std::vector<int> scenario_indices;        // positions in the scenario list
  std::vector<FeasibilityResult> results;   // aligned with scenario_indices
};

inline CriticalSelection select_critical_scenarios(
    const Network& net, const std::vector<OperationScenario>& scns,
    const TrialPlan& plan, const std::vector<double>& big_m, int slack_index,
    CriticalCriterion criterion, int capacity) {
  struct Ranked {
    int index;
    int id;
    double key;
    FeasibilityResult result;
  };
  std::vector<Ranked> ranked;
  for (size_t i = 0; i < scns.size(); ++i) {
    if (screen_scenario(net, plan, scns[i], slack_index).overload_free) continue;
    FeasibilityResult r = solve_feasibility(net, plan, scns[i], big_m, slack_index);
    const double key = criterion == CriticalCriterion::ShedAmount
                           ? r.shed
                           : static_cast<double>(r.shed_buses);
    ranked.push_back({static_cast<int>(i), scns[i].id, key, std::move(r)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.id < b.id;
  });
  if (capacity < 0) capacity = 0;
  if (ranked.size() > static_cast<size_t>(capacity))
    ranked.resize(static_cast<size_t>(capacity));

  CriticalSelection sel;
  for (Ranked& r : ranked) {
    sel.scenario_indices.push_back(r.index);
    sel.results.push_back(std::move(r.result));
  }
  return sel;
}

// Master problem: build binaries x first, then the shed bound delta, then
// any embedded OPF blocks. Cut rows constrain delta from below.
struct MasterProblem {
  LinearProgram lp;
  int num_candidates = 0;
  int delta_index = -1;
  double mu = 0.0;
  std::vector<ScenarioBlock> blocks;  // empty for the basic master
};

namespace detail {

inline void append_cut_rows(MasterProblem& m, const std::vector<BendersCut>& cuts) {
  // Scenario noise produces thousands of cuts that share a coefficient
  // vector and differ only in the constant, and only the tightest of those
  // can ever bind. Group by (snapped) coefficients and keep one row per
  // group so the master stays small no matter how large the pool grows.
  std::map<std::vector<long long>, size_t> tightest;  // snapped pi -> row index
  for (const BendersCut& cut : cuts) {
    LpRow row;
    double anchor_value = 0.0;
    std::vector<long long> key;
    key.reserve(cut.coeffs.size());
    for (size_t k = 0; k < cut.coeffs.size(); ++k) {
      if (cut.coeffs[k] != 0.0)
        row.coeffs.push_back({static_cast<int>(k), cut.coeffs[k]});
      anchor_value += cut.coeffs[k] * cut.anchor[k];
      key.push_back(std::llround(cut.coeffs[k] * 1e9));
    }
    row.coeffs.push_back({m.delta_index, -1.0});
    row.rel = Relation::LessEqual;
    row.rhs = anchor_value - cut.base;
    row.name = "cut_s" + std::to_string(cut.scenario) + "_p" +
               std::to_string(cut.iteration);
    const auto [it, fresh] = tightest.try_emplace(std::move(key), m.lp.rows.size());
    if (fresh) {
      m.lp.rows.push_back(std::move(row));
    } else if (row.rhs < m.lp.rows[it->second].rhs) {
      m.lp.rows[it->second] = std::move(row);
    }
  }
}

}  // namespace detail

// Pure cutting-plane master: investment binaries, the shed bound, and one
// row per cut. No embedded scenarios, no strengthening rows.
inline MasterProblem build_master_basic(const Network& net,
                                        const std::vector<BendersCut>& cuts,
                                        double mu) {
  MasterProblem m;
  m.num_candidates = net.num_candidates();
  m.mu = mu;
  for (int ci : net.candidate_indices()) {
    const Circuit& c = net.circuits[static_cast<size_t>(ci)];
    m.lp.add_binary(c.cost, "x" + std::to_string(c.id));
  }
  m.delta_index = m.lp.add_variable(0.0, std::numeric_limits<double>::infinity(),
                                    mu, "delta");
  detail::append_cut_rows(m, cuts);
  return m;
}

// Master with embedded OPF blocks for the critical scenarios plus the
// strengthening rows, sharing the investment binaries with the cut rows.
// With no criticals and strengthening disabled this reduces to the basic
// master.
inline MasterProblem build_master_enhanced(
    const Network& net, const std::vector<OperationScenario>& criticals,
    const BigMData& big_m, const std::vector<BendersCut>& cuts,
    const FormulationOptions& opt = {}) {
  MonolithicProblem mono = build_monolithic(net, criticals, big_m, opt);
  MasterProblem m;
  m.num_candidates = mono.num_candidates;
  m.mu = mono.mu;
  m.lp = std::move(mono.lp);
  m.blocks = std::move(mono.blocks);
  m.delta_index = m.lp.add_variable(0.0, std::numeric_limits<double>::infinity(),
                                    m.mu, "delta");
  detail::append_cut_rows(m, cuts);
  return m;
}

struct BendersConfig {
  CriticalCriterion criterion = CriticalCriterion::ShedAmount;
  int max_critical = 3;        // capacity of the embedded-scenario set
  double milp_gap = 0.0;       // relative gap for each master solve
  int max_iterations = 50;
  bool reselect_criticals = false;   // re-pick criticals at each trial plan
  bool upper_bound_pruning = false;  // stop once the master bound reaches the
                                     // best robust plan seen
  std::vector<BendersCut> initial_cuts;    // warm-start cut pool
  std::vector<std::uint8_t> warm_built;    // optional incumbent plan
  std::vector<std::uint8_t> preset_built;  // circuits already built (prior
                                           // years); never un-built
  FormulationOptions formulation;
};

enum class BendersStatus {
  Robust,          // returned plan sheds nothing in any scenario
  IterationLimit,  // ran out of iterations before closing
  Infeasible,      // no plan can serve every scenario
};

struct ConvergenceRecord {
  int iteration = 0;
  double master_objective = 0.0;
  double max_shed = 0.0;  // worst scenario at this iteration's trial plan
  int cuts_in_pool = 0;
  double wall_seconds = 0.0;
};

struct BendersResult {
  BendersStatus status = BendersStatus::IterationLimit;
  TrialPlan plan;
  double cost = 0.0;
  double master_objective = 0.0;
  double max_shed = 0.0;
  int iterations = 0;
  std::vector<BendersCut> cuts;  // final pool, warm-start cuts included
  std::vector<ConvergenceRecord> log;
  std::vector<int> infeasible_scenario_ids;  // set when no plan works
};

namespace detail {

// Scenarios that still shed at the full build are beyond any plan's reach.
inline std::vector<int> irreducible_scenarios(
    const Network& net, const std::vector<OperationScenario>& scns,
    const std::vector<double>& big_m, int slack) {
  std::vector<int> ids;
  const TrialPlan all = full_plan(net);
  for (const OperationScenario& s : scns) {
    if (screen_scenario(net, all, s, slack).overload_free) continue;
    if (solve_feasibility(net, all, s, big_m, slack).shed > kShedTolMw)
      ids.push_back(s.id);
  }
  return ids;
}

}  // namespace detail

inline BendersResult run_benders(const Network& net,
                                 const std::vector<OperationScenario>& scns,
                                 const BendersConfig& cfg = {},
                                 std::ostream* log = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  BendersResult out;
  out.cuts = cfg.initial_cuts;
  out.plan = empty_plan(net);
  if (cfg.preset_built.size() == out.plan.built.size())
    out.plan.built = cfg.preset_built;
  if (scns.empty()) {
    out.status = BendersStatus::Robust;
    out.cost = plan_cost(net, out.plan);
    return out;
  }

  const TrialPlan base = out.plan;
  const BigMData big_m = compute_big_m(net);
  const int slack = resolve_slack_index(net, scns);

  CriticalSelection sel =
      select_critical_scenarios(net, scns, base, big_m.value, slack,
                                cfg.criterion, cfg.max_critical);

  double best_cost = std::numeric_limits<double>::infinity();
  TrialPlan best_plan;
  if (!cfg.warm_built.empty() &&
      cfg.warm_built.size() == static_cast<size_t>(net.num_candidates())) {
    TrialPlan warm;
    warm.built = cfg.warm_built;
    double worst = 0.0;
    for (const OperationScenario& s : scns) {
      if (screen_scenario(net, warm, s, slack).overload_free) continue;
      worst = std::max(worst,
                       solve_feasibility(net, warm, s, big_m.value, slack).shed);
      if (worst > kShedTolMw) break;
    }
    if (worst <= kShedTolMw) {
      best_cost = plan_cost(net, warm);
      best_plan = warm;
    }
  }

  std::vector<OperationScenario> criticals;
  for (int idx : sel.scenario_indices) criticals.push_back(scns[static_cast<size_t>(idx)]);

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    MasterProblem master =
        build_master_enhanced(net, criticals, big_m, out.cuts, cfg.formulation);
    for (size_t k = 0; k < base.built.size(); ++k)
      if (base.built[k]) master.lp.lower[k] = 1.0;
    MilpOptions mopt;
    mopt.gap_tol = cfg.milp_gap;
    const MilpSolution sol = solve_milp(master.lp, mopt);
    if (sol.status == MilpStatus::Infeasible) {
      out.status = BendersStatus::Infeasible;
      out.iterations = iter;
      out.infeasible_scenario_ids =
          detail::irreducible_scenarios(net, scns, big_m.value, slack);
      return out;
    }
    const bool usable = sol.status == MilpStatus::Optimal ||
                        (sol.status == MilpStatus::NodeLimit && !sol.x.empty());
    if (!usable)
      throw std::runtime_error("benders: master solve failed at iteration " +
                               std::to_string(iter) + " (" +
                               to_string(sol.status) + ")");

    TrialPlan trial = empty_plan(net);
    for (int k = 0; k < master.num_candidates; ++k)
      trial.built[static_cast<size_t>(k)] =
          sol.x[static_cast<size_t>(k)] > 0.5 ? 1 : 0;

    double worst = 0.0;
    for (const OperationScenario& s : scns) {
      // The flow screen is exact for a fixed plan: overload free means the
      // feasibility LP sheds nothing, so the LP runs only where a cut can
      // come out of it.
      if (screen_scenario(net, trial, s, slack).overload_free) continue;
      const FeasibilityResult r =
          solve_feasibility(net, trial, s, big_m.value, slack);
      worst = std::max(worst, r.shed);
      if (r.shed <= kShedTolMw) continue;
      BendersCut cut = compute_cut(r, net, trial);
      cut.iteration = iter;
      out.cuts.push_back(std::move(cut));
    }

    out.iterations = iter;
    out.master_objective = sol.objective;
    out.log.push_back({iter, sol.objective, worst,
                       static_cast<int>(out.cuts.size()), elapsed()});
    if (log)
      *log << "iter=" << iter << " master=" << sol.objective
           << " max_shed=" << worst << " cuts=" << out.cuts.size()
           << " wall=" << out.log.back().wall_seconds << "s\n";

    if (worst <= kShedTolMw) {
      out.status = BendersStatus::Robust;
      out.plan = trial;
      out.cost = plan_cost(net, trial);
      out.max_shed = worst;
      return out;
    }

    out.plan = trial;
    out.cost = plan_cost(net, trial);
    out.max_shed = worst;

    if (cfg.upper_bound_pruning && best_cost < std::numeric_limits<double>::infinity() &&
        sol.objective >= best_cost - 1e-9) {
      out.status = BendersStatus::Robust;
      out.plan = best_plan;
      out.cost = best_cost;
      out.max_shed = 0.0;
      return out;
    }

    if (cfg.reselect_criticals) {
      sel = select_critical_scenarios(net, scns, trial, big_m.value, slack,
                                      cfg.criterion, cfg.max_critical);
      criticals.clear();
      for (int idx : sel.scenario_indices)
        criticals.push_back(scns[static_cast<size_t>(idx)]);
    }
  }

  if (best_cost < std::numeric_limits<double>::infinity()) {
    out.status = BendersStatus::Robust;
    out.plan = best_plan;
    out.cost = best_cost;
    out.max_shed = 0.0;
    return out;
  }
  out.status = BendersStatus::IterationLimit;
  for (const OperationScenario& s : scns) {
    if (screen_scenario(net, out.plan, s, slack).overload_free) continue;
    const FeasibilityResult r =
        solve_feasibility(net, out.plan, s, big_m.value, slack);
    if (r.shed > kShedTolMw) out.infeasible_scenario_ids.push_back(s.id);
  }
  return out;
}

}  // namespace tep
