#pragma once

// Year-chained planning. Scenarios carry a year label; each year is planned
// in order against its own scenario slice, and whatever a year builds stays
// built for every later year. Three interchangeable engines: a one-shot
// MILP, the cutting-plane decomposition, and the greedy constructor feeding
// that decomposition a warm start.

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/benders.hpp"
#include "tep/greedy.hpp"
#include "tep/report.hpp"

namespace tep {

enum class PlanMode { Monolithic, Benders, GreedyBenders };

inline const char* to_string(PlanMode m) {
  switch (m) {
    case PlanMode::Monolithic: return "monolithic";
    case PlanMode::Benders: return "benders";
    case PlanMode::GreedyBenders: return "greedy-benders";
  }
  return "unknown";
}

struct PipelineConfig {
  PlanMode mode = PlanMode::GreedyBenders;
  CriticalCriterion criterion = CriticalCriterion::ShedAmount;
  int max_critical = 3;
  double milp_gap = 0.03;
  int max_iterations = 50;
  FormulationOptions formulation;
};

struct PipelineResult {
  bool feasible = true;
  int failed_year = 0;  // 0 when the whole chain succeeded
  std::vector<PlanReport> per_year;
  PlanReport combined;
  TrialPlan final_plan;
};

namespace detail {

inline std::vector<BuiltCircuitRow> new_rows(const Network& net,
                                             const TrialPlan& before,
                                             const TrialPlan& after,
                                             int year) {
  std::vector<BuiltCircuitRow> rows;
  const auto cand = net.candidate_indices();
  for (size_t k = 0; k < cand.size(); ++k) {
    if (!after.built[k] || before.built[k]) continue;
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    BuiltCircuitRow row;
    row.year = year;
    row.circuit = c.id;
    row.from = c.from;
    row.to = c.to;
    row.corridor = c.corridor;
    row.rating_mw = c.rating;
    row.cost = c.cost;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline PipelineResult run_pipeline(const Network& net,
                                   const std::vector<OperationScenario>& scns,
                                   int years, const PipelineConfig& cfg = {},
                                   std::ostream* log = nullptr) {
  int max_year = 1;
  for (const OperationScenario& s : scns) max_year = std::max(max_year, s.year);
  if (years <= 0) years = max_year;
  if (max_year > years)
    throw std::invalid_argument("scenario year " + std::to_string(max_year) +
                                " exceeds the planning horizon of " +
                                std::to_string(years));

  PipelineResult out;
  out.final_plan = empty_plan(net);
  out.combined.solver.mode = to_string(cfg.mode);
  out.combined.solver.gap = cfg.milp_gap;

  const BigMData big_m = compute_big_m(net);

  for (int year = 1; year <= years; ++year) {
    std::vector<OperationScenario> slice;
    for (const OperationScenario& s : scns)
      if (s.year == year) slice.push_back(s);

    const auto start = std::chrono::steady_clock::now();
    const TrialPlan before = out.final_plan;

    PlanReport rep;
    rep.solver.mode = to_string(cfg.mode);
    rep.solver.gap = cfg.milp_gap;

    if (log) *log << "year " << year << ": " << slice.size() << " scenario(s)\n";

    TrialPlan plan = before;
    if (!slice.empty()) {
      const int slack = resolve_slack_index(net, slice);
      if (cfg.mode == PlanMode::Monolithic) {
        MonolithicProblem prob =
            build_monolithic(net, slice, big_m, cfg.formulation);
        for (size_t k = 0; k < before.built.size(); ++k)
          if (before.built[k]) prob.lp.lower[k] = 1.0;
        MilpOptions mopt;
        mopt.gap_tol = cfg.milp_gap;
        const MilpSolution sol = solve_milp(prob.lp, mopt);
        if (sol.status == MilpStatus::Optimal ||
            (sol.status == MilpStatus::NodeLimit && !sol.x.empty())) {
          for (int k = 0; k < prob.num_candidates; ++k)
            plan.built[static_cast<size_t>(k)] =
                sol.x[static_cast<size_t>(k)] > 0.5 ? 1 : 0;
          rep.solver.iterations = sol.nodes;
        } else if (sol.status == MilpStatus::Infeasible) {
          rep.feasible = false;
          rep.infeasible_scenarios = detail::irreducible_scenarios(
              net, slice, big_m.value, slack);
        } else {
          throw std::runtime_error(std::string("pipeline: year MILP failed (") +
                                   to_string(sol.status) + ")");
        }
      } else if (cfg.mode == PlanMode::Benders) {
        BendersConfig bcfg;
        bcfg.criterion = cfg.criterion;
        bcfg.max_critical = cfg.max_critical;
        bcfg.milp_gap = cfg.milp_gap;
        bcfg.max_iterations = cfg.max_iterations;
        bcfg.formulation = cfg.formulation;
        bcfg.preset_built = before.built;
        const BendersResult res = run_benders(net, slice, bcfg, log);
        if (res.status == BendersStatus::Robust) {
          plan = res.plan;
          rep.solver.iterations = res.iterations;
          rep.solver.cuts = static_cast<int>(res.cuts.size());
        } else {
          rep.feasible = false;
          rep.infeasible_scenarios = res.infeasible_scenario_ids;
        }
      } else {
        GreedyConfig gcfg;
        gcfg.criterion = cfg.criterion;
        gcfg.max_critical = cfg.max_critical;
        gcfg.formulation = cfg.formulation;
        gcfg.preset_built = before.built;
        const GreedyResult greedy = run_greedy(net, slice, gcfg, log);
        if (greedy.status != GreedyStatus::Robust) {
          rep.feasible = false;
          rep.infeasible_scenarios = greedy.infeasible_scenario_ids;
        } else {
          BendersConfig bcfg;
          bcfg.criterion = cfg.criterion;
          bcfg.max_critical = cfg.max_critical;
          bcfg.milp_gap = cfg.milp_gap;
          bcfg.max_iterations = cfg.max_iterations;
          bcfg.formulation = cfg.formulation;
          bcfg.preset_built = before.built;
          bcfg.initial_cuts = greedy.harvested_cuts;
          bcfg.warm_built = greedy.plan.built;
          const BendersResult res = run_benders(net, slice, bcfg, log);
          if (res.status == BendersStatus::Robust) {
            plan = res.plan;
            rep.solver.iterations = res.iterations;
            rep.solver.cuts = static_cast<int>(res.cuts.size());
          } else {
            rep.feasible = false;
            rep.infeasible_scenarios = res.infeasible_scenario_ids;
          }
        }
      }

      if (rep.feasible) {
        for (const OperationScenario& s : slice) {
          const double shed =
              screen_scenario(net, plan, s, slack).overload_free
                  ? 0.0
                  : solve_feasibility(net, plan, s, big_m.value, slack).shed;
          rep.residual_shed.push_back({s.id, shed});
          if (shed > kShedTolMw) {
            rep.feasible = false;
            rep.infeasible_scenarios.push_back(s.id);
          }
        }
      }
    }

    rep.built = detail::new_rows(net, before, plan, year);
    for (const BuiltCircuitRow& row : rep.built) rep.total_cost += row.cost;
    rep.solver.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();

    if (!rep.feasible) {
      out.feasible = false;
      out.failed_year = year;
      out.per_year.push_back(rep);
      out.combined.feasible = false;
      out.combined.infeasible_scenarios = rep.infeasible_scenarios;
      break;
    }

    out.final_plan = plan;
    out.per_year.push_back(std::move(rep));
  }

  for (const PlanReport& rep : out.per_year) {
    out.combined.built.insert(out.combined.built.end(), rep.built.begin(),
                              rep.built.end());
    out.combined.total_cost += rep.total_cost;
    out.combined.solver.iterations += rep.solver.iterations;
    out.combined.solver.cuts += rep.solver.cuts;
    out.combined.solver.wall_seconds += rep.solver.wall_seconds;
  }
  if (out.feasible && !scns.empty()) {
    const int slack = resolve_slack_index(net, scns);
    for (const OperationScenario& s : scns)
      out.combined.residual_shed.push_back(
          {s.id, screen_scenario(net, out.final_plan, s, slack).overload_free
                     ? 0.0
                     : solve_feasibility(net, out.final_plan, s, big_m.value,
                                         slack)
                           .shed});
  }
  return out;
}

}  // namespace tep
