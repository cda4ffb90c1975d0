#pragma once

// Property harness. Each suite stresses one invariant the solvers rely on
// and reports pass/fail with a counterexample dump instead of throwing:
// failures are data for the caller to print, not exceptions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tep/benders.hpp"
#include "tep/branch_and_bound.hpp"
#include "tep/dc_flow.hpp"
#include "tep/feasibility.hpp"
#include "tep/formulation.hpp"
#include "tep/greedy.hpp"
#include "tep/network.hpp"
#include "tep/oracle.hpp"

namespace tep {

struct PropertyCheck {
  std::string suite;
  std::string name;
  bool passed = true;
  std::string detail;  // counterexample or skip reason
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const {
    for (const PropertyCheck& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

struct PropertyContext {
  const Network& net;
  const std::vector<OperationScenario>& scns;
  BigMData big_m;
  int slack = 0;
  int num_cand = 0;
  bool exhaustive = false;  // 2^K enumeration affordable
  bool small_milp = false;  // full monolithic solves affordable
  std::vector<std::vector<std::uint8_t>> probe_plans;

  double shed(const std::vector<std::uint8_t>& built, const OperationScenario& scn) {
    TrialPlan plan;
    plan.built = built;
    return solve_feasibility(net, plan, scn, big_m.value, slack).shed;
  }

  double max_shed(const std::vector<std::uint8_t>& built) {
    double worst = 0.0;
    for (const OperationScenario& s : scns) worst = std::max(worst, shed(built, s));
    return worst;
  }
};

inline PropertyContext make_context(const Network& net,
                                    const std::vector<OperationScenario>& scns) {
  PropertyContext ctx{net,
                      scns,
                      compute_big_m(net),
                      scns.empty() ? 0 : resolve_slack_index(net, scns),
                      net.num_candidates(),
                      false,
                      false,
                      {}};
  ctx.exhaustive = ctx.num_cand <= 12;
  ctx.small_milp = ctx.num_cand <= 12 && scns.size() <= 50;
  if (ctx.exhaustive) {
    const std::uint32_t total = 1u << ctx.num_cand;
    const std::uint32_t stride = total > 256 ? total / 256 : 1;
    for (std::uint32_t id = 0; id < total; id += stride) {
      std::vector<std::uint8_t> built(static_cast<size_t>(ctx.num_cand), 0);
      for (int b = 0; b < ctx.num_cand; ++b) built[static_cast<size_t>(b)] = (id >> b) & 1u;
      ctx.probe_plans.push_back(std::move(built));
    }
  } else {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 128; ++i) {
      std::vector<std::uint8_t> built(static_cast<size_t>(ctx.num_cand), 0);
      for (int b = 0; b < ctx.num_cand; ++b)
        built[static_cast<size_t>(b)] = (rng() >> 13) & 1u;
      ctx.probe_plans.push_back(std::move(built));
    }
  }
  return ctx;
}

inline std::string plan_ids_text(const Network& net,
                                 const std::vector<std::uint8_t>& built) {
  std::string out = "{";
  bool first = true;
  for (int id : built_circuit_ids(net, built)) {
    if (!first) out += ",";
    out += std::to_string(id);
    first = false;
  }
  return out + "}";
}

inline const OperationScenario* scenario_by_id(
    const std::vector<OperationScenario>& scns, int id) {
  for (const OperationScenario& s : scns)
    if (s.id == id) return &s;
  return nullptr;
}

inline void check_cut_validity(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"cut-validity", std::move(name), ok, std::move(detail)});
  };
  if (ctx.scns.empty()) {
    add("subgradient-lower-bound", true, "skipped: no scenarios");
    return;
  }

  // Cuts anchored at the empty plan and at each single-circuit plan.
  std::vector<std::vector<std::uint8_t>> anchors;
  anchors.emplace_back(static_cast<size_t>(ctx.num_cand), 0);
  for (int b = 0; b < ctx.num_cand && ctx.num_cand <= 12; ++b) {
    std::vector<std::uint8_t> a(static_cast<size_t>(ctx.num_cand), 0);
    a[static_cast<size_t>(b)] = 1;
    anchors.push_back(std::move(a));
  }

  std::map<int, std::vector<BendersCut>> cuts_by_scenario;
  size_t cut_count = 0;
  for (const std::vector<std::uint8_t>& built : anchors) {
    TrialPlan plan;
    plan.built = built;
    for (const OperationScenario& s : ctx.scns) {
      const FeasibilityResult r =
          solve_feasibility(ctx.net, plan, s, ctx.big_m.value, ctx.slack);
      if (r.shed > kShedTolMw) {
        cuts_by_scenario[s.id].push_back(compute_cut(r, ctx.net, plan));
        ++cut_count;
      }
    }
  }
  if (cut_count == 0) {
    add("subgradient-lower-bound", true,
        "skipped: no scenario sheds at the probe anchors");
    return;
  }

  std::string bad;
  for (const std::vector<std::uint8_t>& built : ctx.probe_plans) {
    for (const auto& [sid, cuts] : cuts_by_scenario) {
      const OperationScenario* scn = scenario_by_id(ctx.scns, sid);
      const double w = ctx.shed(built, *scn);
      for (const BendersCut& cut : cuts)
        if (cut.evaluate(built) > w + 1e-6) {
          bad = "scenario " + std::to_string(sid) + " plan " +
                plan_ids_text(ctx.net, built) + ": bound " +
                std::to_string(cut.evaluate(built)) + " > shed " +
                std::to_string(w);
          break;
        }
      if (!bad.empty()) break;
    }
    if (!bad.empty()) break;
  }
  add("subgradient-lower-bound", bad.empty(),
      bad.empty() ? std::to_string(cut_count) + " cut(s) checked on " +
                        std::to_string(ctx.probe_plans.size()) + " plan(s)"
                  : bad);

  // Negative control: a sign-flipped subgradient must be caught.
  BendersCut corrupted = cuts_by_scenario.begin()->second.front();
  bool has_coeff = false;
  for (double& c : corrupted.coeffs) {
    has_coeff = has_coeff || c != 0.0;
    c = -c;
  }
  bool caught = false;
  std::string where;
  const OperationScenario* scn = scenario_by_id(ctx.scns, corrupted.scenario);
  for (const std::vector<std::uint8_t>& built : ctx.probe_plans) {
    if (corrupted.evaluate(built) > ctx.shed(built, *scn) + 1e-6) {
      caught = true;
      where = "violating plan " + plan_ids_text(ctx.net, built);
      break;
    }
  }
  add("sign-flip-detected", !has_coeff || caught,
      caught ? where : "corrupted cut slipped through every probe plan");
}

inline void check_bound_monotonicity(PropertyContext& ctx, PropertyReport& rep) {
  if (ctx.scns.empty() || ctx.num_cand == 0) {
    rep.checks.push_back({"bound-monotonicity", "add-circuit-never-hurts", true,
                          "skipped: nothing to compare"});
    return;
  }
  std::string bad;
  int pairs = 0;
  for (const std::vector<std::uint8_t>& built : ctx.probe_plans) {
    if (pairs >= 96) break;
    const double base = ctx.max_shed(built);
    for (int b = 0; b < ctx.num_cand; ++b) {
      if (built[static_cast<size_t>(b)]) continue;
      std::vector<std::uint8_t> bigger = built;
      bigger[static_cast<size_t>(b)] = 1;
      ++pairs;
      const double grown = ctx.max_shed(bigger);
      if (grown > base + 1e-6) {
        bad = "adding a circuit to " + plan_ids_text(ctx.net, built) +
              " raised max shed " + std::to_string(base) + " -> " +
              std::to_string(grown);
        break;
      }
    }
    if (!bad.empty()) break;
  }
  rep.checks.push_back({"bound-monotonicity", "add-circuit-never-hurts",
                        bad.empty(),
                        bad.empty() ? std::to_string(pairs) + " pair(s) checked"
                                    : bad});
}

inline void check_big_m(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"big-m", std::move(name), ok, std::move(detail)});
  };
  if (!ctx.small_milp || ctx.scns.empty() || ctx.num_cand == 0) {
    add("scale-invariance", true, "skipped: instance too large for full solves");
    return;
  }

  BigMData wide = ctx.big_m;
  for (double& v : wide.value) v *= 10.0;
  BigMData half = ctx.big_m;
  for (double& v : half.value) v *= 0.5;

  const MonolithicProblem base_prob = build_monolithic(ctx.net, ctx.scns, ctx.big_m);
  const MonolithicProblem wide_prob = build_monolithic(ctx.net, ctx.scns, wide);
  const MilpSolution base_sol = solve_milp(base_prob.lp);
  const MilpSolution wide_sol = solve_milp(wide_prob.lp);
  bool same = base_sol.status == wide_sol.status &&
              std::abs(base_sol.objective - wide_sol.objective) <= 1e-6;
  std::string detail;
  if (same && base_sol.status == MilpStatus::Optimal)
    for (int k = 0; k < ctx.num_cand; ++k)
      if ((base_sol.x[static_cast<size_t>(k)] > 0.5) !=
          (wide_sol.x[static_cast<size_t>(k)] > 0.5)) {
        same = false;
        detail = "plans diverge at candidate position " + std::to_string(k);
        break;
      }
  if (!same && detail.empty())
    detail = "objective " + std::to_string(base_sol.objective) + " vs " +
             std::to_string(wide_sol.objective) + " at 10x M";
  add("scale-invariance", same, detail);

  const LpSolution base_rel = solve_lp(base_prob.lp);
  const LpSolution wide_rel = solve_lp(wide_prob.lp);
  const bool tighter = base_rel.objective >= wide_rel.objective - 1e-7;
  add("path-bound-tighter-relaxation", tighter,
      tighter ? "" : "relaxation " + std::to_string(base_rel.objective) + " < " +
                         std::to_string(wide_rel.objective));

  // Halving below the path bound should be observable: either the optimum
  // moves (disjunctive slack binds) or it provably stays put here.
  const MilpSolution half_sol =
      solve_milp(build_monolithic(ctx.net, ctx.scns, half).lp);
  const bool moved = half_sol.status != base_sol.status ||
                     std::abs(half_sol.objective - base_sol.objective) > 1e-6;
  add("halved-m-probe", true,
      moved ? "halving M changes the optimum: disjunctive slack binds"
            : "halving M left the optimum unchanged on this instance");
}

inline void check_pruning(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"pruning", std::move(name), ok, std::move(detail)});
  };
  if (ctx.scns.empty()) {
    add("final-plan-screens-clean", true, "skipped: no scenarios");
    return;
  }
  const GreedyResult res = run_greedy(ctx.net, ctx.scns);
  if (res.status != GreedyStatus::Robust) {
    add("infeasibility-is-explicit", !res.infeasible_scenario_ids.empty(),
        res.infeasible_scenario_ids.empty()
            ? "infeasible result without naming scenarios"
            : "");
    return;
  }
  std::string bad;
  for (const OperationScenario& s : ctx.scns)
    if (!screen_scenario(ctx.net, res.plan, s, ctx.slack).overload_free) {
      bad = "scenario " + std::to_string(s.id) + " overloads the final plan";
      break;
    }
  add("final-plan-screens-clean", bad.empty(), bad);

  std::string rec_bad;
  for (const PruneRecord& rec : res.prune_log)
    if (!rec.removed && rec.broken_scenario_ids.empty()) {
      rec_bad = "circuit " + std::to_string(rec.circuit_id) +
                " was kept without a broken scenario";
      break;
    }
  add("kept-circuits-justified", rec_bad.empty(), rec_bad);
}

inline void check_precedence(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"precedence", std::move(name), ok, std::move(detail)});
  };
  if (!ctx.small_milp || ctx.scns.empty()) {
    add("duplicates-ordered", true, "skipped: instance too large for full solves");
    return;
  }
  const MonolithicProblem prob = build_monolithic(ctx.net, ctx.scns, ctx.big_m);
  const MilpSolution sol = solve_milp(prob.lp);
  if (sol.status != MilpStatus::Optimal) {
    add("duplicates-ordered", true, "skipped: no optimal solution");
    return;
  }

  const std::vector<int> cand = ctx.net.candidate_indices();
  std::map<std::string, std::vector<std::pair<int, int>>> groups;  // corridor -> (rank, k)
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = ctx.net.circuits[static_cast<size_t>(cand[k])];
    if (!c.corridor.empty())
      groups[c.corridor].emplace_back(c.rank, static_cast<int>(k));
  }
  std::string bad;
  for (auto& [corridor, members] : groups) {
    std::sort(members.begin(), members.end());
    for (size_t i = 1; i < members.size() && bad.empty(); ++i) {
      const bool lower = sol.x[static_cast<size_t>(members[i - 1].second)] > 0.5;
      const bool upper = sol.x[static_cast<size_t>(members[i].second)] > 0.5;
      if (upper && !lower)
        bad = "corridor " + corridor + " builds rank " +
              std::to_string(members[i].first) + " without rank " +
              std::to_string(members[i - 1].first);
    }
  }
  add("duplicates-ordered", bad.empty(), bad);

  FormulationOptions off;
  off.use_precedence = false;
  const MilpSolution free_sol =
      solve_milp(build_monolithic(ctx.net, ctx.scns, ctx.big_m, off).lp);
  const bool same = free_sol.status == sol.status &&
                    std::abs(free_sol.objective - sol.objective) <= 1e-6;
  add("toggle-preserves-optimum", same,
      same ? "" : "objective moved when precedence rows were dropped");
}

inline void check_connectivity(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"connectivity", std::move(name), ok, std::move(detail)});
  };
  if (!ctx.small_milp || ctx.scns.empty()) {
    add("no-lone-transshipment-spur", true,
        "skipped: instance too large for full solves");
    return;
  }
  const MonolithicProblem prob = build_monolithic(ctx.net, ctx.scns, ctx.big_m);
  const MilpSolution sol = solve_milp(prob.lp);
  if (sol.status != MilpStatus::Optimal) {
    add("no-lone-transshipment-spur", true, "skipped: no optimal solution");
    return;
  }

  TrialPlan plan = empty_plan(ctx.net);
  for (int k = 0; k < ctx.num_cand; ++k)
    plan.built[static_cast<size_t>(k)] = sol.x[static_cast<size_t>(k)] > 0.5 ? 1 : 0;

  std::string bad;
  for (int bi = 0; bi < ctx.net.num_buses() && bad.empty(); ++bi) {
    if (ctx.net.buses[static_cast<size_t>(bi)].kind != BusKind::Transshipment)
      continue;
    int incident = 0;
    for (int ci : in_service_circuits(ctx.net, plan)) {
      const Circuit& c = ctx.net.circuits[static_cast<size_t>(ci)];
      if (ctx.net.bus_index(c.from) == bi || ctx.net.bus_index(c.to) == bi)
        ++incident;
    }
    if (incident == 1)
      bad = "transshipment bus " +
            std::to_string(ctx.net.buses[static_cast<size_t>(bi)].id) +
            " has exactly one in-service circuit";
  }
  add("no-lone-transshipment-spur", bad.empty(), bad);

  FormulationOptions off;
  off.use_connectivity = false;
  const MilpSolution free_sol =
      solve_milp(build_monolithic(ctx.net, ctx.scns, ctx.big_m, off).lp);
  const bool same = free_sol.status == sol.status &&
                    std::abs(free_sol.objective - sol.objective) <= 1e-6;
  add("toggle-preserves-optimum", same,
      same ? "" : "objective moved when connectivity rows were dropped");
}

inline void check_oracle_screen(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"oracle-screen", std::move(name), ok, std::move(detail)});
  };
  if (!ctx.small_milp || ctx.scns.empty()) {
    add("robust-plans-screen-clean", true,
        "skipped: instance too large for enumeration");
    return;
  }
  const OracleResult oracle = brute_force_oracle(ctx.net, ctx.scns);
  std::string bad;
  int robust_plans = 0;
  for (size_t id = 0; id < oracle.table.size() && bad.empty(); ++id) {
    const OracleEntry& entry = oracle.table[id];
    if (entry.max_shed > kShedTolMw) continue;
    ++robust_plans;
    TrialPlan plan;
    plan.built = entry.built;
    for (const OperationScenario& s : ctx.scns)
      if (!screen_scenario(ctx.net, plan, s, ctx.slack).overload_free) {
        bad = "zero-shed plan " + plan_ids_text(ctx.net, entry.built) +
              " overloads scenario " + std::to_string(s.id);
        break;
      }
  }
  add("robust-plans-screen-clean", bad.empty(),
      bad.empty() ? std::to_string(robust_plans) + " robust plan(s) checked" : bad);
}

inline void check_flow_agreement(PropertyContext& ctx, PropertyReport& rep) {
  const auto add = [&rep](std::string name, bool ok, std::string detail) {
    rep.checks.push_back({"flow-agreement", std::move(name), ok, std::move(detail)});
  };
  if (ctx.scns.empty()) {
    add("zero-shed-matches-power-flow", true, "skipped: no scenarios");
    return;
  }
  std::string bad;
  int checked = 0;
  for (const std::vector<std::uint8_t>& built : ctx.probe_plans) {
    if (checked >= 512) break;
    TrialPlan plan;
    plan.built = built;
    for (const OperationScenario& s : ctx.scns) {
      if (checked >= 512) break;
      if (ctx.shed(built, s) > kShedTolMw) continue;
      ++checked;
      const DcFlowResult flow = solve_dc_flow(ctx.net, plan, s, ctx.slack);
      if (!flow.solvable) {
        bad = "zero-shed plan " + plan_ids_text(ctx.net, built) +
              " has no power-flow solution for scenario " + std::to_string(s.id);
        break;
      }
      for (int ci : in_service_circuits(ctx.net, plan)) {
        const Circuit& c = ctx.net.circuits[static_cast<size_t>(ci)];
        if (std::abs(flow.flow[static_cast<size_t>(ci)]) >
            c.rating + 1e-6 * std::max(1.0, c.rating)) {
          bad = "zero-shed plan " + plan_ids_text(ctx.net, built) +
                " overloads circuit " + std::to_string(c.id) + " in scenario " +
                std::to_string(s.id);
          break;
        }
      }
      if (!bad.empty()) break;
    }
    if (!bad.empty()) break;
  }
  add("zero-shed-matches-power-flow", bad.empty(),
      bad.empty() ? std::to_string(checked) + " plan-scenario pair(s) checked"
                  : bad);
}

}  // namespace detail

// Run one named suite ("all" for everything) against a network and its
// scenarios. Failures land in the report; nothing throws for a failed
// property.
inline PropertyReport check_properties(const Network& net,
                                       const std::vector<OperationScenario>& scns,
                                       const std::string& suite = "all") {
  detail::PropertyContext ctx = detail::make_context(net, scns);
  PropertyReport rep;
  const bool all = suite == "all" || suite.empty();
  if (all || suite == "cut-validity") detail::check_cut_validity(ctx, rep);
  if (all || suite == "bound-monotonicity") detail::check_bound_monotonicity(ctx, rep);
  if (all || suite == "big-m") detail::check_big_m(ctx, rep);
  if (all || suite == "pruning") detail::check_pruning(ctx, rep);
  if (all || suite == "precedence") detail::check_precedence(ctx, rep);
  if (all || suite == "connectivity") detail::check_connectivity(ctx, rep);
  if (all || suite == "oracle-screen") detail::check_oracle_screen(ctx, rep);
  if (all || suite == "flow-agreement") detail::check_flow_agreement(ctx, rep);
  if (rep.checks.empty())
    rep.checks.push_back(
        {"harness", "known-suite", false, "unknown suite name: " + suite});
  return rep;
}

inline std::vector<std::string> property_suite_names() {
  return {"cut-validity",  "bound-monotonicity", "big-m",
          "pruning",       "precedence",         "connectivity",
          "oracle-screen", "flow-agreement"};
}

}  // namespace tep
