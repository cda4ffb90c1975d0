#pragma once

// Constructive heuristic. Each round picks the worst violated scenarios at
// the current plan, solves the investment MILP restricted to just those, and
// keeps everything it builds. Once screening is clean a pruning pass walks
// the built candidates from most to least expensive and drops any circuit
// whose removal leaves every scenario overload free; failed removals are
// turned into feasibility cuts so a later decomposition run starts warm.

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/benders.hpp"
#include "tep/branch_and_bound.hpp"
#include "tep/dc_flow.hpp"
#include "tep/feasibility.hpp"
#include "tep/formulation.hpp"
#include "tep/network.hpp"

namespace tep {

struct GreedyConfig {
  CriticalCriterion criterion = CriticalCriterion::ShedAmount;
  int max_critical = 3;
  double milp_gap = 0.03;  // per-round investment MILP gap
  int max_rounds = 64;
  std::vector<std::uint8_t> preset_built;  // circuits already built (prior
                                           // years); never pruned
  FormulationOptions formulation;
};

enum class GreedyStatus {
  Robust,      // final plan passes screening on every scenario
  Infeasible,  // some scenarios shed even with every candidate built
};

struct GreedyRound {
  int round = 0;
  std::vector<int> critical_ids;  // scenario ids embedded this round
  int built_count = 0;            // circuits built after the round
  double cost = 0.0;
};

struct PruneRecord {
  int circuit_id = 0;
  double cost = 0.0;
  bool removed = false;
  std::vector<int> broken_scenario_ids;  // violated once the circuit is out
  int cuts_harvested = 0;
};

struct GreedyResult {
  GreedyStatus status = GreedyStatus::Infeasible;
  TrialPlan plan;
  double cost = 0.0;
  int rounds = 0;
  std::vector<GreedyRound> round_log;
  std::vector<PruneRecord> prune_log;
  std::vector<BendersCut> harvested_cuts;
  std::vector<int> infeasible_scenario_ids;
};

namespace detail {

inline bool plan_screens_clean(const Network& net, const TrialPlan& plan,
                               const std::vector<OperationScenario>& scns,
                               int slack) {
  for (const OperationScenario& s : scns)
    if (!screen_scenario(net, plan, s, slack).overload_free) return false;
  return true;
}

}  // namespace detail

// Walk the built candidates from most to least expensive (ties broken by
// higher id first) and commit any removal that keeps every scenario
// overload free. A removal that breaks scenarios is rolled back, and each
// newly violated scenario contributes one feasibility cut anchored at the
// rejected plan. Afterwards duplicates inside each corridor are swapped
// down to the lowest ranks so equal-cost plans have one canonical form.
inline TrialPlan prune_redundant(const Network& net,
                                 const std::vector<OperationScenario>& scns,
                                 TrialPlan plan, const BigMData& big_m,
                                 int slack,
                                 std::vector<BendersCut>* harvested,
                                 std::vector<PruneRecord>* records,
                                 std::ostream* log = nullptr,
                                 const std::vector<std::uint8_t>* keep = nullptr) {
  const auto cand = net.candidate_indices();
  const auto kept = [&](size_t k) {
    return keep && k < keep->size() && (*keep)[k];
  };

  struct Entry {
    int k;  // candidate position
    int id;
    double cost;
  };
  std::vector<Entry> order;
  for (size_t k = 0; k < cand.size(); ++k) {
    if (!plan.built[k] || kept(k)) continue;
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    order.push_back({static_cast<int>(k), c.id, c.cost});
  }
  std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.id > b.id;
  });

  for (const Entry& e : order) {
    plan.built[static_cast<size_t>(e.k)] = 0;
    PruneRecord rec;
    rec.circuit_id = e.id;
    rec.cost = e.cost;

    std::vector<int> broken;
    for (const OperationScenario& s : scns)
      if (!screen_scenario(net, plan, s, slack).overload_free)
        broken.push_back(s.id);

    if (broken.empty()) {
      rec.removed = true;
      if (log) *log << "prune: removed circuit " << e.id << " cost " << e.cost << "\n";
    } else {
      rec.broken_scenario_ids = broken;
      for (const OperationScenario& s : scns) {
        bool hit = false;
        for (int id : broken) hit = hit || id == s.id;
        if (!hit) continue;
        const FeasibilityResult r =
            solve_feasibility(net, plan, s, big_m.value, slack);
        if (harvested && r.shed > kShedTolMw) {
          harvested->push_back(compute_cut(r, net, plan));
          ++rec.cuts_harvested;
        }
      }
      plan.built[static_cast<size_t>(e.k)] = 1;
      if (log)
        *log << "prune: kept circuit " << e.id << ", " << broken.size()
             << " scenario(s) would break\n";
    }
    if (records) records->push_back(std::move(rec));
  }

  // Canonicalize corridor duplicates: the built count per corridor stays,
  // but the built flags move to the lowest ranked interchangeable members.
  std::map<std::string, std::vector<std::pair<int, int>>> groups;  // corridor -> (rank, k)
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    if (!c.corridor.empty())
      groups[c.corridor].emplace_back(c.rank, static_cast<int>(k));
  }
  for (auto& [corridor, members] : groups) {
    std::sort(members.begin(), members.end());
    bool interchangeable = true;
    for (size_t i = 1; i < members.size(); ++i) {
      const Circuit& a = net.circuits[static_cast<size_t>(cand[static_cast<size_t>(members[0].second)])];
      const Circuit& b = net.circuits[static_cast<size_t>(cand[static_cast<size_t>(members[i].second)])];
      interchangeable = interchangeable && a.susceptance == b.susceptance &&
                        a.rating == b.rating && a.cost == b.cost;
    }
    if (!interchangeable) continue;
    int built = 0;
    for (const auto& [rank, k] : members) built += plan.built[static_cast<size_t>(k)];
    bool drops_kept = false;
    for (size_t i = 0; i < members.size(); ++i)
      if (static_cast<int>(i) >= built && kept(static_cast<size_t>(members[i].second)))
        drops_kept = true;
    if (drops_kept) continue;  // a prior-year build sits on a high rank
    for (size_t i = 0; i < members.size(); ++i)
      plan.built[static_cast<size_t>(members[i].second)] =
          static_cast<int>(i) < built ? 1 : 0;
  }
  return plan;
}

inline GreedyResult run_greedy(const Network& net,
                               const std::vector<OperationScenario>& scns,
                               const GreedyConfig& cfg = {},
                               std::ostream* log = nullptr) {
  GreedyResult out;
  out.plan = empty_plan(net);
  if (cfg.preset_built.size() == out.plan.built.size())
    out.plan.built = cfg.preset_built;
  if (scns.empty()) {
    out.status = GreedyStatus::Robust;
    out.cost = plan_cost(net, out.plan);
    return out;
  }

  const BigMData big_m = compute_big_m(net);
  const int slack = resolve_slack_index(net, scns);
  const auto cand = net.candidate_indices();

  const auto report_infeasible = [&] {
    out.status = GreedyStatus::Infeasible;
    out.infeasible_scenario_ids =
        detail::irreducible_scenarios(net, scns, big_m.value, slack);
    if (log) {
      *log << "greedy: no candidate set can serve scenario(s)";
      for (int id : out.infeasible_scenario_ids) *log << " " << id;
      *log << "\n";
    }
  };

  for (int round = 1; round <= cfg.max_rounds; ++round) {
    const CriticalSelection sel =
        select_critical_scenarios(net, scns, out.plan, big_m.value, slack,
                                  cfg.criterion, cfg.max_critical);
    if (sel.scenario_indices.empty()) break;

    std::vector<OperationScenario> criticals;
    for (int idx : sel.scenario_indices)
      criticals.push_back(scns[static_cast<size_t>(idx)]);

    MonolithicProblem prob =
        build_monolithic(net, criticals, big_m, cfg.formulation);
    for (size_t k = 0; k < cand.size(); ++k)
      if (out.plan.built[k]) prob.lp.lower[k] = 1.0;  // keep earlier builds

    MilpOptions mopt;
    mopt.gap_tol = cfg.milp_gap;
    MilpSolution sol = solve_milp(prob.lp, mopt);
    if (sol.status == MilpStatus::Infeasible) {
      report_infeasible();
      return out;
    }
    if (sol.status != MilpStatus::Optimal &&
        !(sol.status == MilpStatus::NodeLimit && !sol.x.empty()))
      throw std::runtime_error(std::string("greedy: round MILP failed (") +
                               to_string(sol.status) + ")");

    TrialPlan next = empty_plan(net);
    for (size_t k = 0; k < cand.size(); ++k)
      next.built[k] = sol.x[k] > 0.5 ? 1 : 0;

    double embedded_shed = 0.0;
    for (const OperationScenario& s : criticals)
      embedded_shed = std::max(
          embedded_shed,
          solve_feasibility(net, next, s, big_m.value, slack).shed);
    if (embedded_shed > kShedTolMw && cfg.milp_gap > 0.0) {
      // The gap let the solver keep a shedding incumbent; decide exactly.
      mopt.gap_tol = 0.0;
      sol = solve_milp(prob.lp, mopt);
      if (sol.status == MilpStatus::Infeasible) {
        report_infeasible();
        return out;
      }
      for (size_t k = 0; k < cand.size(); ++k)
        next.built[k] = sol.x[k] > 0.5 ? 1 : 0;
      embedded_shed = 0.0;
      for (const OperationScenario& s : criticals)
        embedded_shed = std::max(
            embedded_shed,
            solve_feasibility(net, next, s, big_m.value, slack).shed);
    }
    if (embedded_shed > kShedTolMw) {
      // Even an exact solve prefers paying the shed penalty: no candidate
      // combination serves these scenarios.
      report_infeasible();
      return out;
    }

    out.plan = next;
    out.rounds = round;
    GreedyRound rec;
    rec.round = round;
    for (const OperationScenario& s : criticals) rec.critical_ids.push_back(s.id);
    for (size_t k = 0; k < cand.size(); ++k) rec.built_count += out.plan.built[k];
    rec.cost = plan_cost(net, out.plan);
    if (log) {
      *log << "round=" << rec.round << " criticals=";
      for (size_t i = 0; i < rec.critical_ids.size(); ++i)
        *log << (i ? "," : "") << rec.critical_ids[i];
      *log << " built=" << rec.built_count << " cost=" << rec.cost << "\n";
    }
    out.round_log.push_back(std::move(rec));
  }

  if (!detail::plan_screens_clean(net, out.plan, scns, slack)) {
    // Round budget exhausted with overloads left; only possible when no
    // plan fixes them, since builds are monotone across rounds.
    report_infeasible();
    return out;
  }

  const std::vector<std::uint8_t>* keep =
      cfg.preset_built.size() == out.plan.built.size() ? &cfg.preset_built
                                                       : nullptr;
  out.plan = prune_redundant(net, scns, out.plan, big_m, slack,
                             &out.harvested_cuts, &out.prune_log, log, keep);
  out.status = GreedyStatus::Robust;
  out.cost = plan_cost(net, out.plan);
  return out;
}

}  // namespace tep
