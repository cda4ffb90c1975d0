#pragma once

// Exhaustive-enumeration reference for small candidate sets. Every binary
// build plan is priced and evaluated against every scenario with the
// feasibility subproblem, yielding the cost-minimal robust plans or, when no
// plan is robust, the cost/shed trade-off frontier. The optimizing solvers
// are tested against this module, so it deliberately shares none of their
// shortcuts: shed is always measured by the LP, never by flow screening.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tep/feasibility.hpp"
#include "tep/formulation.hpp"
#include "tep/network.hpp"

namespace tep {

// 2^K plans are enumerated; beyond this the table stops being a sane tool.
constexpr int kOracleMaxCandidates = 16;

struct OracleEntry {
  std::vector<std::uint8_t> built;  // candidate order, as in TrialPlan
  double cost = 0.0;
  double max_shed = 0.0;  // worst scenario total shed, MW
};

struct OracleResult {
  bool robust_exists = false;
  double optimal_cost = 0.0;
  // All cost-minimal robust plans (ascending plan index). Empty when
  // robust_exists is false; the frontier carries the trade-offs instead.
  std::vector<std::vector<std::uint8_t>> optimal_plans;
  // Pareto-minimal (cost, max_shed) entries, cost ascending. Filled only
  // when no plan is robust.
  std::vector<OracleEntry> frontier;
  // Every plan in enumeration order: bit b of the index selects candidate b.
  std::vector<OracleEntry> table;
};

inline OracleResult brute_force_oracle(const Network& net,
                                       const std::vector<OperationScenario>& scns,
                                       double tol = kShedTolMw) {
  const int k = net.num_candidates();
  if (k > kOracleMaxCandidates)
    throw std::invalid_argument(
        "brute-force oracle would enumerate 2^" + std::to_string(k) +
        " plans; limit is 2^" + std::to_string(kOracleMaxCandidates) +
        ". Shrink the candidate set or use the optimizing solvers.");

  const BigMData big_m = compute_big_m(net);
  const int slack = scns.empty() ? 0 : resolve_slack_index(net, scns);

  OracleResult out;
  out.table.reserve(static_cast<size_t>(1) << k);

  TrialPlan plan = empty_plan(net);
  for (std::uint32_t id = 0; id < (1u << k); ++id) {
    for (int b = 0; b < k; ++b)
      plan.built[static_cast<size_t>(b)] =
          static_cast<std::uint8_t>((id >> b) & 1u);

    OracleEntry entry;
    entry.built = plan.built;
    entry.cost = plan_cost(net, plan);
    for (const OperationScenario& scn : scns) {
      const FeasibilityResult r =
          solve_feasibility(net, plan, scn, big_m.value, slack);
      if (r.status != LpStatus::Optimal)
        throw std::runtime_error("oracle: feasibility LP did not solve for plan " +
                                 std::to_string(id) + ", scenario " +
                                 std::to_string(scn.id));
      if (r.shed > entry.max_shed) entry.max_shed = r.shed;
    }
    out.table.push_back(std::move(entry));
  }

  double best = 0.0;
  for (const OracleEntry& e : out.table) {
    if (e.max_shed > tol) continue;
    if (!out.robust_exists || e.cost < best) best = e.cost;
    out.robust_exists = true;
  }
  if (out.robust_exists) {
    out.optimal_cost = best;
    const double cost_tol = 1e-9 * std::max(1.0, std::abs(best));
    for (const OracleEntry& e : out.table)
      if (e.max_shed <= tol && e.cost <= best + cost_tol)
        out.optimal_plans.push_back(e.built);
    return out;
  }

  // No robust plan: keep the non-dominated (cost, max_shed) entries. Sorting
  // by cost then shed then plan index makes the sweep deterministic; within
  // one cost level only the minimal-shed entries survive, and a level is
  // skipped entirely unless it improves on every cheaper level.
  std::vector<int> order(out.table.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const OracleEntry& ea = out.table[static_cast<size_t>(a)];
    const OracleEntry& eb = out.table[static_cast<size_t>(b)];
    if (ea.cost != eb.cost) return ea.cost < eb.cost;
    if (ea.max_shed != eb.max_shed) return ea.max_shed < eb.max_shed;
    return a < b;
  });
  double best_shed = std::numeric_limits<double>::infinity();
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() &&
           out.table[static_cast<size_t>(order[j])].cost ==
               out.table[static_cast<size_t>(order[i])].cost)
      ++j;
    const double level_shed = out.table[static_cast<size_t>(order[i])].max_shed;
    if (level_shed < best_shed) {
      for (size_t t = i; t < j; ++t) {
        const OracleEntry& e = out.table[static_cast<size_t>(order[t])];
        if (e.max_shed == level_shed) out.frontier.push_back(e);
      }
      best_shed = level_shed;
    }
    i = j;
  }
  return out;
}

// --- golden-file form ------------------------------------------------------
//
// Plans are stored as ascending lists of built circuit ids, which keeps the
// committed files readable and independent of candidate ordering details.

inline std::vector<int> built_circuit_ids(const Network& net,
                                          const std::vector<std::uint8_t>& built) {
  const auto cand = net.candidate_indices();
  std::vector<int> ids;
  for (size_t b = 0; b < built.size(); ++b)
    if (built[b])
      ids.push_back(net.circuits[static_cast<size_t>(cand[b])].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline nlohmann::json oracle_to_json(const OracleResult& res, const Network& net) {
  nlohmann::json j;
  j["candidates"] = nlohmann::json::array();
  for (int ci : net.candidate_indices())
    j["candidates"].push_back(net.circuits[static_cast<size_t>(ci)].id);
  j["robust_exists"] = res.robust_exists;
  j["optimal_cost"] = res.optimal_cost;
  j["optimal_plans"] = nlohmann::json::array();
  for (const auto& p : res.optimal_plans)
    j["optimal_plans"].push_back(built_circuit_ids(net, p));
  auto entry_json = [&](const OracleEntry& e) {
    nlohmann::json je;
    je["built"] = built_circuit_ids(net, e.built);
    je["cost"] = e.cost;
    je["max_shed"] = e.max_shed;
    return je;
  };
  j["frontier"] = nlohmann::json::array();
  for (const OracleEntry& e : res.frontier) j["frontier"].push_back(entry_json(e));
  j["table"] = nlohmann::json::array();
  for (const OracleEntry& e : res.table) j["table"].push_back(entry_json(e));
  return j;
}

}  // namespace tep
