#pragma once
// Investment-problem assembly: per-candidate disjunctive constants, the
// multi-scenario monolithic MILP, and the three families of valid
// investment-space rows that tighten it (bus bottlenecks, transshipment
// connectivity, duplicate-corridor precedence).
//
// Convention: every row produced here indexes investment variables as
// 0..K-1 in candidate order, matching the variable layout of the builders.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tep/linear_program.hpp"
#include "tep/network.hpp"

namespace tep {

enum class BigMMethod { PathBound, FallbackGlobal };

// M_k bounds gamma_k * |angle spread across k's terminals| at any operating
// point where k is out of service, so the disjunctive rows relax cleanly.
struct BigMData {
  std::vector<double> value;
  std::vector<BigMMethod> method;
};

// Shortest angle-budget path between the candidate's terminals over every
// other circuit: each in-service circuit e permits at most fbar_e/gamma_e of
// angle spread, so any connecting path bounds the terminals' spread by its
// weight sum. Candidates count as edges too; their own disjunctive rows
// bound them when unbuilt. No path at all means the spread is free, and any
// finite constant works: use a global angle budget.
inline BigMData compute_big_m(const Network& net) {
  const int nb = net.num_buses();
  const auto cand = net.candidate_indices();

  struct Arc {
    int to;
    double weight;
    int circuit;
  };
  std::vector<std::vector<Arc>> adj(static_cast<size_t>(nb));
  double min_gamma = kInf;
  std::vector<double> incident_cap(static_cast<size_t>(nb), 0.0);
  for (size_t ci = 0; ci < net.circuits.size(); ++ci) {
    const Circuit& c = net.circuits[ci];
    const double g = net.gamma(c);
    const int fi = net.bus_index(c.from), ti = net.bus_index(c.to);
    adj[static_cast<size_t>(fi)].push_back({ti, c.rating / g, static_cast<int>(ci)});
    adj[static_cast<size_t>(ti)].push_back({fi, c.rating / g, static_cast<int>(ci)});
    min_gamma = std::min(min_gamma, g);
    incident_cap[static_cast<size_t>(fi)] += c.rating;
    incident_cap[static_cast<size_t>(ti)] += c.rating;
  }
  double max_incident = 0.0;
  for (double v : incident_cap) max_incident = std::max(max_incident, v);
  const double global_budget = 2.0 * std::numbers::pi * max_incident / min_gamma;

  BigMData out;
  out.value.resize(cand.size());
  out.method.resize(cand.size());
  std::vector<double> dist(static_cast<size_t>(nb));
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    const int src = net.bus_index(c.from), dst = net.bus_index(c.to);

    std::fill(dist.begin(), dist.end(), kInf);
    dist[static_cast<size_t>(src)] = 0.0;
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.push({0.0, src});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[static_cast<size_t>(u)]) continue;
      if (u == dst) break;
      for (const Arc& a : adj[static_cast<size_t>(u)]) {
        if (a.circuit == cand[k]) continue;
        const double nd = d + a.weight;
        if (nd < dist[static_cast<size_t>(a.to)]) {
          dist[static_cast<size_t>(a.to)] = nd;
          heap.push({nd, a.to});
        }
      }
    }

    const double g = net.gamma(c);
    if (dist[static_cast<size_t>(dst)] < kInf) {
      out.value[k] = g * dist[static_cast<size_t>(dst)];
      out.method[k] = BigMMethod::PathBound;
    } else {
      out.value[k] = g * global_budget;
      out.method[k] = BigMMethod::FallbackGlobal;
    }
  }
  return out;
}

// Largest net injection each bus must move in some scenario, with the
// circuit sets that can carry it.
struct BottleneckData {
  std::vector<double> delta_star;          // per bus, MW
  std::vector<std::vector<int>> incident_cand;   // candidate positions (0..K-1)
  std::vector<std::vector<int>> incident_exist;  // circuit indices
};

inline BottleneckData compute_bottleneck(const Network& net,
                                         const std::vector<OperationScenario>& scns) {
  const int nb = net.num_buses();
  BottleneckData out;
  out.delta_star.assign(static_cast<size_t>(nb), 0.0);
  out.incident_cand.resize(static_cast<size_t>(nb));
  out.incident_exist.resize(static_cast<size_t>(nb));
  for (const OperationScenario& s : scns)
    for (int i = 0; i < nb; ++i)
      out.delta_star[static_cast<size_t>(i)] =
          std::max(out.delta_star[static_cast<size_t>(i)],
                   std::abs(s.generation[static_cast<size_t>(i)] -
                            s.demand[static_cast<size_t>(i)]));
  const auto cand = net.candidate_indices();
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    out.incident_cand[static_cast<size_t>(net.bus_index(c.from))].push_back(
        static_cast<int>(k));
    out.incident_cand[static_cast<size_t>(net.bus_index(c.to))].push_back(
        static_cast<int>(k));
  }
  for (int ei : net.existing_indices()) {
    const Circuit& c = net.circuits[static_cast<size_t>(ei)];
    out.incident_exist[static_cast<size_t>(net.bus_index(c.from))].push_back(ei);
    out.incident_exist[static_cast<size_t>(net.bus_index(c.to))].push_back(ei);
  }
  return out;
}

// One row per bus whose worst-case net injection exceeds the capacity of its
// existing incident circuits: the candidates there must make up the deficit.
// Valid for every fully-served operating point because serving all demand in
// a balanced scenario forces spill to zero, so |g - d| really must flow.
inline std::vector<LpRow> bottleneck_constraints(const Network& net,
                                                 const std::vector<OperationScenario>& scns) {
  const BottleneckData data = compute_bottleneck(net, scns);
  const auto cand = net.candidate_indices();
  std::vector<LpRow> rows;
  for (int i = 0; i < net.num_buses(); ++i) {
    double exist_cap = 0.0;
    for (int ei : data.incident_exist[static_cast<size_t>(i)])
      exist_cap += net.circuits[static_cast<size_t>(ei)].rating;
    const double deficit = data.delta_star[static_cast<size_t>(i)] - exist_cap;
    if (deficit <= 0.0) continue;
    LpRow row;
    row.rel = Relation::GreaterEqual;
    row.rhs = deficit;
    row.name = "bottleneck_b" + std::to_string(net.buses[static_cast<size_t>(i)].id);
    for (int k : data.incident_cand[static_cast<size_t>(i)])
      row.coeffs.emplace_back(
          k, net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])].rating);
    rows.push_back(std::move(row));
  }
  return rows;
}

// A transshipment bus is useless with exactly one built circuit: the flow
// would have nowhere to go. For each incident candidate i at such a bus:
// x_i <= sum of the other incident candidates.
inline std::vector<LpRow> connectivity_constraints(const Network& net) {
  const auto cand = net.candidate_indices();
  std::vector<LpRow> rows;
  for (int bi = 0; bi < net.num_buses(); ++bi) {
    const Bus& b = net.buses[static_cast<size_t>(bi)];
    if (b.kind != BusKind::Transshipment) continue;
    std::vector<int> dn;
    for (size_t k = 0; k < cand.size(); ++k) {
      const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
      if (c.from == b.id || c.to == b.id) dn.push_back(static_cast<int>(k));
    }
    for (int i : dn) {
      LpRow row;
      row.rel = Relation::LessEqual;
      row.rhs = 0.0;
      row.name = "connect_b" + std::to_string(b.id) + "_k" + std::to_string(i);
      row.coeffs.emplace_back(i, 1.0);
      for (int j : dn)
        if (j != i) row.coeffs.emplace_back(j, -1.0);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// Duplicate candidates in one corridor are interchangeable; ordering them by
// rank removes the symmetric copies of every plan.
inline std::vector<LpRow> precedence_constraints(const Network& net) {
  const auto cand = net.candidate_indices();
  std::map<std::string, std::vector<std::pair<int, int>>> groups;  // corridor -> (rank, k)
  for (size_t k = 0; k < cand.size(); ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[k])];
    if (!c.corridor.empty())
      groups[c.corridor].emplace_back(c.rank, static_cast<int>(k));
  }
  std::vector<LpRow> rows;
  for (auto& [name, members] : groups) {
    std::sort(members.begin(), members.end());
    for (size_t i = 1; i < members.size(); ++i) {
      LpRow row;
      row.rel = Relation::LessEqual;
      row.rhs = 0.0;
      row.name = "precede_" + name + "_r" + std::to_string(members[i].first);
      row.coeffs.emplace_back(members[i].second, 1.0);
      row.coeffs.emplace_back(members[i - 1].second, -1.0);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

struct FormulationOptions {
  bool use_bottleneck = true;
  bool use_connectivity = true;
  bool use_precedence = true;
  double mu = 0.0;         // shed penalty per MW; 0 = auto (10 x max cost)
  int row_budget = 200000;  // refuse assembly beyond this many rows
};

inline double resolve_mu(const Network& net, const FormulationOptions& opt) {
  if (opt.mu > 0.0) return opt.mu;
  double max_cost = 0.0;
  for (int k : net.candidate_indices())
    max_cost = std::max(max_cost, net.circuits[static_cast<size_t>(k)].cost);
  return std::max(1.0, 10.0 * max_cost);
}

struct RowSpan {
  int begin = 0;
  int count = 0;
};

struct ScenarioBlock {
  int scenario_id = 0;
  int f_exist0 = 0;
  int f_cand0 = 0;
  int theta0 = 0;
  int shed0 = 0;
  int spill0 = 0;
  int rows0 = 0;  // balance rows start here; kirchhoff and quads follow
};

struct MonolithicProblem {
  LinearProgram lp;
  int num_candidates = 0;
  double mu = 0.0;
  std::vector<ScenarioBlock> blocks;
  RowSpan bottleneck, connectivity, precedence;
};

// Full investment + operation MILP: build decisions x (binary, first K
// variables) plus one OPF block per scenario with penalized shed.
inline MonolithicProblem build_monolithic(const Network& net,
                                          const std::vector<OperationScenario>& scns,
                                          const BigMData& big_m,
                                          const FormulationOptions& opt = {}) {
  const int nb = net.num_buses();
  const auto exist = net.existing_indices();
  const auto cand = net.candidate_indices();
  const int ne = static_cast<int>(exist.size());
  const int nc = static_cast<int>(cand.size());
  const int ns = static_cast<int>(scns.size());

  const long long scenario_rows = static_cast<long long>(nb) + ne + 4LL * nc;
  const long long projected = scenario_rows * ns + 3LL * nc + nb;
  if (projected > opt.row_budget)
    throw std::length_error(
        "monolithic assembly needs about " + std::to_string(projected) +
        " rows, over the budget of " + std::to_string(opt.row_budget) +
        "; use the decomposition instead");

  MonolithicProblem out;
  out.num_candidates = nc;
  out.mu = resolve_mu(net, opt);
  LinearProgram& lp = out.lp;

  for (int k = 0; k < nc; ++k) {
    const Circuit& c = net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])];
    lp.add_binary(c.cost, "x" + std::to_string(c.id));
  }

  const int slack = scns.empty() ? 0 : resolve_slack_index(net, scns);
  for (const OperationScenario& s : scns) {
    ScenarioBlock blk;
    blk.scenario_id = s.id;
    blk.f_exist0 = lp.num_vars;
    for (int j = 0; j < ne; ++j) {
      const Circuit& c = net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])];
      lp.add_variable(-c.rating, c.rating, 0.0);
    }
    blk.f_cand0 = lp.num_vars;
    for (int k = 0; k < nc; ++k) lp.add_variable(-kInf, kInf, 0.0);
    blk.theta0 = lp.num_vars;
    for (int i = 0; i < nb; ++i)
      i == slack ? lp.add_variable(0.0, 0.0, 0.0) : lp.add_variable(-kInf, kInf, 0.0);
    blk.shed0 = lp.num_vars;
    for (int i = 0; i < nb; ++i)
      lp.add_variable(0.0, s.demand[static_cast<size_t>(i)], out.mu);
    blk.spill0 = lp.num_vars;
    for (int i = 0; i < nb; ++i)
      lp.add_variable(0.0, s.generation[static_cast<size_t>(i)], 0.0);

    blk.rows0 = lp.num_rows();
    {
      std::vector<LpRow> rows(static_cast<size_t>(nb));
      for (int i = 0; i < nb; ++i) {
        rows[static_cast<size_t>(i)].rel = Relation::Equal;
        rows[static_cast<size_t>(i)].rhs = s.generation[static_cast<size_t>(i)] -
                                           s.demand[static_cast<size_t>(i)];
        rows[static_cast<size_t>(i)].coeffs.emplace_back(blk.shed0 + i, -1.0);
        rows[static_cast<size_t>(i)].coeffs.emplace_back(blk.spill0 + i, 1.0);
      }
      auto couple = [&](int var, const Circuit& c) {
        rows[static_cast<size_t>(net.bus_index(c.from))].coeffs.emplace_back(var, 1.0);
        rows[static_cast<size_t>(net.bus_index(c.to))].coeffs.emplace_back(var, -1.0);
      };
      for (int j = 0; j < ne; ++j)
        couple(blk.f_exist0 + j,
               net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])]);
      for (int k = 0; k < nc; ++k)
        couple(blk.f_cand0 + k,
               net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])]);
      for (int i = 0; i < nb; ++i) lp.add_row(std::move(rows[static_cast<size_t>(i)]));
    }

    for (int j = 0; j < ne; ++j) {
      const Circuit& c = net.circuits[static_cast<size_t>(exist[static_cast<size_t>(j)])];
      const double g = net.gamma(c);
      LpRow row;
      row.rel = Relation::Equal;
      row.rhs = 0.0;
      row.coeffs.emplace_back(blk.f_exist0 + j, 1.0);
      row.coeffs.emplace_back(blk.theta0 + net.bus_index(c.from), -g);
      row.coeffs.emplace_back(blk.theta0 + net.bus_index(c.to), g);
      lp.add_row(std::move(row));
    }

    for (int k = 0; k < nc; ++k) {
      const Circuit& c = net.circuits[static_cast<size_t>(cand[static_cast<size_t>(k)])];
      const double g = net.gamma(c);
      const double m = big_m.value[static_cast<size_t>(k)];
      const int fv = blk.f_cand0 + k;
      const int tf = blk.theta0 + net.bus_index(c.from);
      const int tt = blk.theta0 + net.bus_index(c.to);

      LpRow dp;
      dp.rel = Relation::LessEqual;
      dp.rhs = m;
      dp.coeffs = {{fv, 1.0}, {tf, -g}, {tt, g}, {k, m}};
      lp.add_row(std::move(dp));
      LpRow dm;
      dm.rel = Relation::LessEqual;
      dm.rhs = m;
      dm.coeffs = {{fv, -1.0}, {tf, g}, {tt, -g}, {k, m}};
      lp.add_row(std::move(dm));
      LpRow fp;
      fp.rel = Relation::LessEqual;
      fp.rhs = 0.0;
      fp.coeffs = {{fv, 1.0}, {k, -c.rating}};
      lp.add_row(std::move(fp));
      LpRow fm;
      fm.rel = Relation::LessEqual;
      fm.rhs = 0.0;
      fm.coeffs = {{fv, -1.0}, {k, -c.rating}};
      lp.add_row(std::move(fm));
    }
    out.blocks.push_back(blk);
  }

  auto append = [&lp](std::vector<LpRow> rows) {
    RowSpan span{lp.num_rows(), static_cast<int>(rows.size())};
    for (LpRow& r : rows) lp.add_row(std::move(r));
    return span;
  };
  if (opt.use_bottleneck) out.bottleneck = append(bottleneck_constraints(net, scns));
  if (opt.use_connectivity) out.connectivity = append(connectivity_constraints(net));
  if (opt.use_precedence) out.precedence = append(precedence_constraints(net));
  return out;
}

// Reads the investment part of a MILP solution back into a plan.
inline TrialPlan extract_plan(const MonolithicProblem& prob, const std::vector<double>& x) {
  TrialPlan plan;
  plan.built.resize(static_cast<size_t>(prob.num_candidates));
  for (int k = 0; k < prob.num_candidates; ++k)
    plan.built[static_cast<size_t>(k)] = x[static_cast<size_t>(k)] > 0.5 ? 1 : 0;
  return plan;
}

// Shed part of a monolithic objective value, useful for robustness checks.
inline double monolithic_shed(const MonolithicProblem& prob, const std::vector<double>& x,
                              const Network& net) {
  const int nb = net.num_buses();
  double shed = 0.0;
  for (const ScenarioBlock& blk : prob.blocks)
    for (int i = 0; i < nb; ++i) shed += x[static_cast<size_t>(blk.shed0 + i)];
  return shed;
}

}  // namespace tep
